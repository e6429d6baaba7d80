#pragma once

// Simultaneous breadth-first walks (sBFW) and their excursions above past
// infima.
//
// A walk is s -> sum_i x_i 1{tau_i <= s} - s: positive jumps at sorted times
// and unit negative drift. For such a walk the length of an excursion equals
// the mass of the jumps it contains, which is what lets the busy-period scan
// below run in a single pass and report lengths as mass sums.

#include <cmath>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

namespace sbfw {

/// Neumaier-compensated running sum.
class CompensatedSum {
public:
    CompensatedSum() = default;
    explicit CompensatedSum(double first) : sum_(first) {}

    void add(double x) {
        const double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x)) comp_ += (sum_ - t) + x;
        else comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

/// Non-increasing positive vertex masses; the multiplicative coalescent's
/// initial state.
class MassVector {
public:
    /// Throws std::invalid_argument unless masses are positive, finite and
    /// non-increasing.
    explicit MassVector(std::vector<double> masses);

    static MassVector uniform(std::size_t n, double mass);

    std::span<const double> masses() const { return masses_; }
    std::size_t size() const { return masses_.size(); }
    double operator[](std::size_t i) const { return masses_[i]; }
    double total_mass() const { return total_; }

private:
    std::vector<double> masses_;
    double total_ = 0.0;
};

/// A cadlag path with unit negative drift and finitely many positive jumps at
/// strictly increasing times. Immutable once built.
class WalkPath {
public:
    WalkPath() = default;

    /// Jumps in any order. Sorted by time; jumps sharing a time are merged
    /// into one jump carrying the summed size.
    static WalkPath from_jumps(std::vector<double> times, std::vector<double> sizes);

    std::span<const double> jump_times() const { return times_; }
    std::span<const double> jump_sizes() const { return sizes_; }
    std::size_t jump_count() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    /// Mass of the first k jumps (compensated prefix sum).
    double mass_before(std::size_t k) const { return prefix_[k]; }
    double total_mass() const { return prefix_.back(); }

    /// Number of jumps with time <= s.
    std::size_t jumps_up_to(double s) const;

private:
    friend WalkPath rescale_time(const WalkPath& w, double factor);

    WalkPath(std::vector<double> times, std::vector<double> sizes, std::vector<double> prefix);
    static std::vector<double> prefix_sums(std::span<const double> sizes);

    std::vector<double> times_;
    std::vector<double> sizes_;
    std::vector<double> prefix_{0.0};
};

/// One excursion above past infima. Jumps [first_jump, first_jump + jump_count)
/// of the walk are exactly the jumps it contains.
struct Excursion {
    double start = 0.0;
    double length = 0.0;
    /// Z(start-) = inf_{u <= start} Z(u); always <= 0.
    double pre_start_infimum = 0.0;
    std::size_t first_jump = 0;
    std::size_t jump_count = 0;

    double end() const { return start + length; }
};

class ExcursionSet {
public:
    ExcursionSet() = default;
    ExcursionSet(std::vector<Excursion> excursions, double total_mass)
        : excursions_(std::move(excursions)), total_mass_(total_mass) {}

    std::span<const Excursion> excursions() const { return excursions_; }
    std::size_t size() const { return excursions_.size(); }
    bool empty() const { return excursions_.empty(); }
    const Excursion& operator[](std::size_t i) const { return excursions_[i]; }
    auto begin() const { return excursions_.begin(); }
    auto end() const { return excursions_.end(); }

    /// Mass of the walk the set was extracted from.
    double total_mass() const { return total_mass_; }
    /// Compensated sum of excursion lengths.
    double total_length() const;

private:
    std::vector<Excursion> excursions_;
    double total_mass_ = 0.0;
};

/// Z^{x,t}: a jump of size x_i at time xi_i / t for each vertex i.
/// Throws std::invalid_argument on length mismatch or non-positive xi / t.
WalkPath build_sbfw(const MassVector& x, std::span<const double> xi, double t);

/// Walk with n jumps of a common size at the given (ascending) times. The
/// fast path used by the Monte Carlo drivers for uniform masses.
WalkPath build_uniform_walk(std::span<const double> sorted_times, double jump_size);

/// Z(s) = sum of jump sizes with time <= s, minus s. O(log n).
double evaluate(const WalkPath& w, double s);

/// inf_{u <= s} Z(u). The infimum sits at a left limit Z(tau_k-) or at s.
double past_infimum(const WalkPath& w, double s);

/// Single left-to-right busy-period scan. `visit(const Excursion&)` is called
/// once per excursion in start order; nothing is allocated per excursion.
///
/// A jump strictly before the current end E extends the excursion by its
/// mass. A jump at or after E closes it and opens the next one.
template <class Visitor>
void scan_excursions(const WalkPath& w, Visitor&& visit) {
    const auto times = w.jump_times();
    const auto sizes = w.jump_sizes();
    const std::size_t n = times.size();
    if (n == 0) return;

    std::size_t first = 0;
    double start = times[0];
    CompensatedSum mass(sizes[0]);
    for (std::size_t i = 1; i < n; ++i) {
        if (times[i] < start + mass.value()) {
            mass.add(sizes[i]);
            continue;
        }
        visit(Excursion{start, mass.value(), w.mass_before(first) - start, first, i - first});
        first = i;
        start = times[i];
        mass = CompensatedSum(sizes[i]);
    }
    visit(Excursion{start, mass.value(), w.mass_before(first) - start, first, n - first});
}

ExcursionSet decompose(const WalkPath& w);

/// The k longest excursions, longest first; ties go to the earlier start.
/// Returns fewer than k when the set is smaller.
std::vector<Excursion> largest_k(const ExcursionSet& es, std::size_t k);

/// Keeps the two longest excursions seen by a scan (same ordering rule as
/// largest_k).
class TopTwo {
public:
    void operator()(const Excursion& e);
    const Excursion* first() const { return count_ > 0 ? &top_[0] : nullptr; }
    const Excursion* second() const { return count_ > 1 ? &top_[1] : nullptr; }
    std::size_t seen() const { return seen_; }

private:
    Excursion top_[2];
    std::size_t count_ = 0;
    std::size_t seen_ = 0;
};

/// Divides every jump time by `factor`; sizes are untouched. Turns Z^{n,c0}
/// into Z^{n,c} with factor c/c0 without drawing new randomness.
WalkPath rescale_time(const WalkPath& w, double factor);

/// CSV with header `jump_time,jump_size`.
void write_jumps_csv(std::ostream& os, const WalkPath& w);
/// CSV with header `start,length,pre_start_infimum`.
void write_excursions_csv(std::ostream& os, const ExcursionSet& es);

}  // namespace sbfw
