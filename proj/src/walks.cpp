#include "sbfw/walks.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <stdexcept>

namespace sbfw {

MassVector::MassVector(std::vector<double> masses) : masses_(std::move(masses)) {
    CompensatedSum total;
    for (std::size_t i = 0; i < masses_.size(); ++i) {
        const double m = masses_[i];
        if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument("MassVector: masses must be positive and finite");
        if (i > 0 && m > masses_[i - 1]) throw std::invalid_argument("MassVector: masses must be non-increasing");
        total.add(m);
    }
    total_ = total.value();
}

MassVector MassVector::uniform(std::size_t n, double mass) {
    return MassVector(std::vector<double>(n, mass));
}

WalkPath::WalkPath(std::vector<double> times, std::vector<double> sizes, std::vector<double> prefix)
    : times_(std::move(times)), sizes_(std::move(sizes)), prefix_(std::move(prefix)) {}

std::vector<double> WalkPath::prefix_sums(std::span<const double> sizes) {
    std::vector<double> prefix(sizes.size() + 1);
    prefix[0] = 0.0;
    CompensatedSum acc;
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        acc.add(sizes[i]);
        prefix[i + 1] = acc.value();
    }
    return prefix;
}

WalkPath WalkPath::from_jumps(std::vector<double> times, std::vector<double> sizes) {
    if (times.size() != sizes.size()) throw std::invalid_argument("WalkPath: times and sizes differ in length");
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (!(times[i] >= 0.0) || !std::isfinite(times[i])) throw std::invalid_argument("WalkPath: jump times must be finite and >= 0");
        if (!(sizes[i] > 0.0) || !std::isfinite(sizes[i])) throw std::invalid_argument("WalkPath: jump sizes must be finite and > 0");
    }

    if (!std::is_sorted(times.begin(), times.end())) {
        std::vector<std::size_t> order(times.size());
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return times[a] < times[b]; });
        std::vector<double> t2(times.size()), s2(sizes.size());
        for (std::size_t i = 0; i < order.size(); ++i) {
            t2[i] = times[order[i]];
            s2[i] = sizes[order[i]];
        }
        times.swap(t2);
        sizes.swap(s2);
    }

    // Merge jumps sharing a time.
    std::size_t out = 0;
    for (std::size_t i = 0; i < times.size(); ++i) {
        if (out > 0 && times[i] == times[out - 1]) {
            sizes[out - 1] += sizes[i];
        } else {
            times[out] = times[i];
            sizes[out] = sizes[i];
            ++out;
        }
    }
    times.resize(out);
    sizes.resize(out);

    auto prefix = prefix_sums(sizes);
    return WalkPath(std::move(times), std::move(sizes), std::move(prefix));
}

std::size_t WalkPath::jumps_up_to(double s) const {
    return static_cast<std::size_t>(std::upper_bound(times_.begin(), times_.end(), s) - times_.begin());
}

double ExcursionSet::total_length() const {
    CompensatedSum acc;
    for (const auto& e : excursions_) acc.add(e.length);
    return acc.value();
}

WalkPath build_sbfw(const MassVector& x, std::span<const double> xi, double t) {
    if (xi.size() != x.size()) throw std::invalid_argument("build_sbfw: xi and x differ in length");
    if (!(t > 0.0) || !std::isfinite(t)) throw std::invalid_argument("build_sbfw: t must be positive");
    std::vector<double> times(xi.size());
    for (std::size_t i = 0; i < xi.size(); ++i) {
        if (!(xi[i] > 0.0) || !std::isfinite(xi[i])) throw std::invalid_argument("build_sbfw: xi must be positive");
        times[i] = xi[i] / t;
    }
    const auto m = x.masses();
    return WalkPath::from_jumps(std::move(times), std::vector<double>(m.begin(), m.end()));
}

WalkPath build_uniform_walk(std::span<const double> sorted_times, double jump_size) {
    return WalkPath::from_jumps(std::vector<double>(sorted_times.begin(), sorted_times.end()),
                                std::vector<double>(sorted_times.size(), jump_size));
}

double evaluate(const WalkPath& w, double s) {
    if (!(s >= 0.0)) throw std::domain_error("evaluate: s must be non-negative");
    return w.mass_before(w.jumps_up_to(s)) - s;
}

double past_infimum(const WalkPath& w, double s) {
    if (!(s >= 0.0)) throw std::domain_error("past_infimum: s must be non-negative");
    const auto times = w.jump_times();
    const std::size_t k = w.jumps_up_to(s);
    // Z(0) = 0 unless a jump sits at 0; the minimum over left limits covers it.
    double inf = std::min(0.0, w.mass_before(k) - s);
    for (std::size_t j = 0; j < k; ++j) inf = std::min(inf, w.mass_before(j) - times[j]);
    return inf;
}

ExcursionSet decompose(const WalkPath& w) {
    std::vector<Excursion> out;
    scan_excursions(w, [&](const Excursion& e) { out.push_back(e); });
    return ExcursionSet(std::move(out), w.total_mass());
}

namespace {

bool longer(const Excursion& a, const Excursion& b) {
    if (a.length != b.length) return a.length > b.length;
    return a.start < b.start;
}

}  // namespace

std::vector<Excursion> largest_k(const ExcursionSet& es, std::size_t k) {
    if (k == 0) throw std::invalid_argument("largest_k: k must be positive");
    std::vector<Excursion> all(es.begin(), es.end());
    const std::size_t m = std::min(k, all.size());
    std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(m), all.end(), longer);
    all.resize(m);
    return all;
}

void TopTwo::operator()(const Excursion& e) {
    ++seen_;
    if (count_ == 0) {
        top_[0] = e;
        count_ = 1;
    } else if (e.length > top_[0].length) {
        top_[1] = top_[0];
        top_[0] = e;
        count_ = 2;
    } else if (count_ == 1 || e.length > top_[1].length) {
        top_[1] = e;
        count_ = 2;
    }
}

WalkPath rescale_time(const WalkPath& w, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("rescale_time: factor must be positive");
    std::vector<double> times(w.times_.size());
    for (std::size_t i = 0; i < times.size(); ++i) times[i] = w.times_[i] / factor;
    return WalkPath(std::move(times), w.sizes_, w.prefix_);
}

void write_jumps_csv(std::ostream& os, const WalkPath& w) {
    const auto old = os.precision(17);
    os << "jump_time,jump_size\n";
    for (std::size_t i = 0; i < w.jump_count(); ++i) os << w.jump_times()[i] << ',' << w.jump_sizes()[i] << '\n';
    os.precision(old);
}

void write_excursions_csv(std::ostream& os, const ExcursionSet& es) {
    const auto old = os.precision(17);
    os << "start,length,pre_start_infimum\n";
    for (const auto& e : es) os << e.start << ',' << e.length << ',' << e.pre_start_infimum << '\n';
    os.precision(old);
}

}  // namespace sbfw
