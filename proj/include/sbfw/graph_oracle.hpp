#pragma once

// Ground truth for the excursion encoding: direct simulation of the random
// graph / multiplicative coalescent with exponential edge clocks, and exact
// component-size laws of ER(n, p) for small n.

#include <cstddef>
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "sbfw/random.hpp"
#include "sbfw/walks.hpp"

namespace sbfw::oracle {

/// Component sizes as a non-increasing tuple of vertex counts.
using Partition = std::vector<int>;
using PartitionPmf = std::map<Partition, double>;

inline constexpr std::size_t kMaxGraphProcessVertices = 10000;
inline constexpr int kMaxExactVertices = 8;
inline constexpr int kMaxRawEnumerationVertices = 7;

/// Union-find over vertices carrying masses; records every merge.
class CoalescentState {
public:
    struct Merge {
        double time;
        std::size_t root_a;
        std::size_t root_b;
    };

    explicit CoalescentState(const MassVector& x);

    std::size_t find(std::size_t v);
    /// Joins the components of a and b at `time`. Returns false when they
    /// already coincide. Merge times must not decrease.
    bool unite(std::size_t a, std::size_t b, double time);

    std::size_t vertex_count() const { return parent_.size(); }
    std::size_t component_count() const { return components_; }
    std::span<const Merge> merge_log() const { return log_; }

    /// Component masses, non-increasing.
    std::vector<double> component_masses();
    /// Component vertex counts, non-increasing.
    Partition component_sizes();

private:
    std::vector<std::size_t> parent_;
    std::vector<std::uint8_t> rank_;
    std::vector<double> mass_;
    std::vector<int> count_;
    std::vector<Merge> log_;
    std::size_t components_;
};

/// Edge {i, j} arrives at an Exponential(rate x_i x_j) time; arrivals are
/// processed in time order. Returns the non-increasing component-mass vector
/// at each query time. Query times must be non-decreasing and n must not
/// exceed kMaxGraphProcessVertices (std::invalid_argument otherwise).
std::vector<std::vector<double>> simulate_graph_process(const MassVector& x, std::span<const double> query_times,
                                                        Stream& rng);

/// Same process, reporting vertex-count partitions rather than masses.
std::vector<Partition> simulate_graph_partitions(const MassVector& x, std::span<const double> query_times,
                                                 Stream& rng);

struct ExactComponentLaw {
    int n = 0;
    double p = 0.0;
    PartitionPmf pmf;
};

/// Exact law of the component partition of ER(n, p), n <= 8, through the
/// connected-graph recursion
///   P_conn(k) = 1 - sum_{j<k} C(k-1, j-1) P_conn(j) (1-p)^{j (k-j)}
/// and counting the set partitions of each type.
ExactComponentLaw exact_component_distribution(int n, double p);

/// Same law by iterating over all 2^{n(n-1)/2} graphs; n <= 7. The
/// independent cross-check of exact_component_distribution.
ExactComponentLaw enumerate_component_distribution(int n, double p);

/// One draw of the walk route: n i.i.d. Exponential(1) variables, masses 1/n,
/// time parameter c n; returns n times the excursion lengths as a partition.
/// Throws std::logic_error when an excursion mass is not an integer multiple
/// of 1/n (to 1e-9), which can only come from a decomposition bug.
Partition marginal_sizes_via_walk(int n, double c, Stream& rng);

/// Total variation distance (1/2) sum |p - q| over the union of supports.
double tv_distance(const PartitionPmf& a, const PartitionPmf& b);

/// Every partition of n, each non-increasing, in lexicographically
/// decreasing order.
std::vector<Partition> integer_partitions(int n);

}  // namespace sbfw::oracle
