#include "sbfw/graph_oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <functional>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

namespace sbfw::oracle {

CoalescentState::CoalescentState(const MassVector& x)
    : parent_(x.size()), rank_(x.size(), 0), mass_(x.masses().begin(), x.masses().end()), count_(x.size(), 1),
      components_(x.size()) {
    std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t CoalescentState::find(std::size_t v) {
    std::size_t root = v;
    while (parent_[root] != root) root = parent_[root];
    while (parent_[v] != root) {
        const std::size_t next = parent_[v];
        parent_[v] = root;
        v = next;
    }
    return root;
}

bool CoalescentState::unite(std::size_t a, std::size_t b, double time) {
    std::size_t ra = find(a);
    std::size_t rb = find(b);
    if (ra == rb) return false;
    if (!log_.empty() && time < log_.back().time) throw std::invalid_argument("CoalescentState: merge times must not decrease");
    log_.push_back({time, ra, rb});
    if (rank_[ra] < rank_[rb]) std::swap(ra, rb);
    parent_[rb] = ra;
    if (rank_[ra] == rank_[rb]) ++rank_[ra];
    mass_[ra] += mass_[rb];
    count_[ra] += count_[rb];
    --components_;
    return true;
}

std::vector<double> CoalescentState::component_masses() {
    std::vector<double> out;
    out.reserve(components_);
    for (std::size_t v = 0; v < parent_.size(); ++v)
        if (find(v) == v) out.push_back(mass_[v]);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

Partition CoalescentState::component_sizes() {
    Partition out;
    out.reserve(components_);
    for (std::size_t v = 0; v < parent_.size(); ++v)
        if (find(v) == v) out.push_back(count_[v]);
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

namespace {

struct EdgeArrival {
    double time;
    std::uint32_t i;
    std::uint32_t j;
};

// Runs the edge-clock process and calls `snapshot(state)` at every query time.
template <class Snapshot>
void run_graph_process(const MassVector& x, std::span<const double> query_times, Stream& rng, Snapshot&& snapshot) {
    const std::size_t n = x.size();
    if (n > kMaxGraphProcessVertices) throw std::invalid_argument("simulate_graph_process: n exceeds the oracle limit");
    if (!std::is_sorted(query_times.begin(), query_times.end()))
        throw std::invalid_argument("simulate_graph_process: query times must be sorted");
    for (double q : query_times)
        if (!(q >= 0.0)) throw std::invalid_argument("simulate_graph_process: query times must be non-negative");

    // Every clock is drawn; only arrivals before the last query are kept.
    const double horizon = query_times.empty() ? 0.0 : query_times.back();
    std::vector<EdgeArrival> arrivals;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double clock = rng.exponential() / (x[i] * x[j]);
            if (clock <= horizon) arrivals.push_back({clock, static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)});
        }
    }
    std::sort(arrivals.begin(), arrivals.end(), [](const EdgeArrival& a, const EdgeArrival& b) { return a.time < b.time; });

    CoalescentState state(x);
    std::size_t next = 0;
    for (double q : query_times) {
        while (next < arrivals.size() && arrivals[next].time <= q) {
            state.unite(arrivals[next].i, arrivals[next].j, arrivals[next].time);
            ++next;
        }
        snapshot(state);
    }
}

}  // namespace

std::vector<std::vector<double>> simulate_graph_process(const MassVector& x, std::span<const double> query_times,
                                                        Stream& rng) {
    std::vector<std::vector<double>> out;
    out.reserve(query_times.size());
    run_graph_process(x, query_times, rng, [&](CoalescentState& s) { out.push_back(s.component_masses()); });
    return out;
}

std::vector<Partition> simulate_graph_partitions(const MassVector& x, std::span<const double> query_times,
                                                 Stream& rng) {
    std::vector<Partition> out;
    out.reserve(query_times.size());
    run_graph_process(x, query_times, rng, [&](CoalescentState& s) { out.push_back(s.component_sizes()); });
    return out;
}

std::vector<Partition> integer_partitions(int n) {
    if (n < 0) throw std::invalid_argument("integer_partitions: n must be non-negative");
    std::vector<Partition> out;
    Partition current;
    std::function<void(int, int)> rec = [&](int remaining, int max_part) {
        if (remaining == 0) {
            out.push_back(current);
            return;
        }
        for (int part = std::min(remaining, max_part); part >= 1; --part) {
            current.push_back(part);
            rec(remaining - part, part);
            current.pop_back();
        }
    };
    rec(n, n);
    return out;
}

namespace {

void check_exact_args(int n, double p, int limit, const char* who) {
    if (n < 1 || n > limit) throw std::invalid_argument(std::string(who) + ": n out of range");
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(who) + ": p must lie in [0,1]");
}

double binomial(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

}  // namespace

ExactComponentLaw exact_component_distribution(int n, double p) {
    check_exact_args(n, p, kMaxExactVertices, "exact_component_distribution");
    const double q = 1.0 - p;

    std::vector<double> connected(n + 1, 0.0);
    connected[1] = 1.0;
    for (int k = 2; k <= n; ++k) {
        double disconnected = 0.0;
        for (int j = 1; j < k; ++j) disconnected += binomial(k - 1, j - 1) * connected[j] * std::pow(q, j * (k - j));
        connected[k] = 1.0 - disconnected;
    }

    std::vector<double> factorial(n + 1, 1.0);
    for (int i = 1; i <= n; ++i) factorial[i] = factorial[i - 1] * i;

    ExactComponentLaw law{n, p, {}};
    const int all_pairs = n * (n - 1) / 2;
    for (const auto& part : integer_partitions(n)) {
        // Number of set partitions of {1..n} with these block sizes.
        double ways = factorial[n];
        int inner_pairs = 0;
        double prob = 1.0;
        for (int b : part) {
            ways /= factorial[b];
            inner_pairs += b * (b - 1) / 2;
            prob *= connected[b];
        }
        for (std::size_t i = 0; i < part.size();) {
            std::size_t j = i;
            while (j < part.size() && part[j] == part[i]) ++j;
            ways /= factorial[j - i];
            i = j;
        }
        law.pmf[part] = ways * prob * std::pow(q, all_pairs - inner_pairs);
    }
    return law;
}

ExactComponentLaw enumerate_component_distribution(int n, double p) {
    check_exact_args(n, p, kMaxRawEnumerationVertices, "enumerate_component_distribution");
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    const int m = static_cast<int>(pairs.size());

    // Probability of a graph depends on its edge count only.
    std::vector<double> weight(m + 1);
    for (int e = 0; e <= m; ++e) weight[e] = std::pow(p, e) * std::pow(1.0 - p, m - e);

    // Graph counts per (partition, edge count); weighted once at the end.
    std::map<Partition, std::vector<std::uint64_t>> counts;
    std::vector<int> parent(n);
    const std::uint64_t graphs = std::uint64_t{1} << m;
    for (std::uint64_t mask = 0; mask < graphs; ++mask) {
        std::iota(parent.begin(), parent.end(), 0);
        auto find = [&](int v) {
            while (parent[v] != v) v = parent[v] = parent[parent[v]];
            return v;
        };
        for (int e = 0; e < m; ++e) {
            if (!(mask >> e & 1u)) continue;
            const int a = find(pairs[e].first);
            const int b = find(pairs[e].second);
            if (a != b) parent[a] = b;
        }
        std::vector<int> sizes(n, 0);
        for (int v = 0; v < n; ++v) ++sizes[find(v)];
        Partition part;
        for (int s : sizes)
            if (s > 0) part.push_back(s);
        std::sort(part.begin(), part.end(), std::greater<>());
        auto& row = counts[part];
        if (row.empty()) row.assign(m + 1, 0);
        ++row[std::popcount(mask)];
    }
    ExactComponentLaw law{n, p, {}};
    for (const auto& [part, row] : counts) {
        double prob = 0.0;
        for (int e = 0; e <= m; ++e) prob += static_cast<double>(row[e]) * weight[e];
        law.pmf[part] = prob;
    }
    return law;
}

Partition marginal_sizes_via_walk(int n, double c, Stream& rng) {
    if (n < 1) throw std::invalid_argument("marginal_sizes_via_walk: n must be positive");
    if (!(c > 0.0)) throw std::invalid_argument("marginal_sizes_via_walk: c must be positive");
    const double nd = static_cast<double>(n);
    const auto x = MassVector::uniform(static_cast<std::size_t>(n), 1.0 / nd);

    // xi_i ~ Exponential(rate 1/n) = n * Exponential(1); time parameter c n.
    std::vector<double> xi = draw_exponentials(static_cast<std::size_t>(n), rng);
    for (auto& v : xi) v *= nd;
    const WalkPath w = build_sbfw(x, xi, c * nd);

    Partition out;
    scan_excursions(w, [&](const Excursion& e) {
        const double scaled = e.length * nd;
        const double rounded = std::round(scaled);
        if (std::abs(scaled - rounded) > 1e-9 || rounded < 1.0)
            throw std::logic_error("marginal_sizes_via_walk: excursion mass is not a multiple of 1/n");
        out.push_back(static_cast<int>(rounded));
    });
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

double tv_distance(const PartitionPmf& a, const PartitionPmf& b) {
    double total = 0.0;
    for (const auto& [part, pa] : a) {
        const auto it = b.find(part);
        total += std::abs(pa - (it == b.end() ? 0.0 : it->second));
    }
    for (const auto& [part, pb] : b)
        if (!a.contains(part)) total += std::abs(pb);
    return 0.5 * total;
}

}  // namespace sbfw::oracle
