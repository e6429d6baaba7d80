#pragma once

// Seeded, replicated Monte Carlo experiments comparing the walk encoding with
// the closed-form limits in `analytic` and the oracles in `graph_oracle`.
//
// Determinism contract: replication r of an experiment draws only from
// Stream::derive(seed, <domain>, r). Per-replication values are stored by
// index and every reduction runs over them in index order after all workers
// finish, so a report depends on (parameters, seed) only. Wall-clock time is
// kept out of the deterministic part of the report.

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "json.hpp"

namespace sbfw::experiments {

enum class Regime { super_critical, barely_super_critical };

/// Either a super-critical c-grid, or a barely super-critical t-grid with
/// eps_n = n^{-eps_exponent}.
struct RegimeGrid {
    Regime kind = Regime::super_critical;
    std::size_t n = 0;
    std::vector<double> grid;
    double eps_exponent = 0.2;

    double eps() const;
    /// Throws std::invalid_argument on a malformed grid (unsorted, c <= 1,
    /// t <= 0, exponent outside (0, 1/3), n = 0). Returns warnings, e.g. when
    /// n^{1 - 3a} < 50.
    std::vector<std::string> validate() const;
};

struct RunOptions {
    unsigned workers = 1;
    /// Batches for batch-means standard errors.
    std::size_t batches = 20;
    /// Keep per-replication values for CSV export.
    bool keep_raw = false;
};

/// One pass/fail decision. `band` is the absolute half-width that was
/// applied around `target` (or the threshold for one-sided rules).
struct Check {
    std::string name;
    std::string rule;
    double observed = 0.0;
    double target = 0.0;
    double band = 0.0;
    bool passed = false;
};

struct RawValue {
    std::size_t rep_index;
    double grid_point;
    double value;
};

struct ExperimentReport {
    std::string experiment;
    nlohmann::json parameters;
    std::uint64_t seed = 0;
    std::size_t reps = 0;
    nlohmann::json statistics;
    nlohmann::json targets;
    std::vector<Check> checks;
    std::vector<std::string> warnings;
    std::vector<RawValue> raw;
    double wall_clock_ms = 0.0;

    bool passed() const;
    const Check* find_check(const std::string& name) const;
    /// Deterministic JSON body. `include_timing` adds wall_clock_ms, which
    /// breaks byte-for-byte reproducibility.
    nlohmann::json to_json(bool include_timing = false) const;
};

/// CSV with header `rep_index,grid_point,value`.
void write_raw_csv(std::ostream& os, const ExperimentReport& report);

/// sqrt(n) (L_n(c)/n - rho(c)) along a c-grid, one xi-sample per replication
/// shared by every c through time rescaling.
ExperimentReport run_supercrit_fluctuations(const RegimeGrid& grid, std::size_t reps, std::uint64_t seed,
                                            const RunOptions& opts = {});

/// sqrt(n eps^3) (L/(n eps) - rho(1 + t eps)/eps) along a t-grid, one sample
/// per replication shared by every t through the time-change identity.
ExperimentReport run_bsc_fluctuations(const RegimeGrid& grid, std::size_t reps, std::uint64_t seed,
                                      const RunOptions& opts = {});

/// sqrt(n) (Z^{n,c}(s) - Phi^c(s)) at fixed s against the bridge marginal
/// Normal(0, F(1 - F)).
ExperimentReport run_donsker_marginal(std::size_t n, double c, const std::vector<double>& s_points, std::size_t reps,
                                      std::uint64_t seed, const RunOptions& opts = {});

/// A(s) = q (s - xi)^+ and M(s) = 1{xi <= s} - q min(s, xi) for xi ~ Exp(q).
ExperimentReport run_doob_meyer_check(double q, double s, std::size_t samples, std::uint64_t seed,
                                      const RunOptions& opts = {});

/// Pools u = q_n(t) L (-Z(T-)) over excursions of length >= min_length and
/// tests u against Exponential(1). Throws std::runtime_error when fewer than
/// kMinLocalTimeSamples excursions qualify.
ExperimentReport run_local_time_check(std::size_t n, double t, double eps_exponent, double min_length,
                                      std::size_t reps, std::uint64_t seed, const RunOptions& opts = {});

inline constexpr std::size_t kMinLocalTimeSamples = 20;

/// Walk-route partition law against the exact ER(n, 1 - e^{-c/n}) law, plus a
/// two-sample comparison with the direct graph process. n <= 6.
ExperimentReport run_oracle_equivalence(int n, double c, std::size_t reps, std::uint64_t seed,
                                        const RunOptions& opts = {});

}  // namespace sbfw::experiments
