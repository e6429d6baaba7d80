#include "sbfw/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "sbfw/analytic.hpp"
#include "sbfw/graph_oracle.hpp"
#include "sbfw/parallel.hpp"
#include "sbfw/random.hpp"
#include "sbfw/stats.hpp"
#include "sbfw/walks.hpp"

namespace sbfw::experiments {

using nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point since) {
    return std::chrono::duration<double, std::milli>(Clock::now() - since).count();
}

// Short, stable label for a grid value, e.g. "2" or "0.582812".
std::string label(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

std::string describe_band(const char* what, double k) {
    std::ostringstream os;
    os << "|observed - target| <= " << k << " " << what;
    return os.str();
}

Check band_check(std::string name, std::string rule, double observed, double target, double band) {
    return {std::move(name), std::move(rule), observed, target, band, std::abs(observed - target) <= band};
}

Check relative_check(std::string name, double observed, double target, double rel) {
    std::ostringstream rule;
    rule << "|observed - target| <= " << rel << " * |target|";
    return band_check(std::move(name), rule.str(), observed, target, rel * std::abs(target));
}

Check min_check(std::string name, std::string rule, double observed, double threshold) {
    return {std::move(name), std::move(rule), observed, threshold, 0.0, observed > threshold};
}

std::size_t effective_batches(std::size_t reps, std::size_t wanted) {
    const std::size_t b = std::min(wanted, reps / 2);
    if (b < 2) throw std::invalid_argument("too few replications for batch-means standard errors");
    return b;
}

void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
}

json to_json(const Check& c) {
    return {{"name", c.name}, {"rule", c.rule}, {"observed", c.observed},
            {"target", c.target}, {"band", c.band}, {"passed", c.passed}};
}

// Column j of a row-major reps x m table.
std::vector<double> column(const std::vector<double>& table, std::size_t m, std::size_t j) {
    const std::size_t reps = table.size() / m;
    std::vector<double> out(reps);
    for (std::size_t r = 0; r < reps; ++r) out[r] = table[r * m + j];
    return out;
}

// Means, variances and the covariance matrix of a reps x m table, each with
// its batch standard error.
struct Moments {
    std::vector<double> mean, mean_se, var, var_se;
    std::vector<std::vector<double>> cov, cov_se;
};

Moments moments(const std::vector<double>& table, std::size_t m, std::size_t batches) {
    Moments out;
    std::vector<std::vector<double>> cols(m);
    for (std::size_t j = 0; j < m; ++j) cols[j] = column(table, m, j);
    const auto mean_fn = [](std::span<const double> x) { return stats::mean(x); };
    const auto var_fn = [](std::span<const double> x) { return stats::variance(x); };
    out.cov.assign(m, std::vector<double>(m));
    out.cov_se.assign(m, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        out.mean.push_back(stats::mean(cols[j]));
        out.mean_se.push_back(stats::batch_se(cols[j], batches, mean_fn));
        out.var.push_back(stats::variance(cols[j]));
        out.var_se.push_back(stats::batch_se(cols[j], batches, var_fn));
        for (std::size_t k = 0; k < m; ++k) {
            out.cov[j][k] = stats::covariance(cols[j], cols[k]);
            out.cov_se[j][k] = stats::batch_se_covariance(cols[j], cols[k], batches);
        }
    }
    return out;
}

json moments_json(const Moments& mo) {
    return {{"mean", mo.mean}, {"mean_se", mo.mean_se}, {"variance", mo.var}, {"variance_se", mo.var_se},
            {"covariance", mo.cov}, {"covariance_se", mo.cov_se}};
}

json ks_json(const stats::KsResult& r) {
    return {{"statistic", r.statistic}, {"p_value", r.p_value}};
}

}  // namespace

double RegimeGrid::eps() const {
    return std::pow(static_cast<double>(n), -eps_exponent);
}

std::vector<std::string> RegimeGrid::validate() const {
    require(n > 0, "regime grid: n must be positive");
    require(!grid.empty(), "regime grid: grid must not be empty");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        require(std::isfinite(grid[i]), "regime grid: grid values must be finite");
        require(i == 0 || grid[i] > grid[i - 1], "regime grid: grid must be strictly increasing");
    }
    std::vector<std::string> warnings;
    if (kind == Regime::super_critical) {
        require(grid.front() > 1.0, "regime grid: super-critical grid must lie in (1, inf)");
        return warnings;
    }
    require(grid.front() > 0.0, "regime grid: barely super-critical grid must lie in (0, inf)");
    require(eps_exponent > 0.0 && eps_exponent < 1.0 / 3.0, "regime grid: eps exponent must lie in (0, 1/3)");
    const double scale = std::pow(static_cast<double>(n), 1.0 - 3.0 * eps_exponent);
    if (scale < 50.0) {
        std::ostringstream os;
        os << "n^(1-3a) = " << scale << " < 50; barely super-critical asymptotics are unreliable at this size";
        warnings.push_back(os.str());
    }
    return warnings;
}

bool ExperimentReport::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.passed; });
}

const Check* ExperimentReport::find_check(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

json ExperimentReport::to_json(bool include_timing) const {
    json checks_json = json::array();
    for (const auto& c : checks) checks_json.push_back(experiments::to_json(c));
    json out = {{"experiment", experiment},
                {"parameters", parameters},
                {"seed", seed},
                {"reps", reps},
                {"statistics", statistics},
                {"targets", targets},
                {"pass", checks_json},
                {"all_passed", passed()},
                {"warnings", warnings}};
    if (include_timing) out["wall_clock_ms"] = wall_clock_ms;
    return out;
}

void write_raw_csv(std::ostream& os, const ExperimentReport& report) {
    os << "rep_index,grid_point,value\n";
    char buf[96];
    for (const auto& r : report.raw) {
        std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", r.rep_index, r.grid_point, r.value);
        os << buf;
    }
}

ExperimentReport run_supercrit_fluctuations(const RegimeGrid& grid, std::size_t reps, std::uint64_t seed,
                                            const RunOptions& opts) {
    const auto started = Clock::now();
    if (grid.kind != Regime::super_critical)
        throw std::invalid_argument("run_supercrit_fluctuations: grid is not super-critical");
    require(reps >= 100, "run_supercrit_fluctuations: reps must be at least 100");
    ExperimentReport report;
    report.warnings = grid.validate();
    const std::size_t batches = effective_batches(reps, opts.batches);

    const std::size_t n = grid.n;
    const std::size_t m = grid.grid.size();
    const double c0 = grid.grid.front();
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> rho_c(m);
    for (std::size_t j = 0; j < m; ++j) rho_c[j] = analytic::rho(grid.grid[j]);

    std::vector<double> y(reps * m);
    std::vector<double> second(reps * m);
    std::vector<std::uint8_t> monotone(reps);

    parallel_for(reps, opts.workers, [&](std::size_t r) {
        Stream rng = Stream::derive(seed, StreamDomain::supercrit, r);
        auto times = draw_sorted_exponentials(n, rng);
        for (double& v : times) v /= c0;
        const WalkPath base = build_uniform_walk(times, 1.0 / static_cast<double>(n));
        bool mono = true;
        double prev = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            TopTwo top;
            if (j == 0) {
                scan_excursions(base, top);
            } else {
                scan_excursions(rescale_time(base, grid.grid[j] / c0), top);
            }
            const double largest = top.first()->length;
            y[r * m + j] = root_n * (largest - rho_c[j]);
            second[r * m + j] = top.second() ? top.second()->length : 0.0;
            if (j > 0 && largest < prev) mono = false;
            prev = largest;
        }
        monotone[r] = mono ? 1 : 0;
    });

    const Moments mo = moments(y, m, batches);
    std::size_t mono_count = 0;
    std::size_t small_second = 0;
    for (std::size_t r = 0; r < reps; ++r) {
        mono_count += monotone[r];
        double sup = 0.0;
        for (std::size_t j = 0; j < m; ++j) sup = std::max(sup, second[r * m + j]);
        if (sup < 0.01) ++small_second;
    }
    std::vector<double> second_mean(m);
    for (std::size_t j = 0; j < m; ++j) second_mean[j] = stats::mean(column(second, m, j));
    const double mono_fraction = static_cast<double>(mono_count) / static_cast<double>(reps);
    const double small_fraction = static_cast<double>(small_second) / static_cast<double>(reps);

    std::vector<double> target_var(m);
    std::vector<std::vector<double>> target_cov(m, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        target_var[j] = analytic::sigma2(grid.grid[j]);
        for (std::size_t k = 0; k < m; ++k) target_cov[j][k] = analytic::cov_supercrit_limit(grid.grid[j], grid.grid[k]);
    }

    report.experiment = "supercrit";
    report.parameters = {{"n", n}, {"c_grid", grid.grid}, {"batches", batches}};
    report.seed = seed;
    report.reps = reps;
    report.statistics = moments_json(mo);
    report.statistics["grid"] = grid.grid;
    report.statistics["second_largest_mean"] = second_mean;
    report.statistics["monotone_fraction"] = mono_fraction;
    report.statistics["sup_second_largest_below_0_01_fraction"] = small_fraction;
    report.targets = {{"mean", std::vector<double>(m, 0.0)}, {"variance", target_var}, {"covariance", target_cov},
                      {"rho", rho_c}};

    const std::string se_rule = describe_band("batch SE", 3.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::string c = label(grid.grid[j]);
        report.checks.push_back(band_check("mean[c=" + c + "]", se_rule, mo.mean[j], 0.0, 3.0 * mo.mean_se[j]));
        report.checks.push_back(
            band_check("variance[c=" + c + "]", se_rule, mo.var[j], target_var[j], 3.0 * mo.var_se[j]));
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
            report.checks.push_back(band_check("covariance[c=" + label(grid.grid[j]) + ",c=" + label(grid.grid[k]) + "]",
                                               se_rule, mo.cov[j][k], target_cov[j][k], 3.0 * mo.cov_se[j][k]));
    report.checks.push_back(band_check("monotonicity", "fraction of replications with L(c) non-decreasing == 1",
                                       mono_fraction, 1.0, 0.0));
    report.checks.push_back({"second_largest", "fraction with sup_c second-largest/n < 0.01 >= 0.99", small_fraction,
                             0.99, 0.0, small_fraction >= 0.99});

    if (opts.keep_raw)
        for (std::size_t r = 0; r < reps; ++r)
            for (std::size_t j = 0; j < m; ++j) report.raw.push_back({r, grid.grid[j], y[r * m + j]});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

ExperimentReport run_bsc_fluctuations(const RegimeGrid& grid, std::size_t reps, std::uint64_t seed,
                                      const RunOptions& opts) {
    const auto started = Clock::now();
    if (grid.kind != Regime::barely_super_critical)
        throw std::invalid_argument("run_bsc_fluctuations: grid is not barely super-critical");
    require(reps >= 2, "run_bsc_fluctuations: reps must be at least 2");
    ExperimentReport report;
    report.warnings = grid.validate();
    const std::size_t batches = effective_batches(reps, opts.batches);

    const std::size_t n = grid.n;
    const std::size_t m = grid.grid.size();
    const double eps = grid.eps();
    const double nd = static_cast<double>(n);
    const double t0 = grid.grid.front();
    const double scale = std::sqrt(nd * eps * eps * eps);
    std::vector<double> centre(m);
    for (std::size_t j = 0; j < m; ++j) centre[j] = analytic::rho_n(grid.grid[j], eps) / eps;

    std::vector<double> w(reps * m);
    std::vector<double> largest(reps * m);
    std::vector<double> second(reps * m);

    parallel_for(reps, opts.workers, [&](std::size_t r) {
        Stream rng = Stream::derive(seed, StreamDomain::bsc, r);
        auto times = draw_sorted_exponentials(n, rng);
        const double base_rate = eps * (1.0 + t0 * eps);
        for (double& v : times) v /= base_rate;
        const WalkPath base = build_uniform_walk(times, 1.0 / (nd * eps));
        for (std::size_t j = 0; j < m; ++j) {
            TopTwo top;
            if (j == 0) {
                scan_excursions(base, top);
            } else {
                scan_excursions(rescale_time(base, (1.0 + grid.grid[j] * eps) / (1.0 + t0 * eps)), top);
            }
            largest[r * m + j] = top.first()->length;
            second[r * m + j] = top.second() ? top.second()->length : 0.0;
            w[r * m + j] = scale * (largest[r * m + j] - centre[j]);
        }
    });

    const Moments mo = moments(w, m, batches);
    std::vector<double> concentration(m), centred_ratio(m), second_norm(m);
    for (std::size_t j = 0; j < m; ++j) {
        const double t = grid.grid[j];
        const auto lz = column(largest, m, j);
        const auto l2 = column(second, m, j);
        concentration[j] = stats::mean(lz) / (2.0 * t);
        centred_ratio[j] = stats::mean(lz) / centre[j];
        const double norm = t * t * eps * eps / (2.0 * std::log(nd * t * t * t * eps * eps * eps));
        second_norm[j] = norm * stats::mean(l2) * nd * eps;
    }

    std::vector<double> target_var(m);
    std::vector<std::vector<double>> target_cov(m, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j) {
        target_var[j] = analytic::cov_bsc_limit(grid.grid[j], grid.grid[j]);
        for (std::size_t k = 0; k < m; ++k) target_cov[j][k] = analytic::cov_bsc_limit(grid.grid[j], grid.grid[k]);
    }

    report.experiment = "bsc";
    report.parameters = {{"n", n}, {"t_grid", grid.grid}, {"eps_exponent", grid.eps_exponent}, {"eps", eps},
                         {"n_eps_cubed", nd * eps * eps * eps}, {"batches", batches}};
    report.seed = seed;
    report.reps = reps;
    report.statistics = moments_json(mo);
    report.statistics["grid"] = grid.grid;
    report.statistics["concentration_mean"] = concentration;
    report.statistics["largest_over_finite_n_centre"] = centred_ratio;
    report.statistics["second_largest_normalized_mean"] = second_norm;
    report.targets = {{"mean", std::vector<double>(m, 0.0)}, {"variance", target_var}, {"covariance", target_cov},
                      {"concentration", 1.0}, {"second_largest_normalized", 1.0}, {"centre", centre}};

    for (std::size_t j = 0; j < m; ++j) {
        const std::string t = label(grid.grid[j]);
        report.checks.push_back(relative_check("variance[t=" + t + "]", mo.var[j], target_var[j], 0.15));
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
            report.checks.push_back(relative_check("covariance[t=" + label(grid.grid[j]) + ",t=" + label(grid.grid[k]) + "]",
                                                   mo.cov[j][k], target_cov[j][k], 0.20));
    for (std::size_t j = 0; j < m; ++j)
        report.checks.push_back(relative_check("concentration[t=" + label(grid.grid[j]) + "]", concentration[j], 1.0, 0.05));
    for (std::size_t j = 0; j < m; ++j)
        report.checks.push_back(
            relative_check("second_largest[t=" + label(grid.grid[j]) + "]", second_norm[j], 1.0, 0.30));

    if (opts.keep_raw)
        for (std::size_t r = 0; r < reps; ++r)
            for (std::size_t j = 0; j < m; ++j) report.raw.push_back({r, grid.grid[j], w[r * m + j]});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

ExperimentReport run_donsker_marginal(std::size_t n, double c, const std::vector<double>& s_points, std::size_t reps,
                                      std::uint64_t seed, const RunOptions& opts) {
    const auto started = Clock::now();
    require(n > 0, "run_donsker_marginal: n must be positive");
    require(c > 1.0, "run_donsker_marginal: c must exceed 1");
    require(!s_points.empty(), "run_donsker_marginal: no s points");
    for (double s : s_points) require(s > 0.0 && std::isfinite(s), "run_donsker_marginal: s points must be positive");
    require(reps >= 2, "run_donsker_marginal: reps must be at least 2");
    const std::size_t batches = effective_batches(reps, opts.batches);

    const std::size_t m = s_points.size();
    const double root_n = std::sqrt(static_cast<double>(n));
    std::vector<double> phi_s(m), f_s(m);
    for (std::size_t j = 0; j < m; ++j) {
        phi_s[j] = analytic::phi(c, s_points[j]);
        f_s[j] = analytic::big_f(c, s_points[j]);
    }

    std::vector<double> d(reps * m);
    parallel_for(reps, opts.workers, [&](std::size_t r) {
        Stream rng = Stream::derive(seed, StreamDomain::donsker, r);
        auto times = draw_sorted_exponentials(n, rng);
        for (double& v : times) v /= c;
        const WalkPath walk = build_uniform_walk(times, 1.0 / static_cast<double>(n));
        for (std::size_t j = 0; j < m; ++j) d[r * m + j] = root_n * (evaluate(walk, s_points[j]) - phi_s[j]);
    });

    const Moments mo = moments(d, m, batches);
    std::vector<std::vector<double>> target_cov(m, std::vector<double>(m));
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = 0; k < m; ++k) target_cov[j][k] = std::min(f_s[j], f_s[k]) - f_s[j] * f_s[k];

    ExperimentReport report;
    report.experiment = "donsker";
    report.parameters = {{"n", n}, {"c", c}, {"s_points", s_points}, {"batches", batches}};
    report.seed = seed;
    report.reps = reps;
    report.statistics = moments_json(mo);
    report.statistics["grid"] = s_points;
    report.targets = {{"mean", std::vector<double>(m, 0.0)}, {"covariance", target_cov}, {"F", f_s}};

    json ks = json::array();
    const std::string se_rule = describe_band("batch SE", 3.0);
    for (std::size_t j = 0; j < m; ++j) {
        const std::string s = label(s_points[j]);
        const double sd = std::sqrt(target_cov[j][j]);
        const auto res = stats::ks_test(column(d, m, j), [sd](double x) { return stats::normal_cdf(x, sd); });
        ks.push_back(ks_json(res));
        report.checks.push_back(min_check("ks[s=" + s + "]", "KS p-value > 0.01", res.p_value, 0.01));
        report.checks.push_back(
            band_check("variance[s=" + s + "]", se_rule, mo.var[j], target_cov[j][j], 3.0 * mo.var_se[j]));
    }
    for (std::size_t j = 0; j < m; ++j)
        for (std::size_t k = j + 1; k < m; ++k)
            report.checks.push_back(band_check("covariance[s=" + label(s_points[j]) + ",s=" + label(s_points[k]) + "]",
                                               se_rule, mo.cov[j][k], target_cov[j][k], 3.0 * mo.cov_se[j][k]));
    report.statistics["ks"] = ks;

    if (opts.keep_raw)
        for (std::size_t r = 0; r < reps; ++r)
            for (std::size_t j = 0; j < m; ++j) report.raw.push_back({r, s_points[j], d[r * m + j]});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

ExperimentReport run_doob_meyer_check(double q, double s, std::size_t samples, std::uint64_t seed,
                                      const RunOptions& opts) {
    const auto started = Clock::now();
    require(q > 0.0 && std::isfinite(q), "run_doob_meyer_check: q must be positive");
    require(s > 0.0 && std::isfinite(s), "run_doob_meyer_check: s must be positive");
    require(samples >= 10000, "run_doob_meyer_check: need at least 10^4 samples");
    const std::size_t batches = effective_batches(samples, opts.batches);

    // Blocks give each worker a contiguous stretch drawn from its own stream.
    constexpr std::size_t block = 1 << 16;
    const std::size_t blocks = (samples + block - 1) / block;
    std::vector<double> a(samples), mart(samples), qv_gap(samples);
    parallel_for(blocks, opts.workers, [&](std::size_t b) {
        Stream rng = Stream::derive(seed, StreamDomain::doob_meyer, b);
        const std::size_t end = std::min(samples, (b + 1) * block);
        for (std::size_t i = b * block; i < end; ++i) {
            const double xi = rng.exponential() / q;
            const double compensator = q * std::min(s, xi);
            a[i] = q * std::max(s - xi, 0.0);
            mart[i] = (xi <= s ? 1.0 : 0.0) - compensator;
            qv_gap[i] = mart[i] * mart[i] - compensator;
        }
    });

    const auto mean_fn = [](std::span<const double> x) { return stats::mean(x); };
    const auto var_fn = [](std::span<const double> x) { return stats::variance(x); };
    const auto target = analytic::doob_meyer_moments(q, s);
    const double mean_a = stats::mean(a);
    const double var_a = stats::variance(a);
    const double mean_m = stats::mean(mart);
    const double mean_gap = stats::mean(qv_gap);
    const double se_mean_a = stats::batch_se(a, batches, mean_fn);
    const double se_var_a = stats::batch_se(a, batches, var_fn);
    const double se_mean_m = stats::batch_se(mart, batches, mean_fn);
    const double se_gap = stats::batch_se(qv_gap, batches, mean_fn);

    ExperimentReport report;
    report.experiment = "doobmeyer";
    report.parameters = {{"q", q}, {"s", s}, {"samples", samples}, {"batches", batches}, {"block_size", block}};
    report.seed = seed;
    report.reps = samples;
    report.statistics = {{"mean_A", mean_a},         {"mean_A_se", se_mean_a},  {"var_A", var_a},
                         {"var_A_se", se_var_a},     {"mean_M", mean_m},        {"mean_M_se", se_mean_m},
                         {"mean_M2_minus_qv", mean_gap}, {"mean_M2_minus_qv_se", se_gap}};
    report.targets = {{"mean_A", target.mean}, {"var_A", target.variance}, {"mean_M", 0.0}, {"mean_M2_minus_qv", 0.0}};
    const std::string se_rule = describe_band("batch SE", 3.0);
    report.checks.push_back(band_check("mean_A", se_rule, mean_a, target.mean, 3.0 * se_mean_a));
    report.checks.push_back(band_check("var_A", se_rule, var_a, target.variance, 3.0 * se_var_a));
    report.checks.push_back(band_check("mean_M", se_rule, mean_m, 0.0, 3.0 * se_mean_m));
    report.checks.push_back(band_check("mean_M2_minus_qv", se_rule, mean_gap, 0.0, 3.0 * se_gap));

    if (opts.keep_raw)
        for (std::size_t i = 0; i < samples; ++i) report.raw.push_back({i, s, a[i]});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

ExperimentReport run_local_time_check(std::size_t n, double t, double eps_exponent, double min_length,
                                      std::size_t reps, std::uint64_t seed, const RunOptions& opts) {
    const auto started = Clock::now();
    require(n > 0, "run_local_time_check: n must be positive");
    require(t > 0.0 && std::isfinite(t), "run_local_time_check: t must be positive");
    require(eps_exponent > 0.0 && eps_exponent < 1.0 / 3.0, "run_local_time_check: eps exponent must lie in (0, 1/3)");
    require(min_length > 0.0, "run_local_time_check: min_length must be positive");
    require(reps >= 1, "run_local_time_check: reps must be positive");

    ExperimentReport report;
    const RegimeGrid regime{Regime::barely_super_critical, n, {t}, eps_exponent};
    report.warnings = regime.validate();
    const double eps = regime.eps();
    const double q = analytic::q_n(n, t, eps);
    const double nd = static_cast<double>(n);

    std::vector<std::vector<double>> per_rep(reps);
    parallel_for(reps, opts.workers, [&](std::size_t r) {
        Stream rng = Stream::derive(seed, StreamDomain::local_time, r);
        auto times = draw_sorted_exponentials(n, rng);
        const double rate = eps * (1.0 + t * eps);
        for (double& v : times) v /= rate;
        const WalkPath walk = build_uniform_walk(times, 1.0 / (nd * eps));
        auto& out = per_rep[r];
        scan_excursions(walk, [&](const Excursion& e) {
            if (e.length >= min_length) out.push_back(q * e.length * -e.pre_start_infimum);
        });
    });

    std::vector<double> pooled;
    for (const auto& v : per_rep) pooled.insert(pooled.end(), v.begin(), v.end());
    if (pooled.size() < kMinLocalTimeSamples)
        throw std::runtime_error("run_local_time_check: only " + std::to_string(pooled.size()) +
                                 " excursions reach min_length; need " + std::to_string(kMinLocalTimeSamples));

    const auto ks = stats::ks_test(pooled, [](double u) { return u > 0.0 ? -std::expm1(-u) : 0.0; });
    const double mean_u = stats::mean(pooled);
    const double se_u = std::sqrt(stats::variance(pooled) / static_cast<double>(pooled.size()));

    report.experiment = "localtime";
    report.parameters = {{"n", n},     {"t", t},     {"eps_exponent", eps_exponent}, {"eps", eps},
                         {"q_n", q},   {"min_length", min_length}};
    report.seed = seed;
    report.reps = reps;
    report.statistics = {{"samples", pooled.size()}, {"ks", ks_json(ks)}, {"mean_u", mean_u}, {"mean_u_se", se_u}};
    report.targets = {{"law", "Exponential(1)"}, {"mean_u", 1.0}};
    report.checks.push_back(min_check("ks", "KS p-value > 0.01", ks.p_value, 0.01));

    if (opts.keep_raw)
        for (std::size_t r = 0; r < reps; ++r)
            for (double u : per_rep[r]) report.raw.push_back({r, t, u});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

ExperimentReport run_oracle_equivalence(int n, double c, std::size_t reps, std::uint64_t seed,
                                        const RunOptions& opts) {
    const auto started = Clock::now();
    if (n < 1 || n > 6) throw std::invalid_argument("run_oracle_equivalence: n must lie in [1, 6]");
    require(c > 0.0 && std::isfinite(c), "run_oracle_equivalence: c must be positive");
    require(reps >= 1, "run_oracle_equivalence: reps must be positive");

    const double p = -std::expm1(-c / n);
    const auto exact = oracle::exact_component_distribution(n, p);
    const auto partitions = oracle::integer_partitions(n);
    std::map<oracle::Partition, std::size_t> index;
    for (std::size_t i = 0; i < partitions.size(); ++i) index[partitions[i]] = i;

    std::vector<std::size_t> walk_cell(reps), graph_cell(reps);
    const MassVector masses = MassVector::uniform(static_cast<std::size_t>(n), 1.0 / n);
    const double query[] = {c * n};
    parallel_for(reps, opts.workers, [&](std::size_t r) {
        Stream walk_rng = Stream::derive(seed, StreamDomain::oracle_walk, r);
        walk_cell[r] = index.at(oracle::marginal_sizes_via_walk(n, c, walk_rng));
        Stream graph_rng = Stream::derive(seed, StreamDomain::oracle_graph, r);
        graph_cell[r] = index.at(oracle::simulate_graph_partitions(masses, query, graph_rng).front());
    });

    const std::size_t k = partitions.size();
    std::vector<double> walk_counts(k, 0.0), graph_counts(k, 0.0), probs(k, 0.0);
    for (std::size_t r = 0; r < reps; ++r) {
        walk_counts[walk_cell[r]] += 1.0;
        graph_counts[graph_cell[r]] += 1.0;
    }
    oracle::PartitionPmf walk_pmf, graph_pmf;
    json pmf_exact = json::array(), pmf_walk = json::array(), pmf_graph = json::array();
    for (std::size_t i = 0; i < k; ++i) {
        const auto it = exact.pmf.find(partitions[i]);
        probs[i] = it == exact.pmf.end() ? 0.0 : it->second;
        walk_pmf[partitions[i]] = walk_counts[i] / static_cast<double>(reps);
        graph_pmf[partitions[i]] = graph_counts[i] / static_cast<double>(reps);
        pmf_exact.push_back({{"partition", partitions[i]}, {"p", probs[i]}});
        pmf_walk.push_back({{"partition", partitions[i]}, {"p", walk_pmf[partitions[i]]}});
        pmf_graph.push_back({{"partition", partitions[i]}, {"p", graph_pmf[partitions[i]]}});
    }
    const double tv = oracle::tv_distance(walk_pmf, exact.pmf);
    const double tv_graph = oracle::tv_distance(graph_pmf, exact.pmf);
    const auto gof = stats::chi_square_gof(walk_counts, probs);
    const auto two = stats::chi_square_two_sample(walk_counts, graph_counts);

    ExperimentReport report;
    report.experiment = "oracle";
    report.parameters = {{"n", n}, {"c", c}, {"p", p}};
    report.seed = seed;
    report.reps = reps;
    report.statistics = {{"n", n},
                         {"p", p},
                         {"reps", reps},
                         {"tv_distance", tv},
                         {"chi2_stat", gof.statistic},
                         {"chi2_dof", gof.dof},
                         {"chi2_pvalue", gof.p_value},
                         {"pmf_exact", pmf_exact},
                         {"pmf_empirical", pmf_walk},
                         {"pmf_graph", pmf_graph},
                         {"tv_distance_graph", tv_graph},
                         {"two_sample_chi2_stat", two.statistic},
                         {"two_sample_chi2_pvalue", two.p_value}};
    report.targets = {{"pmf_exact", pmf_exact}};
    report.checks.push_back({"tv", "TV(walk, exact) < 0.01", tv, 0.01, 0.0, tv < 0.01});
    report.checks.push_back(min_check("chi2", "chi-square p-value > 0.01", gof.p_value, 0.01));
    report.checks.push_back(min_check("two_sample", "walk vs graph chi-square p-value > 0.01", two.p_value, 0.01));

    if (opts.keep_raw)
        for (std::size_t r = 0; r < reps; ++r) report.raw.push_back({r, c, static_cast<double>(walk_cell[r])});
    report.wall_clock_ms = elapsed_ms(started);
    return report;
}

}  // namespace sbfw::experiments
