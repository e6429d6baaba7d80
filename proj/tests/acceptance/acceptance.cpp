// Acceptance suite: criteria 1-10 at pinned seeds and tolerances. Prints one
// PASS/FAIL line per criterion and exits 1 if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbfw/analytic.hpp"
#include "sbfw/experiments.hpp"
#include "sbfw/parallel.hpp"
#include "sbfw/random.hpp"
#include "sbfw/walks.hpp"

using namespace sbfw;
namespace ex = sbfw::experiments;

namespace {

struct Outcome {
    bool passed = true;
    std::string detail;

    void require(bool ok, const std::string& what) {
        if (!ok) {
            passed = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

void require_checks(Outcome& o, const ex::ExperimentReport& rep, const std::vector<std::string>& names) {
    for (const auto& name : names) {
        const ex::Check* c = rep.find_check(name);
        if (!c) {
            o.require(false, rep.experiment + ": missing check " + name);
            continue;
        }
        o.require(c->passed, rep.experiment + " " + name + " observed " + fmt(c->observed) + " target " +
                                 fmt(c->target) + " band " + fmt(c->band));
    }
}

std::vector<std::string> checks_with_prefix(const ex::ExperimentReport& rep, const std::string& prefix) {
    std::vector<std::string> out;
    for (const auto& c : rep.checks)
        if (c.name.rfind(prefix, 0) == 0) out.push_back(c.name);
    return out;
}

// Pinned configuration of each Monte Carlo criterion.
const std::vector<double> kSupercritGrid{1.5, 2.0, 3.0};
const std::vector<double> kBscGrid{0.5, 1.0, 2.0};

ex::ExperimentReport c3_run(double c, std::uint64_t seed, unsigned workers) {
    return ex::run_oracle_equivalence(5, c, 100000, seed, {workers});
}
ex::ExperimentReport c4_run(unsigned workers) {
    return ex::run_supercrit_fluctuations({ex::Regime::super_critical, 20000, {2.0}}, 2000, 42, {workers});
}
ex::ExperimentReport c5_run(unsigned workers) {
    return ex::run_supercrit_fluctuations({ex::Regime::super_critical, 20000, kSupercritGrid}, 2000, 43, {workers});
}
ex::ExperimentReport c6_run(unsigned workers) {
    return ex::run_donsker_marginal(100000, 1.5, {0.2, 0.4, analytic::rho(1.5)}, 2000, 5, {workers});
}
ex::ExperimentReport c7_run(unsigned workers) {
    return ex::run_bsc_fluctuations({ex::Regime::barely_super_critical, 1000000, kBscGrid, 0.2}, 500, 7, {workers});
}
ex::ExperimentReport c8_run(unsigned workers) { return ex::run_doob_meyer_check(1.0, 1.0, 1000000, 9, {workers}); }
ex::ExperimentReport c9_run(unsigned workers) {
    const std::size_t n = 100000;
    const double eps = std::pow(static_cast<double>(n), -0.2);
    const double min_length = 0.1 * analytic::rho_n(1.0, eps) / eps;
    return ex::run_local_time_check(n, 1.0, 0.2, min_length, 2000, 11, {workers});
}

Outcome criterion1() {
    Outcome o;
    double worst_phi = 0.0, worst_dual = 0.0;
    for (int i = 0; i < 100; ++i) {
        const double c = 1.01 + (10.0 - 1.01) * i / 99.0;
        const double r = analytic::rho(c);
        const double p = analytic::pi_conjugate(c);
        worst_phi = std::max(worst_phi, std::abs(analytic::phi(c, r)));
        worst_dual = std::max(worst_dual, std::abs(p * std::exp(-p) - c * std::exp(-c)));
    }
    o.require(worst_phi < 1e-10, "max |Phi(rho)| = " + fmt(worst_phi));
    o.require(worst_dual < 1e-12, "max conjugacy error = " + fmt(worst_dual));
    for (double q : {0.5, 1.0, 2.0}) {
        const double qs = 1e-3;
        const auto m = analytic::doob_meyer_moments(q, qs / q);
        const double rel_mean = std::abs(m.mean / (qs * qs / 2.0) - 1.0);
        const double rel_var = std::abs(m.variance / (qs * qs * qs / 3.0) - 1.0);
        o.require(rel_mean < 0.01 && rel_var < 0.01,
                  "Doob-Meyer expansion at q=" + fmt(q) + " rel " + fmt(rel_mean) + ", " + fmt(rel_var));
    }
    if (o.passed) o.detail = "max |Phi(rho)| " + fmt(worst_phi) + ", conjugacy " + fmt(worst_dual);
    return o;
}

Outcome criterion2() {
    Outcome o;
    std::size_t compared = 0;
    for (int r = 0; r < 200; ++r) {
        Stream rng = Stream::derive(1, StreamDomain::test, r);
        const std::size_t jumps = 1 + r % 20;
        std::vector<double> t(jumps), x(jumps);
        for (auto& v : t) v = 4.0 * rng.uniform_open0();
        for (auto& v : x) v = 0.01 + 0.49 * rng.uniform_open0();
        const WalkPath w = WalkPath::from_jumps(t, x);
        const std::vector<double> times(w.jump_times().begin(), w.jump_times().end());
        const std::vector<double> sizes(w.jump_sizes().begin(), w.jump_sizes().end());
        const auto es = decompose(w);
        const auto grid = test_oracle::grid_excursions(times, sizes, 1e-5);
        if (es.size() != grid.size()) {
            o.require(false, "walk " + std::to_string(r) + ": excursion count differs");
            continue;
        }
        for (std::size_t k = 0; k < es.size(); ++k) {
            const bool same = std::abs(es[k].start - grid[k].start) < 1e-9 && es[k].first_jump == grid[k].first_jump &&
                              es[k].jump_count == grid[k].jump_count &&
                              std::abs(es[k].length - grid[k].length) < 1e-12;
            o.require(same, "walk " + std::to_string(r) + " excursion " + std::to_string(k) + " differs");
            ++compared;
        }
        o.require(std::abs(es.total_length() - w.total_mass()) < 1e-12 * static_cast<double>(jumps),
                  "mass sum on walk " + std::to_string(r));
    }
    const std::size_t n = 1000000;
    Stream rng = Stream::derive(1, StreamDomain::test, 1000);
    auto times = draw_sorted_exponentials(n, rng);
    for (double& v : times) v /= 1.5;
    const WalkPath w = build_uniform_walk(times, 1.0 / static_cast<double>(n));
    const double gap = std::abs(decompose(w).total_length() - w.total_mass());
    o.require(gap < 1e-12 * static_cast<double>(n), "n=1e6 mass gap " + fmt(gap));
    if (o.passed) o.detail = std::to_string(compared) + " excursions matched; n=1e6 mass gap " + fmt(gap);
    return o;
}

Outcome criterion3(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    for (auto [c, seed] : {std::pair{1.2, std::uint64_t{1}}, std::pair{2.0, std::uint64_t{2}}}) {
        const auto rep = c3_run(c, seed, workers);
        dumps.push_back(rep.to_json().dump());
        require_checks(o, rep, {"tv", "chi2"});
        if (o.passed)
            o.detail += "c=" + fmt(c) + " tv " + fmt(rep.statistics["tv_distance"].get<double>()) + " p " +
                        fmt(rep.statistics["chi2_pvalue"].get<double>()) + "; ";
    }
    return o;
}

Outcome criterion4(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c4_run(workers);
    dumps.push_back(rep.to_json().dump());
    require_checks(o, rep, {"variance[c=2]", "mean[c=2]"});
    o.require(std::abs(rep.targets["variance"][0].get<double>() - 0.45946) < 1e-4, "sigma2(2) target");
    if (o.passed)
        o.detail = "var " + fmt(rep.statistics["variance"][0].get<double>()) + " vs " +
                   fmt(rep.targets["variance"][0].get<double>());
    return o;
}

Outcome criterion5(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c5_run(workers);
    dumps.push_back(rep.to_json().dump());
    auto names = checks_with_prefix(rep, "variance[");
    const auto cov = checks_with_prefix(rep, "covariance[");
    names.insert(names.end(), cov.begin(), cov.end());
    names.push_back("monotonicity");
    names.push_back("second_largest");
    o.require(names.size() == 2 + 3 + 3, "unexpected check count");
    require_checks(o, rep, names);
    return o;
}

Outcome criterion6(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c6_run(workers);
    dumps.push_back(rep.to_json().dump());
    const auto names = checks_with_prefix(rep, "ks[");
    o.require(names.size() == 3, "expected three KS checks");
    require_checks(o, rep, names);
    return o;
}

Outcome criterion7(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c7_run(workers);
    dumps.push_back(rep.to_json().dump());
    auto names = checks_with_prefix(rep, "variance[");
    const auto conc = checks_with_prefix(rep, "concentration[");
    names.insert(names.end(), conc.begin(), conc.end());
    names.push_back("covariance[t=0.5,t=2]");
    o.require(names.size() == 7, "unexpected check count");
    require_checks(o, rep, names);
    return o;
}

Outcome criterion8(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c8_run(workers);
    dumps.push_back(rep.to_json().dump());
    require_checks(o, rep, {"mean_A", "var_A", "mean_M"});
    return o;
}

Outcome criterion9(unsigned workers, std::vector<std::string>& dumps) {
    Outcome o;
    const auto rep = c9_run(workers);
    dumps.push_back(rep.to_json().dump());
    require_checks(o, rep, {"ks"});
    if (o.passed)
        o.detail = std::to_string(rep.statistics["samples"].get<std::size_t>()) + " excursions, p " +
                   fmt(rep.statistics["ks"]["p_value"].get<double>());
    return o;
}

}  // namespace

int main() {
    using clock = std::chrono::steady_clock;
    const unsigned workers = default_workers();
    const unsigned other_workers = workers + 2;
    std::vector<std::string> dumps, rerun;
    bool all = true;

    auto report = [&](int id, double limit_s, const std::function<Outcome()>& body) {
        const auto t0 = clock::now();
        Outcome o;
        try {
            o = body();
        } catch (const std::exception& e) {
            o.require(false, std::string("exception: ") + e.what());
        }
        const double secs = std::chrono::duration<double>(clock::now() - t0).count();
        if (limit_s > 0.0) o.require(secs < limit_s, "runtime " + fmt(secs) + " s over " + fmt(limit_s) + " s");
        all = all && o.passed;
        std::printf("criterion %d: %s (%.1f s) %s\n", id, o.passed ? "PASS" : "FAIL", secs, o.detail.c_str());
        std::fflush(stdout);
    };

    report(1, 1.0, criterion1);
    report(2, 10.0, criterion2);
    report(3, 120.0, [&] { return criterion3(workers, dumps); });
    report(4, 180.0, [&] { return criterion4(workers, dumps); });
    report(5, 300.0, [&] { return criterion5(workers, dumps); });
    report(6, 120.0, [&] { return criterion6(workers, dumps); });
    report(7, 600.0, [&] { return criterion7(workers, dumps); });
    report(8, 30.0, [&] { return criterion8(workers, dumps); });
    report(9, 300.0, [&] { return criterion9(workers, dumps); });
    report(10, 0.0, [&] {
        Outcome o;
        criterion3(other_workers, rerun);
        criterion4(other_workers, rerun);
        criterion5(other_workers, rerun);
        criterion6(other_workers, rerun);
        criterion7(other_workers, rerun);
        criterion8(other_workers, rerun);
        criterion9(other_workers, rerun);
        o.require(rerun.size() == dumps.size(), "report count differs");
        for (std::size_t i = 0; i < std::min(rerun.size(), dumps.size()); ++i)
            o.require(rerun[i] == dumps[i], "report " + std::to_string(i) + " differs");
        if (o.passed)
            o.detail = std::to_string(dumps.size()) + " reports identical with " + std::to_string(workers) + " and " +
                       std::to_string(other_workers) + " workers";
        return o;
    });

    std::printf("%s\n", all ? "ALL CRITERIA PASSED" : "SOME CRITERIA FAILED");
    return all ? 0 : 1;
}
