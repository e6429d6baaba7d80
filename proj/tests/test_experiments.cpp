#include <gtest/gtest.h>

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "sbfw/analytic.hpp"
#include "sbfw/experiments.hpp"

using namespace sbfw;
using namespace sbfw::experiments;

TEST(RegimeGrid, Validation) {
    EXPECT_THROW((RegimeGrid{Regime::super_critical, 100, {1.0, 2.0}}.validate()), std::invalid_argument);
    EXPECT_THROW((RegimeGrid{Regime::super_critical, 100, {2.0, 1.5}}.validate()), std::invalid_argument);
    EXPECT_THROW((RegimeGrid{Regime::super_critical, 100, {}}.validate()), std::invalid_argument);
    EXPECT_THROW((RegimeGrid{Regime::super_critical, 0, {2.0}}.validate()), std::invalid_argument);
    EXPECT_TRUE((RegimeGrid{Regime::super_critical, 100, {1.5, 2.0}}.validate().empty()));
    EXPECT_THROW((RegimeGrid{Regime::barely_super_critical, 1000, {0.0, 1.0}}.validate()), std::invalid_argument);
    EXPECT_THROW((RegimeGrid{Regime::barely_super_critical, 1000, {1.0}, 0.4}.validate()), std::invalid_argument);
    EXPECT_THROW((RegimeGrid{Regime::barely_super_critical, 1000, {1.0}, 0.0}.validate()), std::invalid_argument);
    // 1000^(1 - 0.6) = 15.8 < 50.
    EXPECT_EQ((RegimeGrid{Regime::barely_super_critical, 1000, {1.0}, 0.2}.validate().size()), 1u);
    EXPECT_TRUE((RegimeGrid{Regime::barely_super_critical, 1000000, {1.0}, 0.2}.validate().empty()));
    EXPECT_NEAR((RegimeGrid{Regime::barely_super_critical, 1000000, {1.0}, 0.2}.eps()), 0.0630957344, 1e-9);
}

TEST(Supercrit, RegimeAndRepGuards) {
    const RegimeGrid bsc{Regime::barely_super_critical, 1000, {1.0}};
    EXPECT_THROW(run_supercrit_fluctuations(bsc, 200, 1), std::invalid_argument);
    const RegimeGrid sc{Regime::super_critical, 1000, {2.0}};
    EXPECT_THROW(run_supercrit_fluctuations(sc, 99, 1), std::invalid_argument);
    EXPECT_THROW(run_bsc_fluctuations(sc, 100, 1), std::invalid_argument);
}

TEST(Supercrit, SmallRunReportsAndIsMonotone) {
    const RegimeGrid g{Regime::super_critical, 2000, {1.5, 2.0, 3.0}};
    const auto rep = run_supercrit_fluctuations(g, 200, 17);
    EXPECT_EQ(rep.reps, 200u);
    EXPECT_EQ(rep.statistics["monotone_fraction"].get<double>(), 1.0);
    ASSERT_NE(rep.find_check("monotonicity"), nullptr);
    EXPECT_TRUE(rep.find_check("monotonicity")->passed);
    EXPECT_NEAR(rep.targets["variance"][1].get<double>(), analytic::sigma2(2.0), 1e-15);
    EXPECT_EQ(rep.statistics["covariance"].size(), 3u);
    const auto j = rep.to_json();
    EXPECT_FALSE(j.contains("wall_clock_ms"));
    EXPECT_TRUE(rep.to_json(true).contains("wall_clock_ms"));
    EXPECT_TRUE(j["pass"].is_array());
}

TEST(Determinism, ReportIndependentOfWorkerCount) {
    const RegimeGrid g{Regime::super_critical, 3000, {1.5, 2.5}};
    RunOptions one, four;
    four.workers = 4;
    const auto a = run_supercrit_fluctuations(g, 120, 5, one).to_json().dump();
    const auto b = run_supercrit_fluctuations(g, 120, 5, four).to_json().dump();
    EXPECT_EQ(a, b);
    const RegimeGrid t{Regime::barely_super_critical, 20000, {0.5, 1.0}, 0.2};
    EXPECT_EQ(run_bsc_fluctuations(t, 60, 5, one).to_json().dump(), run_bsc_fluctuations(t, 60, 5, four).to_json().dump());
    EXPECT_EQ(run_doob_meyer_check(1.0, 1.0, 200000, 5, one).to_json().dump(),
              run_doob_meyer_check(1.0, 1.0, 200000, 5, four).to_json().dump());
    EXPECT_EQ(run_oracle_equivalence(4, 1.2, 5000, 5, one).to_json().dump(),
              run_oracle_equivalence(4, 1.2, 5000, 5, four).to_json().dump());
}

TEST(Determinism, DifferentSeedsDiffer) {
    const RegimeGrid g{Regime::super_critical, 1000, {2.0}};
    EXPECT_NE(run_supercrit_fluctuations(g, 100, 1).to_json().dump(),
              run_supercrit_fluctuations(g, 100, 2).to_json().dump());
}

TEST(Bsc, SmallRunHasAllStatistics) {
    const RegimeGrid g{Regime::barely_super_critical, 50000, {0.5, 1.0, 2.0}, 0.2};
    const auto rep = run_bsc_fluctuations(g, 100, 3);
    for (const char* key : {"variance", "covariance", "concentration_mean", "second_largest_normalized_mean",
                            "largest_over_finite_n_centre"})
        EXPECT_TRUE(rep.statistics.contains(key)) << key;
    EXPECT_NE(rep.find_check("covariance[t=0.5,t=2]"), nullptr);
    EXPECT_NEAR(rep.targets["covariance"][0][2].get<double>(), 1.0, 1e-15);
    EXPECT_TRUE(rep.warnings.empty());
}

TEST(Donsker, TinySHasTinyVariance) {
    const auto rep = run_donsker_marginal(100000, 1.5, {1e-3}, 400, 4);
    EXPECT_LT(rep.statistics["variance"][0].get<double>(), 2e-3);
}

TEST(Donsker, VarianceTargetAtRhoIsRhoOneMinusRho) {
    const double r = analytic::rho(1.5);
    const auto rep = run_donsker_marginal(20000, 1.5, {r}, 400, 4);
    EXPECT_NEAR(rep.targets["covariance"][0][0].get<double>(), r * (1.0 - r), 1e-10);
    EXPECT_THROW(run_donsker_marginal(100, 1.5, {0.0}, 100, 1), std::invalid_argument);
}

TEST(DoobMeyer, PassesAndGuards) {
    const auto rep = run_doob_meyer_check(1.0, 1.0, 200000, 9);
    EXPECT_TRUE(rep.passed());
    EXPECT_NEAR(rep.targets["mean_A"].get<double>(), 0.367879, 1e-6);
    EXPECT_THROW(run_doob_meyer_check(1.0, 1.0, 9999, 9), std::invalid_argument);
}

TEST(LocalTime, SingleVertexIsExactlyExponential) {
    const auto rep = run_local_time_check(1, 1.0, 0.2, 0.5, 4000, 12);
    EXPECT_EQ(rep.statistics["samples"].get<std::size_t>(), 4000u);
    EXPECT_GT(rep.statistics["ks"]["p_value"].get<double>(), 0.01);
}

TEST(LocalTime, SmallWindowPasses) {
    const auto rep = run_local_time_check(20000, 1.0, 0.2, 0.05, 300, 13);
    EXPECT_GE(rep.statistics["samples"].get<std::size_t>(), 300u);
    EXPECT_GT(rep.statistics["ks"]["p_value"].get<double>(), 0.01);
}

TEST(LocalTime, InsufficientExcursionsThrow) {
    EXPECT_THROW(run_local_time_check(1000, 1.0, 0.2, 1e6, 10, 1), std::runtime_error);
    EXPECT_THROW(run_local_time_check(1000, 1.0, 0.4, 0.1, 10, 1), std::invalid_argument);
}

TEST(Oracle, SingleVertexHasZeroTv) {
    const auto rep = run_oracle_equivalence(1, 1.5, 1000, 1);
    EXPECT_EQ(rep.statistics["tv_distance"].get<double>(), 0.0);
    EXPECT_TRUE(rep.passed());
}

TEST(Oracle, TwoVerticesSingleEdge) {
    const double c = 1.7;
    const std::size_t reps = 50000;
    const auto rep = run_oracle_equivalence(2, c, reps, 2);
    double p2 = -1.0;
    for (const auto& cell : rep.statistics["pmf_empirical"])
        if (cell["partition"] == nlohmann::json::array({2})) p2 = cell["p"].get<double>();
    const double p = -std::expm1(-c / 2);
    EXPECT_NEAR(p2, p, 3.0 * std::sqrt(p * (1 - p) / reps));
}

TEST(Oracle, RangeGuard) {
    EXPECT_THROW(run_oracle_equivalence(7, 1.0, 10, 1), std::invalid_argument);
    EXPECT_THROW(run_oracle_equivalence(0, 1.0, 10, 1), std::invalid_argument);
}

TEST(Oracle, JsonKeys) {
    const auto rep = run_oracle_equivalence(3, 1.2, 2000, 3);
    for (const char* key : {"n", "p", "reps", "tv_distance", "chi2_stat", "chi2_pvalue", "pmf_exact", "pmf_empirical"})
        EXPECT_TRUE(rep.statistics.contains(key)) << key;
}

TEST(RawCsv, Format) {
    const RegimeGrid g{Regime::super_critical, 500, {2.0, 3.0}};
    RunOptions o;
    o.keep_raw = true;
    const auto rep = run_supercrit_fluctuations(g, 100, 1, o);
    EXPECT_EQ(rep.raw.size(), 200u);
    std::ostringstream os;
    write_raw_csv(os, rep);
    EXPECT_EQ(os.str().rfind("rep_index,grid_point,value\n0,2,", 0), 0u);
}
