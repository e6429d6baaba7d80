#pragma once

// Summary statistics and goodness-of-fit tests used by the experiment runners.
// Batch-means standard errors split a sample into contiguous batches in index
// order, so they are deterministic for a given sample.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace sbfw::stats {

double mean(std::span<const double> x);
/// Unbiased (n - 1) sample variance.
double variance(std::span<const double> x);
/// Unbiased sample covariance; x and y must have equal length.
double covariance(std::span<const double> x, std::span<const double> y);

/// Standard error of `statistic` by batch means: the sample is cut into
/// `batches` contiguous batches, the statistic is evaluated per batch, and
/// the SE is sd(batch values) / sqrt(batches).
double batch_se(std::span<const double> x, std::size_t batches,
                const std::function<double(std::span<const double>)>& statistic);

/// Batch SE of the sample covariance of paired samples.
double batch_se_covariance(std::span<const double> x, std::span<const double> y, std::size_t batches);

struct KsResult {
    double statistic;  // D_n = sup |F_n - F|
    double p_value;
};

/// One-sample two-sided Kolmogorov-Smirnov test against a continuous CDF.
/// p-value from the Kolmogorov distribution with Stephens' small-sample
/// correction (sqrt(n) + 0.12 + 0.11 / sqrt(n)) D.
KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf);

/// P(K > lambda) for the Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct ChiSquareResult {
    double statistic;
    int dof;
    double p_value;
};

/// Pearson goodness of fit for observed counts against cell probabilities.
/// Cells with zero probability are dropped; an observation in such a cell
/// yields an infinite statistic and p = 0.
ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities);

/// Two-sample chi-square homogeneity test on a 2 x K table of counts. Columns
/// empty in both samples are dropped.
ChiSquareResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b);

/// Upper tail of the chi-square distribution.
double chi_square_survival(double x, int dof);

double normal_cdf(double x, double sd = 1.0);

}  // namespace sbfw::stats
