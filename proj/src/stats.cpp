#include "sbfw/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <boost/math/special_functions/gamma.hpp>

namespace sbfw::stats {

double mean(std::span<const double> x) {
    if (x.empty()) throw std::invalid_argument("mean: empty sample");
    double s = 0.0;
    for (double v : x) s += v;
    return s / static_cast<double>(x.size());
}

double variance(std::span<const double> x) {
    return covariance(x, x);
}

double covariance(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw std::invalid_argument("covariance: length mismatch");
    if (x.size() < 2) throw std::invalid_argument("covariance: need at least two observations");
    const double mx = mean(x);
    const double my = mean(y);
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += (x[i] - mx) * (y[i] - my);
    return s / static_cast<double>(x.size() - 1);
}

double batch_se(std::span<const double> x, std::size_t batches,
                const std::function<double(std::span<const double>)>& statistic) {
    if (batches < 2) throw std::invalid_argument("batch_se: need at least two batches");
    const std::size_t size = x.size() / batches;
    if (size < 2) throw std::invalid_argument("batch_se: batches too small");
    std::vector<double> values(batches);
    for (std::size_t b = 0; b < batches; ++b) values[b] = statistic(x.subspan(b * size, size));
    return std::sqrt(variance(values) / static_cast<double>(batches));
}

double batch_se_covariance(std::span<const double> x, std::span<const double> y, std::size_t batches) {
    if (x.size() != y.size()) throw std::invalid_argument("batch_se_covariance: length mismatch");
    if (batches < 2) throw std::invalid_argument("batch_se_covariance: need at least two batches");
    const std::size_t size = x.size() / batches;
    if (size < 2) throw std::invalid_argument("batch_se_covariance: batches too small");
    std::vector<double> values(batches);
    for (std::size_t b = 0; b < batches; ++b) values[b] = covariance(x.subspan(b * size, size), y.subspan(b * size, size));
    return std::sqrt(variance(values) / static_cast<double>(batches));
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 1.18) {
        // Small-lambda series of the CDF.
        const double k = std::sqrt(2.0 * std::numbers::pi) / lambda;
        const double a = std::numbers::pi * std::numbers::pi / (8.0 * lambda * lambda);
        double sum = 0.0;
        for (int j = 1; j <= 20; ++j) {
            const double odd = 2.0 * j - 1.0;
            sum += std::exp(-odd * odd * a);
        }
        return std::clamp(1.0 - k * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int j = 1; j <= 100; ++j) {
        const double term = std::exp(-2.0 * j * j * lambda * lambda);
        sum += (j % 2 == 1 ? term : -term);
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) throw std::invalid_argument("ks_test: empty sample");
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    const double rn = std::sqrt(n);
    return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d)};
}

double chi_square_survival(double x, int dof) {
    if (dof <= 0) return 1.0;
    if (!(x >= 0.0)) return 1.0;
    if (std::isinf(x)) return 0.0;
    return boost::math::gamma_q(0.5 * dof, 0.5 * x);
}

ChiSquareResult chi_square_gof(std::span<const double> observed, std::span<const double> probabilities) {
    if (observed.size() != probabilities.size()) throw std::invalid_argument("chi_square_gof: length mismatch");
    double total = 0.0;
    for (double o : observed) total += o;
    double stat = 0.0;
    int cells = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        if (probabilities[i] <= 0.0) {
            if (observed[i] > 0.0) return {std::numeric_limits<double>::infinity(), cells, 0.0};
            continue;
        }
        const double e = total * probabilities[i];
        stat += (observed[i] - e) * (observed[i] - e) / e;
        ++cells;
    }
    const int dof = std::max(cells - 1, 0);
    return {stat, dof, chi_square_survival(stat, dof)};
}

ChiSquareResult chi_square_two_sample(std::span<const double> counts_a, std::span<const double> counts_b) {
    if (counts_a.size() != counts_b.size()) throw std::invalid_argument("chi_square_two_sample: length mismatch");
    double na = 0.0, nb = 0.0;
    for (double v : counts_a) na += v;
    for (double v : counts_b) nb += v;
    const double n = na + nb;
    double stat = 0.0;
    int cols = 0;
    for (std::size_t k = 0; k < counts_a.size(); ++k) {
        const double col = counts_a[k] + counts_b[k];
        if (col <= 0.0) continue;
        const double ea = na * col / n;
        const double eb = nb * col / n;
        stat += (counts_a[k] - ea) * (counts_a[k] - ea) / ea + (counts_b[k] - eb) * (counts_b[k] - eb) / eb;
        ++cols;
    }
    const int dof = std::max(cols - 1, 0);
    return {stat, dof, chi_square_survival(stat, dof)};
}

double normal_cdf(double x, double sd) {
    if (sd <= 0.0) return x >= 0.0 ? 1.0 : 0.0;
    return 0.5 * std::erfc(-x / (sd * std::numbers::sqrt2));
}

}  // namespace sbfw::stats
