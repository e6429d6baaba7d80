#include "sbfw/random.hpp"

namespace sbfw {

std::vector<double> draw_exponentials(std::size_t n, Stream& rng) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.exponential();
    return out;
}

std::vector<double> draw_sorted_exponentials(std::size_t n, Stream& rng) {
    std::vector<double> out(n);
    // Plain summation: positive increments keep the sequence non-decreasing.
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        acc += rng.exponential() / static_cast<double>(n - j);
        out[j] = acc;
    }
    return out;
}

double NormalSampler::operator()(Stream& rng) {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * rng.uniform_open0() - 1.0;
        v = 2.0 * rng.uniform_open0() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double m = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * m;
    has_spare_ = true;
    return u * m;
}

}  // namespace sbfw
