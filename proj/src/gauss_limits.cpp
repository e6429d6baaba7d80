#include "sbfw/gauss_limits.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "sbfw/analytic.hpp"

namespace sbfw::gauss {

namespace {

void check_grid(std::span<const double> grid, const char* who) {
    if (grid.size() > kMaxGridPoints) throw std::invalid_argument(std::string(who) + ": grid too large");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (!std::isfinite(grid[i])) throw std::invalid_argument(std::string(who) + ": grid must be finite");
        if (i > 0 && !(grid[i] > grid[i - 1])) throw std::invalid_argument(std::string(who) + ": grid must be strictly increasing");
    }
}

// Brownian values at the given increasing points (first point >= 0).
std::vector<double> brownian_at(std::span<const double> points, Stream& rng) {
    NormalSampler normal;
    std::vector<double> out(points.size());
    double prev_t = 0.0;
    double prev_v = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double dt = points[i] - prev_t;
        prev_v += (dt > 0.0 ? std::sqrt(dt) * normal(rng) : 0.0);
        prev_t = points[i];
        out[i] = prev_v;
    }
    return out;
}

}  // namespace

GridPath sample_brownian(std::span<const double> grid, Stream& rng) {
    check_grid(grid, "sample_brownian");
    if (!grid.empty() && grid[0] < 0.0) throw std::invalid_argument("sample_brownian: grid must start at or after 0");
    return {std::vector<double>(grid.begin(), grid.end()), brownian_at(grid, rng)};
}

GridPath sample_bridge(std::span<const double> grid, Stream& rng) {
    check_grid(grid, "sample_bridge");
    if (!grid.empty() && (grid.front() < 0.0 || grid.back() > 1.0))
        throw std::invalid_argument("sample_bridge: grid must lie in [0,1]");

    std::vector<double> points(grid.begin(), grid.end());
    const bool has_one = !points.empty() && points.back() == 1.0;
    if (!has_one) points.push_back(1.0);
    const auto b = brownian_at(points, rng);
    const double b1 = b.back();

    GridPath out{std::vector<double>(grid.begin(), grid.end()), std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.size(); ++i) out.values[i] = b[i] - grid[i] * b1;
    if (has_one) out.values.back() = 0.0;
    return out;
}

GridPath sample_supercrit_limit(std::span<const double> c_grid, Stream& rng) {
    check_grid(c_grid, "sample_supercrit_limit");
    std::vector<double> rhos(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) rhos[i] = analytic::rho(c_grid[i]);
    // rho is strictly increasing, so the bridge grid is too.
    const GridPath bridge = sample_bridge(rhos, rng);
    GridPath out{std::vector<double>(c_grid.begin(), c_grid.end()), std::vector<double>(c_grid.size())};
    for (std::size_t i = 0; i < c_grid.size(); ++i)
        out.values[i] = bridge.values[i] / (1.0 - analytic::pi_conjugate(c_grid[i]));
    return out;
}

GridPath sample_supercrit_limit_bm(std::span<const double> c_grid, Stream& rng) {
    check_grid(c_grid, "sample_supercrit_limit_bm");
    std::vector<double> rhos(c_grid.size());
    std::vector<double> clock(c_grid.size());
    for (std::size_t i = 0; i < c_grid.size(); ++i) {
        rhos[i] = analytic::rho(c_grid[i]);
        clock[i] = rhos[i] / (1.0 - rhos[i]);
    }
    const auto b = brownian_at(clock, rng);
    GridPath out{std::vector<double>(c_grid.begin(), c_grid.end()), std::vector<double>(c_grid.size())};
    for (std::size_t i = 0; i < c_grid.size(); ++i)
        out.values[i] = (1.0 - rhos[i]) / (1.0 - analytic::pi_conjugate(c_grid[i])) * b[i];
    return out;
}

GridPath sample_bsc_limit(std::span<const double> t_grid, Stream& rng) {
    check_grid(t_grid, "sample_bsc_limit");
    std::vector<double> doubled(t_grid.size());
    for (std::size_t i = 0; i < t_grid.size(); ++i) {
        if (!(t_grid[i] > 0.0)) throw std::domain_error("sample_bsc_limit: t must be positive");
        doubled[i] = 2.0 * t_grid[i];
    }
    const auto b = brownian_at(doubled, rng);
    GridPath out{std::vector<double>(t_grid.begin(), t_grid.end()), std::vector<double>(t_grid.size())};
    for (std::size_t i = 0; i < t_grid.size(); ++i) out.values[i] = b[i] / t_grid[i];
    return out;
}

}  // namespace sbfw::gauss
