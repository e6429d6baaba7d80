#pragma once

// Finite-grid samplers for the Gaussian limit objects: Brownian motion B,
// the Brownian bridge Pi, the super-critical limit X(c) and the barely
// super-critical limit B(2t)/t.

#include <cstddef>
#include <span>
#include <vector>

#include "sbfw/random.hpp"

namespace sbfw::gauss {

inline constexpr std::size_t kMaxGridPoints = 10000;

struct GridPath {
    std::vector<double> grid;
    std::vector<double> values;
};

/// B on a strictly increasing grid with grid[0] >= 0.
GridPath sample_brownian(std::span<const double> grid, Stream& rng);

/// Pi(s) = B(s) - s B(1) on a strictly increasing grid inside [0, 1].
GridPath sample_bridge(std::span<const double> grid, Stream& rng);

/// X(c) = Pi(rho(c)) / (1 - pi(c)) on a strictly increasing grid of c > 1.
GridPath sample_supercrit_limit(std::span<const double> c_grid, Stream& rng);

/// The Brownian-motion form
///   X'(c) = (1 - rho) / (1 - pi) * B(rho / (1 - rho)),
/// which has the same law as X.
GridPath sample_supercrit_limit_bm(std::span<const double> c_grid, Stream& rng);

/// B(2 t) / t on a strictly increasing grid of t > 0.
GridPath sample_bsc_limit(std::span<const double> t_grid, Stream& rng);

}  // namespace sbfw::gauss
