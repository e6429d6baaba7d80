#pragma once

// Test-only reference implementations. They are deliberately naive and share
// no code with the library routes they check.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace sbfw::test_oracle {

/// Root of 1 - s - exp(-c s) in (0, 1] by plain bisection in long double.
inline double bisection_rho(double c) {
    long double lo = 1e-12L, hi = 1.0L;
    const auto f = [c](long double s) { return 1.0L - s - std::exp(-static_cast<long double>(c) * s); };
    for (int i = 0; i < 200 && hi - lo > 1e-18L; ++i) {
        const long double mid = 0.5L * (lo + hi);
        (f(mid) > 0.0L ? lo : hi) = mid;
    }
    return static_cast<double>(0.5L * (lo + hi));
}

struct GridExcursion {
    double start;
    double length;  // mass of the member jumps
    double grid_length;
    std::size_t first_jump;
    std::size_t jump_count;
};

/// Excursions above past infima recovered by evaluating Z and its running
/// infimum on the grid {0, h, 2h, ...}. A maximal run of grid points with
/// Z > inf Z is one excursion; its start is the first jump in the grid cell
/// where the run begins, and its members are the jumps up to the run's last
/// grid point. `times` must be strictly increasing.
inline std::vector<GridExcursion> grid_excursions(const std::vector<double>& times, const std::vector<double>& sizes,
                                                  double h) {
    std::vector<GridExcursion> out;
    if (times.empty()) return out;
    double total = 0.0;
    for (double m : sizes) total += m;
    const double horizon = times.back() + total + 2.0 * h;
    const auto steps = static_cast<std::size_t>(horizon / h) + 2;

    std::size_t next = 0;  // jumps with index < next have time <= u
    double mass = 0.0;
    double inf = 0.0;
    bool inside = false;
    std::size_t run_first = 0;
    double run_start_u = 0.0;
    for (std::size_t k = 0; k <= steps; ++k) {
        const double u = static_cast<double>(k) * h;
        const std::size_t before = next;
        while (next < times.size() && times[next] <= u) mass += sizes[next++];
        const double z = mass - u;
        inf = std::min(inf, z);
        const bool above = z > inf;
        if (above && !inside) {
            inside = true;
            run_first = before;
            run_start_u = u;
        } else if (!above && inside) {
            inside = false;
            // Members: jumps from run_first up to the previous grid point.
            std::size_t last = run_first;
            while (last < times.size() && times[last] <= u - h) ++last;
            double len = 0.0;
            for (std::size_t j = run_first; j < last; ++j) len += sizes[j];
            out.push_back({times[run_first], len, u - run_start_u, run_first, last - run_first});
        }
    }
    return out;
}

/// Smallest eigenvalue of a symmetric matrix by cyclic Jacobi rotations.
inline double min_eigenvalue(std::vector<std::vector<double>> a) {
    const std::size_t n = a.size();
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < n; ++p)
            for (std::size_t q = p + 1; q < n; ++q) off += a[p][q] * a[p][q];
        if (off < 1e-30) break;
        for (std::size_t p = 0; p < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                const double theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a[k][p], akq = a[k][q];
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a[p][k], aqk = a[q][k];
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    double m = a[0][0];
    for (std::size_t i = 1; i < n; ++i) m = std::min(m, a[i][i]);
    return m;
}

}  // namespace sbfw::test_oracle
