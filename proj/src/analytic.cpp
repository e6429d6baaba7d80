#include "sbfw/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace sbfw::analytic {

namespace {

void require(bool ok, const char* what) {
    if (!ok) throw std::domain_error(what);
}

}  // namespace

double phi(double c, double s) {
    require(c > 0.0, "phi: c must be positive");
    require(s >= 0.0, "phi: s must be non-negative");
    // 1 - e^{-cs} - s, written with expm1 so that small s keeps its digits.
    return -std::expm1(-c * s) - s;
}

double phi_derivative(double c, double s) {
    require(c > 0.0, "phi_derivative: c must be positive");
    require(s >= 0.0, "phi_derivative: s must be non-negative");
    return c * std::exp(-c * s) - 1.0;
}

double lambert_w0(double z) {
    constexpr double kInvE = 0.36787944117144232159552377016146;
    require(std::isfinite(z) && z >= -kInvE, "lambert_w0: argument below -1/e");
    if (z == 0.0) return 0.0;
    if (z == -kInvE) return -1.0;

    double w;
    if (z < -0.25) {
        // Series about the branch point in p = sqrt(2 (e z + 1)).
        const double p = std::sqrt(2.0 * (std::exp(1.0) * z + 1.0));
        w = -1.0 + p * (1.0 + p * (-1.0 / 3.0 + p * (11.0 / 72.0 + p * (-43.0 / 540.0))));
    } else if (z < 3.0) {
        w = std::log1p(z);
        w = w * (1.0 - std::log1p(w) / (2.0 + w));
    } else {
        const double l1 = std::log(z);
        const double l2 = std::log(l1);
        w = l1 - l2 + l2 / l1;
    }

    for (int it = 0; it < 64; ++it) {
        const double ew = std::exp(w);
        const double f = w * ew - z;
        const double wp1 = w + 1.0;
        if (wp1 == 0.0) break;
        const double denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1);
        const double step = f / denom;
        w -= step;
        if (std::abs(step) <= 4.0 * std::numeric_limits<double>::epsilon() * (1.0 + std::abs(w))) break;
    }
    return w;
}

double rho(double c) {
    require(std::isfinite(c), "rho: c must be finite");
    require(c >= kNearCriticalGuard, "rho: c too close to (or below) the critical point 1");

    // Phi^c is concave with Phi^c(0) = 0, positive on (0, rho) and negative
    // after. Newton started to the right of the root decreases monotonically;
    // the bracket keeps it honest if rounding pushes an iterate outside.
    double lo = 1e-12;
    double hi = 1.0;
    double s = 1.0;
    constexpr double kTol = 1e-14;
    bool converged = false;
    for (int it = 0; it < 100; ++it) {
        const double f = phi(c, s);
        if (f > 0.0) lo = std::max(lo, s); else hi = std::min(hi, s);
        const double d = phi_derivative(c, s);
        double next = (d != 0.0) ? s - f / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        const double step = std::abs(next - s);
        s = next;
        if (step <= kTol * std::max(1.0, s) || hi - lo <= kTol) {
            converged = true;
            break;
        }
    }
    if (!converged) {
        lo = 1e-12;
        hi = 1.0;
        while (hi - lo > kTol) {
            const double mid = 0.5 * (lo + hi);
            if (phi(c, mid) > 0.0) lo = mid; else hi = mid;
        }
        s = 0.5 * (lo + hi);
    }
    return s;
}

double rho_lambert(double c) {
    require(std::isfinite(c), "rho_lambert: c must be finite");
    require(c >= kNearCriticalGuard, "rho_lambert: c too close to (or below) the critical point 1");
    return 1.0 + lambert_w0(-c * std::exp(-c)) / c;
}

double pi_conjugate(double c) {
    return c * (1.0 - rho(c));
}

double sigma2(double c) {
    const double r = rho(c);
    const double denom = 1.0 - c * (1.0 - r);
    return r * (1.0 - r) / (denom * denom);
}

double big_f(double c, double s) {
    require(c > 0.0, "big_f: c must be positive");
    require(s >= 0.0, "big_f: s must be non-negative");
    return -std::expm1(-c * s);
}

double upsilon_n(double t, double eps, double s) {
    require(t > 0.0, "upsilon_n: t must be positive");
    require(eps > 0.0 && eps < 1.0, "upsilon_n: eps must lie in (0,1)");
    require(s >= 0.0, "upsilon_n: s must be non-negative");
    return phi(1.0 + t * eps, eps * s) / (eps * eps);
}

double upsilon_limit(double t, double s) {
    return t * s - 0.5 * s * s;
}

double rho_n(double t, double eps) {
    require(t > 0.0, "rho_n: t must be positive");
    require(eps > 0.0 && eps <= 1.0, "rho_n: eps must lie in (0,1]");
    return rho(1.0 + t * eps);
}

double q_n(std::size_t n, double t, double eps) {
    require(n > 0, "q_n: n must be positive");
    require(t > 0.0, "q_n: t must be positive");
    require(eps > 0.0 && eps <= 1.0, "q_n: eps must lie in (0,1]");
    return static_cast<double>(n) * eps * eps * (1.0 + t * eps);
}

double cov_supercrit_limit(double c1, double c2) {
    const double lo = std::min(c1, c2);
    const double hi = std::max(c1, c2);
    const double r_lo = rho(lo);
    const double r_hi = rho(hi);
    const double d1 = 1.0 - pi_conjugate(c1);
    const double d2 = 1.0 - pi_conjugate(c2);
    return r_lo * (1.0 - r_hi) / (d1 * d2);
}

double cov_bsc_limit(double t1, double t2) {
    require(t1 > 0.0 && t2 > 0.0, "cov_bsc_limit: t must be positive");
    return 2.0 * std::min(t1, t2) / (t1 * t2);
}

DoobMeyerMoments doob_meyer_moments(double q, double s) {
    require(q > 0.0, "doob_meyer_moments: q must be positive");
    require(s >= 0.0, "doob_meyer_moments: s must be non-negative");
    const double u = q * s;
    const double e = std::exp(-u);
    return {std::expm1(-u) + u, -std::expm1(-2.0 * u) - 2.0 * u * e};
}

}  // namespace sbfw::analytic
