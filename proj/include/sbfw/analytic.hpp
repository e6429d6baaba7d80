#pragma once

// Closed-form curves for the super-critical and barely super-critical
// Erdos-Renyi regimes: the drift function Phi^c, the giant-component density
// rho(c), its conjugate pi(c), CLT variances and limit covariances.
//
// Every function is pure. Domain violations throw std::domain_error.

#include <cstddef>

namespace sbfw::analytic {

/// Lowest c accepted by rho(); below it the root is too ill-conditioned.
inline constexpr double kNearCriticalGuard = 1.0 + 1e-6;

/// Phi^c(s) = 1 - s - exp(-c s), the mean of the rescaled breadth-first walk.
double phi(double c, double s);

/// d/ds Phi^c(s) = c exp(-c s) - 1.
double phi_derivative(double c, double s);

/// Principal branch W_0 of the Lambert W function on [-1/e, inf), by Halley
/// iteration. Started from the branch-point series for z close to -1/e.
double lambert_w0(double z);

/// Survival probability of a Poisson(c) Galton-Watson tree: the root of
/// Phi^c in (0,1). Safeguarded Newton on Phi^c with bisection fallback.
double rho(double c);

/// rho(c) through the Lambert W representation 1 + W_0(-c e^{-c}) / c.
/// Kept as an independent route; rho() is the primary one.
double rho_lambert(double c);

/// pi(c) = c (1 - rho(c)); the dual parameter with pi e^{-pi} = c e^{-c}.
double pi_conjugate(double c);

/// Asymptotic variance of sqrt(n) (L_n/n - rho(c)).
double sigma2(double c);

/// F^c(s) = 1 - exp(-c s).
double big_f(double c, double s);

/// Upsilon_n^t(s) = Phi^{1 + t eps}(eps s) / eps^2.
double upsilon_n(double t, double eps, double s);

/// Upsilon^t(s) = t s - s^2 / 2, the eps -> 0 limit of upsilon_n.
double upsilon_limit(double t, double s);

/// rho_n(t) = rho(1 + t eps).
double rho_n(double t, double eps);

/// q_n(t) = n eps^2 (1 + t eps), the sBFW time parameter of the barely
/// super-critical window when vertex masses are 1/(n eps).
double q_n(std::size_t n, double t, double eps);

/// Cov(X(c1), X(c2)) for X(c) = Pi(rho(c)) / (1 - pi(c)), Pi a Brownian bridge.
/// Derived from the bridge covariance u^v - uv and monotonicity of rho; the
/// diagonal reproduces sigma2.
double cov_supercrit_limit(double c1, double c2);

/// Cov(B(2 t1)/t1, B(2 t2)/t2) = 2 min(t1, t2) / (t1 t2).
double cov_bsc_limit(double t1, double t2);

struct DoobMeyerMoments {
    double mean;
    double variance;
};

/// Mean and variance of A(s) = q (s - xi)^+ for xi ~ Exponential(rate q).
DoobMeyerMoments doob_meyer_moments(double q, double s);

}  // namespace sbfw::analytic
