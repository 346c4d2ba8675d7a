#pragma once

#include <optional>
#include <utility>

#include "winrestart/params.hpp"

namespace winrestart {

// Restart-time bounds and linear convergence constants for the inertial
// system on an L-smooth objective satisfying a PL inequality with constant
// mu. All of them depend on (alpha, beta, gamma, L, mu) only, not on the
// initial point.
struct TheoreticalBounds {
    double tau1 = 0.0;       // zero of H; H > 0 on (0, tau1)
    double tau2 = 0.0;       // where H crosses 1/2
    double tau3 = 0.0;       // zero of G; lower bound on every restart time
    double tau_star = 0.0;   // argmin of the upper-bound expression phi
    double tau_upper = 0.0;  // phi(tau_star); upper bound on every restart time
    double Q = 0.0;          // per-cycle contraction factor of f - f_star, in (0,1)
    double C = 0.0;          // envelope constant 1/Q
    double K = 0.0;          // envelope rate -ln(Q)/tau_upper
};

// Auxiliary functions of the speed analysis. Both are strictly decreasing,
// tend to 1 as t -> 0+ and to -inf as t -> inf. Evaluation switches to a
// series branch below t = 1e-6 to avoid loss of significance.
double eval_H(double t, const SystemParams& p, double L);
double eval_G(double t, const SystemParams& p, double L);

// Psi(tau) = (2 - 1/H(tau))^2, defined for 0 < tau < tau2 where H > 1/2.
// Throws DomainError outside that range.
double eval_Psi(double tau, const SystemParams& p, double L);

struct TauRoots {
    double tau1 = 0.0;
    double tau2 = 0.0;
    double tau3 = 0.0;
};

// Bracketing plus bisection on H, H - 1/2 and G. Throws BracketFailure when
// no sign change is found before t = 1e3.
TauRoots solve_tau(const SystemParams& p, double L);

// Minimizes phi(tau) = tau + alpha / (2 mu gamma (1 - e^(-alpha tau))^2 Psi(tau))
// over (0, min(tau2, cap)] where cap defaults to tau3. Returns (argmin, min).
std::pair<double, double> tau_upper_bound(const SystemParams& p, double L, double mu,
                                          std::optional<double> cap = std::nullopt);

// Minimum over (0, min(tau2, tau3)] of the one-cycle contraction bound
// q(tau) = 1 - (2 mu gamma / alpha) Psi(tau) (tau + (2/alpha) e^(-alpha tau)
//          - (1/(2 alpha)) e^(-2 alpha tau) - 3/(2 alpha)).
// Throws InvalidContraction when the result is not in (0,1).
double q_factor(const SystemParams& p, double L, double mu);

// (C, K) with C = 1/Q and K = -ln(Q)/tau_upper.
std::pair<double, double> convergence_constants(const SystemParams& p, double L, double mu);

TheoreticalBounds compute_bounds(const SystemParams& p, double L, double mu);

}  // namespace winrestart
