#include "winrestart/theory.hpp"

#include <cmath>
#include <functional>
#include <stdexcept>
#include <string>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"

namespace winrestart {

void validate(const SystemParams& p) {
    if (!(p.alpha > 0.0)) throw std::invalid_argument("system params: alpha must be > 0");
    if (!(p.beta >= 0.0)) throw std::invalid_argument("system params: beta must be >= 0");
    if (!(p.gamma > 0.0)) throw std::invalid_argument("system params: gamma must be > 0");
}

namespace {

// 1 - u/(e^u - 1); vanishes at u = 0. Series branch below |u| = u_series
// keeps the subtraction exact for tiny arguments.
double ecomp(double u, bool series) {
    if (series) return u * (0.5 - u * (1.0 / 12.0 - u * u / 720.0));
    return 1.0 - u / std::expm1(u);
}

constexpr double kSeriesT = 1e-6;  // series branch threshold on t

void check_smoothness(double L, double mu) {
    if (!(L > 0.0)) throw std::invalid_argument("smoothness: L must be > 0");
    if (!(mu > 0.0)) throw std::invalid_argument("smoothness: mu must be > 0");
}

}  // namespace

// Both H and G have the raw shape  const + rational expression in e^(alpha t),
// with a removable singularity at t = 0. Using c0 = 2 gamma/alpha - beta and
// d0 = gamma/alpha^2 - beta/alpha they collapse to the cancellation-free forms
//
//   H(t) = 1 - (L gamma/alpha) t + (L c0/alpha) (1 - alpha t / (e^(alpha t)-1))
//   G(t) = 1 - (2 L gamma/alpha) t e^(alpha t)
//            + (L c0/alpha) e^(alpha t) (1 - alpha t / (e^(alpha t)-1))
//            + L d0 (e^(alpha t) - 1)
//
// which evaluate to exactly 1 at t = 0.
double eval_H(double t, const SystemParams& p, double L) {
    validate(p);
    if (t < 0.0) throw DomainError("eval_H: t must be >= 0");
    const double c0 = 2.0 * p.gamma / p.alpha - p.beta;
    const double u = p.alpha * t;
    return 1.0 - L * p.gamma / p.alpha * t + L * c0 / p.alpha * ecomp(u, t < kSeriesT);
}

double eval_G(double t, const SystemParams& p, double L) {
    validate(p);
    if (t < 0.0) throw DomainError("eval_G: t must be >= 0");
    const double c0 = 2.0 * p.gamma / p.alpha - p.beta;
    const double d0 = p.gamma / (p.alpha * p.alpha) - p.beta / p.alpha;
    const double u = p.alpha * t;
    const double eu = std::exp(u);
    return 1.0 - 2.0 * L * p.gamma / p.alpha * t * eu +
           L * c0 / p.alpha * eu * ecomp(u, t < kSeriesT) + L * d0 * std::expm1(u);
}

double eval_Psi(double tau, const SystemParams& p, double L) {
    if (!(tau > 0.0)) throw DomainError("eval_Psi: tau must be > 0");
    const double h = eval_H(tau, p, L);
    // H is strictly decreasing, so H <= 1/2 is equivalent to tau >= tau2.
    if (h <= 0.5) throw DomainError("eval_Psi: tau is not below the H = 1/2 crossing");
    const double r = 2.0 - 1.0 / h;
    return r * r;
}

namespace {

// Sign-change bracketing by doubling from t0, then bisection. fn must be
// positive at t0 and eventually negative.
double bracket_and_bisect(const std::function<double(double)>& fn, const char* what) {
    const double t_max = 1e3;
    double lo = 1e-8;
    double flo = fn(lo);
    while (flo <= 0.0 && lo > 1e-300) {
        lo *= 0.25;
        flo = fn(lo);
    }
    if (flo <= 0.0) throw BracketFailure(std::string(what) + ": no positive left endpoint");
    double hi = lo;
    double fhi = flo;
    while (fhi > 0.0) {
        hi *= 2.0;
        if (hi > t_max)
            throw BracketFailure(std::string(what) + ": no sign change before t = 1e3");
        fhi = fn(hi);
    }
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double resolution
        if (fn(mid) > 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

// Golden-section minimization seeded by a coarse scan so a locally flat or
// multi-valley objective cannot trap the bracket. Returns (argmin, min).
std::pair<double, double> minimize_scan_golden(const std::function<double(double)>& fn,
                                               double lo, double hi, double tol) {
    const int n_scan = 2000;
    double best_x = lo;
    double best_f = fn(lo);
    for (int j = 1; j <= n_scan; ++j) {
        const double x = lo + (hi - lo) * j / n_scan;
        const double f = fn(x);
        if (f < best_f) {
            best_f = f;
            best_x = x;
        }
    }
    const double step = (hi - lo) / n_scan;
    double a = std::max(lo, best_x - step);
    double b = std::min(hi, best_x + step);
    const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
    double x1 = b - invphi * (b - a);
    double x2 = a + invphi * (b - a);
    double f1 = fn(x1);
    double f2 = fn(x2);
    while (b - a > tol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - invphi * (b - a);
            f1 = fn(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + invphi * (b - a);
            f2 = fn(x2);
        }
    }
    const double xm = 0.5 * (a + b);
    double fm = fn(xm);
    if (best_f < fm) {  // guard against a degenerate bracket
        return {best_x, best_f};
    }
    return {xm, fm};
}

}  // namespace

TauRoots solve_tau(const SystemParams& p, double L) {
    validate(p);
    check_smoothness(L, 1.0);
    TauRoots r;
    r.tau1 = bracket_and_bisect([&](double t) { return eval_H(t, p, L); }, "solve_tau: H");
    r.tau2 = bracket_and_bisect([&](double t) { return eval_H(t, p, L) - 0.5; },
                                "solve_tau: H - 1/2");
    r.tau3 = bracket_and_bisect([&](double t) { return eval_G(t, p, L); }, "solve_tau: G");
    return r;
}

namespace {

double phi_bound(double tau, const SystemParams& p, double L, double mu) {
    const double e = 1.0 - std::exp(-p.alpha * tau);
    return tau + p.alpha / (2.0 * mu * p.gamma * e * e * eval_Psi(tau, p, L));
}

// Integral of (1 - e^(-alpha s))^2 over [0, tau]; nonnegative and increasing.
double w_integral(double tau, double alpha) {
    return tau + 2.0 * std::exp(-alpha * tau) / alpha -
           std::exp(-2.0 * alpha * tau) / (2.0 * alpha) - 1.5 / alpha;
}

double q_of_tau(double tau, const SystemParams& p, double L, double mu) {
    return 1.0 - 2.0 * mu * p.gamma / p.alpha * eval_Psi(tau, p, L) * w_integral(tau, p.alpha);
}

// Search interval shared by the upper bound and the contraction factor:
// stay strictly below tau2 (Psi needs H > 1/2) and never beyond cap.
std::pair<double, double> feasible_interval(const TauRoots& roots, double cap) {
    const double hi = std::min(roots.tau2 * (1.0 - 1e-9), cap);
    const double lo = hi * 1e-9;
    if (!(hi > 0.0) || !(lo < hi)) throw DomainError("feasible tau interval is empty");
    return {lo, hi};
}

}  // namespace

std::pair<double, double> tau_upper_bound(const SystemParams& p, double L, double mu,
                                          std::optional<double> cap) {
    validate(p);
    check_smoothness(L, mu);
    const TauRoots roots = solve_tau(p, L);
    const double c = cap.value_or(roots.tau3);
    if (!(c > 0.0)) throw DomainError("tau_upper_bound: cap must be > 0");
    const auto [lo, hi] = feasible_interval(roots, c);
    auto fn = [&](double tau) { return phi_bound(tau, p, L, mu); };
    return minimize_scan_golden(fn, lo, hi, 1e-10);
}

double q_factor(const SystemParams& p, double L, double mu) {
    validate(p);
    check_smoothness(L, mu);
    const TauRoots roots = solve_tau(p, L);
    const auto [lo, hi] = feasible_interval(roots, roots.tau3);
    auto fn = [&](double tau) { return q_of_tau(tau, p, L, mu); };
    const double q = minimize_scan_golden(fn, lo, hi, 1e-10).second;
    if (!(q > 0.0 && q < 1.0))
        throw InvalidContraction("q_factor: contraction factor " + format_double(q) +
                                 " is not in (0,1); check that mu <= L holds for the problem");
    return q;
}

std::pair<double, double> convergence_constants(const SystemParams& p, double L, double mu) {
    const double q = q_factor(p, L, mu);
    const double upper = tau_upper_bound(p, L, mu).second;
    return {1.0 / q, -std::log(q) / upper};
}

TheoreticalBounds compute_bounds(const SystemParams& p, double L, double mu) {
    validate(p);
    check_smoothness(L, mu);
    TheoreticalBounds b;
    const TauRoots roots = solve_tau(p, L);
    b.tau1 = roots.tau1;
    b.tau2 = roots.tau2;
    b.tau3 = roots.tau3;
    const auto [ts, tu] = tau_upper_bound(p, L, mu, roots.tau3);
    b.tau_star = ts;
    b.tau_upper = tu;
    b.Q = q_factor(p, L, mu);
    b.C = 1.0 / b.Q;
    b.K = -std::log(b.Q) / b.tau_upper;
    return b;
}

}  // namespace winrestart
