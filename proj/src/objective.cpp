#include "winrestart/objective.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace winrestart {

Vec Objective::hessian_vec(const Vec& x, const Vec& v) const {
    if (hvp) return hvp(x, v);
    return finite_difference_hvp(*this, x, v, 1e-5);
}

Objective make_power_quadratic(const PowerQuadraticSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("power quadratic: n must be >= 1");
    if (spec.rho <= 1.0) throw std::invalid_argument("power quadratic: rho must be > 1");

    Vec w(spec.n);
    double wj = 1.0;
    for (int j = 0; j < spec.n; ++j) {
        w[j] = wj;
        wj *= spec.rho;
    }

    Objective obj;
    obj.dim = spec.n;
    obj.eval = [w](const Vec& x) {
        double s = 0.0;
        for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * x[j] * x[j];
        return 0.5 * s;
    };
    obj.grad = [w](const Vec& x) {
        Vec g(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) g[j] = w[j] * x[j];
        return g;
    };
    obj.hvp = [w](const Vec&, const Vec& v) {
        Vec hv(w.size());
        for (std::size_t j = 0; j < w.size(); ++j) hv[j] = w[j] * v[j];
        return hv;
    };
    obj.lipschitz = w.back();  // largest eigenvalue rho^(n-1)
    obj.pl_mu = 1.0;           // smallest eigenvalue
    obj.f_star = 0.0;
    obj.argmin_hint = Vec(spec.n, 0.0);
    return obj;
}

double gamma_for_oscillation(double alpha, double beta, double rho, int i, double epsilon) {
    if (alpha <= 0.0) throw std::invalid_argument("gamma_for_oscillation: alpha must be > 0");
    if (beta < 0.0) throw std::invalid_argument("gamma_for_oscillation: beta must be >= 0");
    if (rho <= 1.0) throw std::invalid_argument("gamma_for_oscillation: rho must be > 1");
    if (i < 0) throw std::invalid_argument("gamma_for_oscillation: i must be >= 0");
    if (epsilon <= 0.0) throw std::invalid_argument("gamma_for_oscillation: epsilon must be > 0");
    const double ri = std::pow(rho, i);
    const double s = alpha + ri * beta;
    return s * s / (4.0 * ri) + epsilon;
}

Vec finite_difference_hvp(const Objective& obj, const Vec& x, const Vec& v, double h) {
    if (h <= 0.0) throw std::invalid_argument("finite_difference_hvp: h must be > 0");
    Vec xp = x, xm = x;
    axpy(h, v, xp);
    axpy(-h, v, xm);
    Vec gp = obj.grad(xp);
    const Vec gm = obj.grad(xm);
    for (std::size_t j = 0; j < gp.size(); ++j) gp[j] = (gp[j] - gm[j]) / (2.0 * h);
    return gp;
}

}  // namespace winrestart
