#pragma once

#include <functional>
#include <optional>

#include "winrestart/vec.hpp"

namespace winrestart {

// Twice continuously differentiable convex objective together with the
// smoothness data used by the restart bounds: a gradient Lipschitz constant
// and a Polyak-Lojasiewicz constant mu with 2 mu (f - f_star) <= |grad f|^2.
//
// Hessian information enters only through Hessian-vector products; no dense
// Hessian is ever formed.
struct Objective {
    int dim = 0;
    std::function<double(const Vec&)> eval;
    std::function<Vec(const Vec&)> grad;
    // x, v -> Hf(x) v. May be left empty; hessian_vec() then falls back to a
    // central difference of grad.
    std::function<Vec(const Vec&, const Vec&)> hvp;
    double lipschitz = 1.0;
    double pl_mu = 1.0;
    double f_star = 0.0;
    std::optional<Vec> argmin_hint;

    Vec hessian_vec(const Vec& x, const Vec& v) const;
    double gap(const Vec& x) const { return eval(x) - f_star; }
};

// f(x) = 1/2 sum_j rho^(j-1) x_j^2, an ill-conditioned diagonal quadratic
// with eigenvalues 1, rho, ..., rho^(n-1).
struct PowerQuadraticSpec {
    int n = 3;
    double rho = 10.0;
};

Objective make_power_quadratic(const PowerQuadraticSpec& spec);

// gamma = (alpha + rho^i beta)^2 / (4 rho^i) + epsilon, the smallest gradient
// weight (plus margin epsilon > 0) that makes the mode with eigenvalue rho^i
// of the power quadratic oscillate.
double gamma_for_oscillation(double alpha, double beta, double rho, int i, double epsilon);

// Central difference (grad(x + h v) - grad(x - h v)) / (2 h), h > 0.
Vec finite_difference_hvp(const Objective& obj, const Vec& x, const Vec& v, double h);

}  // namespace winrestart
