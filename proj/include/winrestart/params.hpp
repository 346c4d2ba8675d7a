#pragma once

namespace winrestart {

// Coefficients of the damped inertial system
//
//   x'' + alpha x' + beta Hf(x) x' + gamma grad f(x) = 0
//
// with viscous damping alpha > 0, Hessian-driven damping beta >= 0 and
// gradient weight gamma > 0.
struct SystemParams {
    double alpha = 3.0;
    double beta = 0.0;
    double gamma = 1.0;
};

// Throws std::invalid_argument when a coefficient is out of range.
void validate(const SystemParams& p);

}  // namespace winrestart
