#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "winrestart/objective.hpp"
#include "winrestart/params.hpp"

namespace winrestart {

struct PhaseState {
    double t = 0.0;
    Vec x;
    Vec v;
};

struct IntegratorOptions {
    double h_ode = 1e-4;             // fixed step of the classical RK4 scheme
    double event_tolerance = 1e-8;   // width to which the restart time is localized
    double max_time = 100.0;         // hard cap on one integration segment
    double gradient_stop_tol = 1e-13;
};

enum class Termination { RestartFound, GradientBelowTol, MaxTimeReached };

// One integration segment starting from rest. states holds the grid points;
// when a restart was found the bisected event state is appended as the last
// entry, so states.back() is the point where the next cycle starts.
struct SegmentResult {
    std::vector<PhaseState> states;
    std::optional<double> restart_time;
    Termination termination = Termination::MaxTimeReached;
};

// First-order form of the system: returns (dx/dt, dv/dt) where
// dv/dt = -alpha v - beta Hf(x) v - gamma grad f(x).
std::pair<Vec, Vec> win_vector_field(const Objective& obj, const SystemParams& p,
                                     const PhaseState& s);

// d/dt |v|^2 = 2 <v, dv/dt>; the restart event function.
double speed_derivative(const Objective& obj, const SystemParams& p, const PhaseState& s);

// Integrates from (x, v) = (z, 0) until the first time the speed stops
// increasing after having become strictly positive, the gradient norm falls
// below gradient_stop_tol, or max_time is reached. The event time is
// localized by bisection inside the bracketing step.
SegmentResult integrate_until_restart(const Objective& obj, const SystemParams& p,
                                      const Vec& z, const IntegratorOptions& opts);

// Same integrator without the restart event; runs to max_time or until the
// gradient stop tolerance is met.
SegmentResult integrate_plain(const Objective& obj, const SystemParams& p, const Vec& z,
                              const IntegratorOptions& opts);

}  // namespace winrestart
