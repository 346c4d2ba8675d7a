#pragma once

#include <string>
#include <utility>
#include <vector>

#include "winrestart/objective.hpp"
#include "winrestart/params.hpp"

namespace winrestart {

enum class RestartPolicy { None, Speed, WarmStart };

struct DiscreteConfig {
    SystemParams params;
    double h = 1e-3;
    int max_iters = 3000;
    RestartPolicy policy = RestartPolicy::None;
    double stop_grad_tol = 0.0;
    // Replays the restart branch verbatim: the current iterate is rewound to
    // its predecessor instead of collapsing the momentum onto the current
    // point. Kept for comparison; the default semantics is the collapse.
    bool literal_rewind = false;
};

struct IterateRecord {
    int k = 0;
    Vec x;
    double f_gap = 0.0;
    double step_norm = 0.0;  // |x_k - x_{k-1}|
    bool restarted = false;
};

// One iteration of the inertial gradient scheme:
//   y = x_cur + (1 - alpha h)(x_cur - x_prev) - beta h (grad f(x_cur) - grad f(x_prev))
//   x_next = y - gamma h^2 grad f(y)
// Returns (y, x_next).
std::pair<Vec, Vec> algorithm_step(const Objective& obj, const DiscreteConfig& cfg,
                                   const Vec& x_prev, const Vec& x_cur);

// Runs max_iters iterations from x_prev = x_cur = x0 under the configured
// restart policy. Record 0 is the initial point; records k = 1..max_iters
// follow. Speed restarts collapse the momentum and are suppressed for one
// iteration afterwards; WarmStart ends its first cycle at the first
// function-value increase and then behaves like Speed. Returns an empty
// vector when max_iters is 0.
std::vector<IterateRecord> run_algorithm(const Objective& obj, const DiscreteConfig& cfg,
                                         const Vec& x0);

// Step-size sanity warnings: momentum factor (1 - alpha h) outside (0,1) or
// an effective gradient step gamma h^2 L above 4.
std::vector<std::string> discrete_sanity_warnings(const DiscreteConfig& cfg, double L);

RestartPolicy parse_policy(const std::string& name);
std::string policy_name(RestartPolicy policy);

}  // namespace winrestart
