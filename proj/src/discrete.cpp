#include "winrestart/discrete.hpp"

#include <cmath>
#include <stdexcept>
#include <tuple>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"

namespace winrestart {

std::pair<Vec, Vec> algorithm_step(const Objective& obj, const DiscreteConfig& cfg,
                                   const Vec& x_prev, const Vec& x_cur) {
    const double h = cfg.h;
    const SystemParams& p = cfg.params;
    const Vec g_cur = obj.grad(x_cur);
    const Vec g_prev = obj.grad(x_prev);
    const std::size_t n = x_cur.size();
    Vec y(n);
    for (std::size_t i = 0; i < n; ++i)
        y[i] = x_cur[i] + (1.0 - p.alpha * h) * (x_cur[i] - x_prev[i]) -
               p.beta * h * (g_cur[i] - g_prev[i]);
    const Vec gy = obj.grad(y);
    Vec x_next(n);
    for (std::size_t i = 0; i < n; ++i) x_next[i] = y[i] - p.gamma * h * h * gy[i];
    return {std::move(y), std::move(x_next)};
}

std::vector<IterateRecord> run_algorithm(const Objective& obj, const DiscreteConfig& cfg,
                                         const Vec& x0) {
    validate(cfg.params);
    if (!(cfg.h > 0.0)) throw std::invalid_argument("run_algorithm: h must be > 0");
    if (cfg.max_iters < 0) throw std::invalid_argument("run_algorithm: max_iters must be >= 0");
    if (static_cast<int>(x0.size()) != obj.dim)
        throw std::invalid_argument("run_algorithm: x0 has wrong dimension");

    std::vector<IterateRecord> records;
    if (cfg.max_iters == 0) return records;
    records.reserve(static_cast<std::size_t>(cfg.max_iters) + 1);
    records.push_back({0, x0, obj.gap(x0), 0.0, false});

    Vec x_prev = x0;
    Vec x_cur = x0;
    bool warm_phase = cfg.policy == RestartPolicy::WarmStart;
    bool suppress = false;

    for (int k = 1; k <= cfg.max_iters; ++k) {
        if (norm(obj.grad(x_cur)) <= cfg.stop_grad_tol) break;

        auto [y, x_next] = algorithm_step(obj, cfg, x_prev, x_cur);
        if (!all_finite(x_next))
            throw NonFiniteIterate(k, "iterate became non-finite at k = " + std::to_string(k) +
                                          "; reduce h");

        bool trigger = false;
        if (cfg.policy != RestartPolicy::None) {
            if (warm_phase)
                trigger = obj.eval(x_next) > obj.eval(x_cur);
            else
                trigger = dist(x_next, x_cur) < dist(x_cur, x_prev);
        }
        if (suppress) {
            trigger = false;
            suppress = false;
        }

        bool restarted = false;
        if (trigger) {
            restarted = true;
            suppress = true;
            warm_phase = false;
            if (cfg.literal_rewind) {
                x_cur = x_prev;  // verbatim branch: drop the last accepted iterate
                records.push_back({k, x_cur, obj.gap(x_cur), 0.0, true});
                continue;
            }
            // Collapse the momentum: restart the two-point recursion from the
            // current iterate, which turns this step into a plain gradient step.
            x_prev = x_cur;
            std::tie(y, x_next) = algorithm_step(obj, cfg, x_prev, x_cur);
        }

        x_prev = x_cur;
        x_cur = x_next;
        records.push_back({k, x_cur, obj.gap(x_cur), dist(x_cur, x_prev), restarted});
    }
    return records;
}

std::vector<std::string> discrete_sanity_warnings(const DiscreteConfig& cfg, double L) {
    std::vector<std::string> warnings;
    const double m = 1.0 - cfg.params.alpha * cfg.h;
    if (!(m > 0.0 && m < 1.0))
        warnings.push_back("momentum factor 1 - alpha h = " + format_double(m) +
                           " is outside (0,1); the scheme may be unstable");
    const double s = cfg.params.gamma * cfg.h * cfg.h * L;
    if (s > 4.0)
        warnings.push_back("effective gradient step gamma h^2 L = " + format_double(s) +
                           " exceeds 4; the scheme may diverge");
    return warnings;
}

RestartPolicy parse_policy(const std::string& name) {
    if (name == "none") return RestartPolicy::None;
    if (name == "speed") return RestartPolicy::Speed;
    if (name == "warmstart") return RestartPolicy::WarmStart;
    throw ConfigError("policy: expected none, speed or warmstart, got '" + name + "'");
}

std::string policy_name(RestartPolicy policy) {
    switch (policy) {
        case RestartPolicy::None: return "none";
        case RestartPolicy::Speed: return "speed";
        case RestartPolicy::WarmStart: return "warmstart";
    }
    return "unknown";
}

}  // namespace winrestart
