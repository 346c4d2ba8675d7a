#include "winrestart/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"

namespace winrestart {

namespace {

void validate_options(const IntegratorOptions& o) {
    if (!(o.h_ode > 0.0)) throw std::invalid_argument("integrator: h_ode must be > 0");
    if (!(o.max_time > 0.0)) throw std::invalid_argument("integrator: max_time must be > 0");
    if (!(o.h_ode <= o.max_time))
        throw std::invalid_argument("integrator: h_ode must not exceed max_time");
    if (!(o.event_tolerance > 0.0))
        throw std::invalid_argument("integrator: event_tolerance must be > 0");
    if (!(o.event_tolerance < o.h_ode))
        throw std::invalid_argument("integrator: event_tolerance must be below h_ode");
    if (!(o.gradient_stop_tol >= 0.0))
        throw std::invalid_argument("integrator: gradient_stop_tol must be >= 0");
}

void check_dim(const Objective& obj, const Vec& z) {
    if (obj.dim <= 0 || !obj.eval || !obj.grad)
        throw std::invalid_argument("integrator: objective is incomplete");
    if (static_cast<int>(z.size()) != obj.dim)
        throw std::invalid_argument("integrator: initial point has wrong dimension");
}

struct Deriv {
    Vec dx;
    Vec dv;
};

Deriv field(const Objective& obj, const SystemParams& p, const Vec& x, const Vec& v) {
    Deriv d;
    d.dx = v;
    const Vec hv = obj.hessian_vec(x, v);
    const Vec g = obj.grad(x);
    d.dv.resize(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
        d.dv[i] = -p.alpha * v[i] - p.beta * hv[i] - p.gamma * g[i];
    return d;
}

// One classical RK4 step of size h; t is advanced by the caller.
PhaseState rk4_step(const Objective& obj, const SystemParams& p, const PhaseState& s, double h) {
    const std::size_t n = s.x.size();
    const Deriv k1 = field(obj, p, s.x, s.v);
    Vec x2(n), v2(n);
    for (std::size_t i = 0; i < n; ++i) {
        x2[i] = s.x[i] + 0.5 * h * k1.dx[i];
        v2[i] = s.v[i] + 0.5 * h * k1.dv[i];
    }
    const Deriv k2 = field(obj, p, x2, v2);
    Vec x3(n), v3(n);
    for (std::size_t i = 0; i < n; ++i) {
        x3[i] = s.x[i] + 0.5 * h * k2.dx[i];
        v3[i] = s.v[i] + 0.5 * h * k2.dv[i];
    }
    const Deriv k3 = field(obj, p, x3, v3);
    Vec x4(n), v4(n);
    for (std::size_t i = 0; i < n; ++i) {
        x4[i] = s.x[i] + h * k3.dx[i];
        v4[i] = s.v[i] + h * k3.dv[i];
    }
    const Deriv k4 = field(obj, p, x4, v4);
    PhaseState out;
    out.t = s.t + h;
    out.x.resize(n);
    out.v.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.x[i] = s.x[i] + h / 6.0 * (k1.dx[i] + 2.0 * k2.dx[i] + 2.0 * k3.dx[i] + k4.dx[i]);
        out.v[i] = s.v[i] + h / 6.0 * (k1.dv[i] + 2.0 * k2.dv[i] + 2.0 * k3.dv[i] + k4.dv[i]);
    }
    return out;
}

constexpr double kStallSpeedFloor = 1e-30;

SegmentResult integrate_impl(const Objective& obj, const SystemParams& p, const Vec& z,
                             const IntegratorOptions& opts, bool detect_restart) {
    validate(p);
    validate_options(opts);
    check_dim(obj, z);

    SegmentResult res;
    PhaseState s;
    s.t = 0.0;
    s.x = z;
    s.v = Vec(z.size(), 0.0);
    res.states.push_back(s);

    const double g0 = norm(obj.grad(z));
    if (g0 <= opts.gradient_stop_tol) {
        res.termination = Termination::GradientBelowTol;
        return res;
    }

    bool armed = false;       // speed was strictly positive with positive derivative
    double max_speed = 0.0;
    while (true) {
        const double remaining = opts.max_time - s.t;
        if (remaining <= opts.h_ode * 1e-9) break;
        const double h = std::min(opts.h_ode, remaining);

        PhaseState next = rk4_step(obj, p, s, h);
        if (!all_finite(next.x) || !all_finite(next.v))
            throw NonFiniteState("integration diverged near t = " + format_double(next.t) +
                                 "; reduce h_ode or rescale the problem");

        const double speed = norm(next.v);
        max_speed = std::max(max_speed, speed);
        if (detect_restart) {
            const double sd = speed_derivative(obj, p, next);
            if (!armed) {
                if (speed > 0.0 && sd > 0.0) armed = true;
            } else if (sd <= 0.0) {
                // The crossing lies in (s.t, next.t]; bisect the step offset,
                // re-integrating from s each time.
                double lo = 0.0, hi = h;
                while (hi - lo > opts.event_tolerance) {
                    const double mid = 0.5 * (lo + hi);
                    PhaseState trial = rk4_step(obj, p, s, mid);
                    if (speed_derivative(obj, p, trial) > 0.0)
                        lo = mid;
                    else
                        hi = mid;
                }
                const double dt = 0.5 * (lo + hi);
                PhaseState ev = rk4_step(obj, p, s, dt);
                ev.t = s.t + dt;
                res.states.push_back(ev);
                res.restart_time = ev.t;
                res.termination = Termination::RestartFound;
                return res;
            }
        }

        s = std::move(next);
        res.states.push_back(s);
        if (norm(obj.grad(s.x)) <= opts.gradient_stop_tol) {
            res.termination = Termination::GradientBelowTol;
            return res;
        }
    }

    // Stall guard: the drive term was large enough that a healthy integration
    // must have picked up speed, yet it never did.
    if (max_speed <= kStallSpeedFloor && g0 > opts.gradient_stop_tol &&
        p.gamma * g0 / p.alpha > kStallSpeedFloor)
        throw ZeroSpeedStall("speed stayed below " + format_double(kStallSpeedFloor) +
                             " up to max_time although the initial gradient norm is " +
                             format_double(g0));
    res.termination = Termination::MaxTimeReached;
    return res;
}

}  // namespace

std::pair<Vec, Vec> win_vector_field(const Objective& obj, const SystemParams& p,
                                     const PhaseState& s) {
    validate(p);
    Deriv d = field(obj, p, s.x, s.v);
    return {std::move(d.dx), std::move(d.dv)};
}

double speed_derivative(const Objective& obj, const SystemParams& p, const PhaseState& s) {
    const Deriv d = field(obj, p, s.x, s.v);
    return 2.0 * dot(s.v, d.dv);
}

SegmentResult integrate_until_restart(const Objective& obj, const SystemParams& p, const Vec& z,
                                      const IntegratorOptions& opts) {
    return integrate_impl(obj, p, z, opts, true);
}

SegmentResult integrate_plain(const Objective& obj, const SystemParams& p, const Vec& z,
                              const IntegratorOptions& opts) {
    return integrate_impl(obj, p, z, opts, false);
}

}  // namespace winrestart
