#include "winrestart/restart.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"

namespace winrestart {

RestartedTrajectory run_restarted(const Objective& obj, const SystemParams& p, const Vec& z,
                                  double horizon, const IntegratorOptions& opts) {
    if (!(horizon > 0.0)) throw std::invalid_argument("run_restarted: horizon must be > 0");

    RestartedTrajectory out;
    Vec z_cur = z;
    double t_base = 0.0;
    double cycle_gap = obj.gap(z);
    int stagnant = 0;

    while (t_base < horizon) {
        IntegratorOptions local = opts;
        local.max_time = std::min(opts.max_time, horizon - t_base);
        // Keep the option invariants intact for a sliver of remaining time.
        local.h_ode = std::min(opts.h_ode, local.max_time);
        local.event_tolerance = std::min(opts.event_tolerance, 0.5 * local.h_ode);

        SegmentResult seg = integrate_until_restart(obj, p, z_cur, local);

        const bool first = out.segments.empty();
        for (std::size_t k = first ? 0 : 1; k < seg.states.size(); ++k) {
            const PhaseState& st = seg.states[k];
            out.samples.push_back({t_base + st.t, obj.gap(st.x), norm(st.v), false});
        }

        if (seg.termination != Termination::RestartFound) {
            out.terminated_reason = seg.termination;
            out.segments.push_back(std::move(seg));
            return out;
        }

        out.samples.back().restarted = true;
        const double ti = *seg.restart_time;
        t_base += ti;
        out.restart_times.push_back(t_base);
        out.intervals.push_back(ti);
        z_cur = seg.states.back().x;  // restart from the event point, velocity zeroed
        out.segments.push_back(std::move(seg));

        const double new_gap = obj.gap(z_cur);
        if (cycle_gap > 0.0 && cycle_gap - new_gap < 1e-16 * cycle_gap)
            ++stagnant;
        else
            stagnant = 0;
        if (stagnant >= 2)
            throw NoProgress("two consecutive cycles reduced the objective gap by less than "
                             "1e-16 relative near t = " + format_double(t_base));
        cycle_gap = new_gap;
    }

    out.terminated_reason = Termination::MaxTimeReached;
    return out;
}

std::vector<double> verify_cycle_contraction(const RestartedTrajectory& traj,
                                             const Objective& obj) {
    std::vector<double> ratios;
    if (traj.segments.empty()) return ratios;
    double start_gap = obj.gap(traj.segments.front().states.front().x);
    for (const SegmentResult& seg : traj.segments) {
        if (seg.termination != Termination::RestartFound) break;
        const double end_gap = obj.gap(seg.states.back().x);
        if (start_gap > 1e-30) ratios.push_back(end_gap / start_gap);
        start_gap = end_gap;
    }
    return ratios;
}

}  // namespace winrestart
