#pragma once

#include <vector>

#include "winrestart/dynamics.hpp"

namespace winrestart {

struct TrajectorySample {
    double t = 0.0;
    double f_gap = 0.0;
    double speed = 0.0;
    bool restarted = false;  // this sample is the end of a completed cycle
};

// Speed-restarted trajectory: cycles of integrate_until_restart glued
// together, the velocity reset to exactly zero at every restart.
struct RestartedTrajectory {
    std::vector<SegmentResult> segments;
    std::vector<double> restart_times;  // cumulative times S_1 < S_2 < ...
    std::vector<double> intervals;      // cycle durations T_i, completed cycles only
    std::vector<TrajectorySample> samples;
    Termination terminated_reason = Termination::MaxTimeReached;
};

// Runs restart cycles until horizon, a gradient stop, or NoProgress. The
// final partial cycle is truncated at horizon; it appears in samples but not
// in intervals.
RestartedTrajectory run_restarted(const Objective& obj, const SystemParams& p, const Vec& z,
                                  double horizon, const IntegratorOptions& opts);

// Per-cycle ratios (f(z_{i+1}) - f_star) / (f(z_i) - f_star) for completed
// cycles; cycles whose start gap is at or below 1e-30 are skipped.
std::vector<double> verify_cycle_contraction(const RestartedTrajectory& traj,
                                             const Objective& obj);

}  // namespace winrestart
