#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "winrestart/discrete.hpp"
#include "winrestart/restart.hpp"

namespace winrestart {

// Least-squares fit of ln(gap) against time, reported as gap ~ A e^(-B t).
struct RegressionFit {
    double A = 0.0;
    double B = 0.0;
    double r_squared = 0.0;
    double window_lo = 0.0;  // time range of the samples actually used
    double window_hi = 0.0;
    std::size_t n_used = 0;
};

// Fits on samples whose gap exceeds 1e-30; throws InsufficientData when
// fewer than two remain.
RegressionFit fit_exponential(const std::vector<std::pair<double, double>>& samples);

struct IntervalStats {
    std::size_t count = 0;
    double mean = 0.0;
    double variance = 0.0;  // population variance unless sample_variance was set
};

IntervalStats interval_stats(const std::vector<double>& intervals,
                             bool sample_variance = false);

// CSV with 17-significant-digit decimals; header t,f_gap,speed,restarted.
void export_csv(const std::vector<TrajectorySample>& samples,
                const std::filesystem::path& path);
// Header k,f_gap,step_norm,restarted.
void export_csv(const std::vector<IterateRecord>& records, const std::filesystem::path& path);

struct EnvelopeOverlay {
    double C = 1.0;
    double K = 0.0;
    double gap0 = 1.0;  // envelope value at t=0 is C * gap0
};

struct PlotStyle {
    std::string title;
    std::string x_label = "t";
    int width = 900;
    int height = 560;
    std::optional<EnvelopeOverlay> envelope;
};

// Deterministic self-contained SVG: the gap series on a log10 axis as a
// single polyline, restart markers as circles, the envelope as a dashed
// path. Throws EmptyInput when there is nothing to plot.
void emit_plot(const std::vector<TrajectorySample>& samples, const std::filesystem::path& path,
               const PlotStyle& style);

// Adapter mapping iteration index to the time axis and the step norm to the
// speed column.
std::vector<TrajectorySample> to_samples(const std::vector<IterateRecord>& records);

std::vector<std::pair<double, double>> gap_series(const std::vector<TrajectorySample>& samples);
// Only the first sample and the ends of completed cycles.
std::vector<std::pair<double, double>> gap_series_restarts(
    const std::vector<TrajectorySample>& samples);

}  // namespace winrestart
