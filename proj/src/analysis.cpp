#include "winrestart/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"

namespace winrestart {

namespace {

constexpr double kGapFloor = 1e-30;

std::ofstream open_out(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // binary: identical bytes on every platform
    if (!out) throw Error("cannot open '" + path.string() + "' for writing");
    return out;
}

}  // namespace

RegressionFit fit_exponential(const std::vector<std::pair<double, double>>& samples) {
    std::vector<std::pair<double, double>> used;
    used.reserve(samples.size());
    for (const auto& [t, gap] : samples)
        if (gap > kGapFloor) used.emplace_back(t, std::log(gap));
    if (used.size() < 2)
        throw InsufficientData("fit_exponential: need at least two samples above 1e-30");

    double mt = 0.0, my = 0.0;
    for (const auto& [t, y] : used) {
        mt += t;
        my += y;
    }
    mt /= static_cast<double>(used.size());
    my /= static_cast<double>(used.size());

    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (const auto& [t, y] : used) {
        stt += (t - mt) * (t - mt);
        sty += (t - mt) * (y - my);
        syy += (y - my) * (y - my);
    }
    if (stt == 0.0)
        throw InsufficientData("fit_exponential: samples share a single time value");

    const double slope = sty / stt;
    RegressionFit fit;
    fit.A = std::exp(my - slope * mt);
    fit.B = -slope;
    fit.r_squared = syy == 0.0 ? 1.0 : (sty * sty) / (stt * syy);
    auto [lo, hi] = std::minmax_element(used.begin(), used.end());
    fit.window_lo = lo->first;
    fit.window_hi = hi->first;
    fit.n_used = used.size();
    return fit;
}

IntervalStats interval_stats(const std::vector<double>& intervals, bool sample_variance) {
    if (intervals.empty()) throw EmptyInput("interval_stats: no intervals");
    IntervalStats st;
    st.count = intervals.size();
    // Welford's recurrence; immune to the cancellation of the naive sum of squares.
    double mean = 0.0, m2 = 0.0;
    std::size_t n = 0;
    for (double x : intervals) {
        ++n;
        const double d = x - mean;
        mean += d / static_cast<double>(n);
        m2 += d * (x - mean);
    }
    st.mean = mean;
    if (sample_variance) {
        if (n < 2) throw InsufficientData("interval_stats: sample variance needs two values");
        st.variance = m2 / static_cast<double>(n - 1);
    } else {
        st.variance = m2 / static_cast<double>(n);
    }
    return st;
}

void export_csv(const std::vector<TrajectorySample>& samples,
                const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "t,f_gap,speed,restarted\n";
    for (const TrajectorySample& s : samples)
        out << format_double(s.t) << ',' << format_double(s.f_gap) << ','
            << format_double(s.speed) << ',' << (s.restarted ? 1 : 0) << '\n';
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

void export_csv(const std::vector<IterateRecord>& records, const std::filesystem::path& path) {
    std::ofstream out = open_out(path);
    out << "k,f_gap,step_norm,restarted\n";
    for (const IterateRecord& r : records)
        out << r.k << ',' << format_double(r.f_gap) << ',' << format_double(r.step_norm) << ','
            << (r.restarted ? 1 : 0) << '\n';
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

std::vector<TrajectorySample> to_samples(const std::vector<IterateRecord>& records) {
    std::vector<TrajectorySample> out;
    out.reserve(records.size());
    for (const IterateRecord& r : records)
        out.push_back({static_cast<double>(r.k), r.f_gap, r.step_norm, r.restarted});
    return out;
}

std::vector<std::pair<double, double>> gap_series(const std::vector<TrajectorySample>& samples) {
    std::vector<std::pair<double, double>> out;
    out.reserve(samples.size());
    for (const TrajectorySample& s : samples) out.emplace_back(s.t, s.f_gap);
    return out;
}

std::vector<std::pair<double, double>> gap_series_restarts(
    const std::vector<TrajectorySample>& samples) {
    std::vector<std::pair<double, double>> out;
    for (std::size_t i = 0; i < samples.size(); ++i)
        if (i == 0 || samples[i].restarted) out.emplace_back(samples[i].t, samples[i].f_gap);
    return out;
}

namespace {

struct AxisMap {
    double t0, t1, g0, g1;  // data ranges; g in log10
    double x0, x1, y0, y1;  // pixel ranges, y0 is the bottom
    double px(double t) const { return x0 + (t - t0) / (t1 - t0) * (x1 - x0); }
    double py(double lg) const { return y0 - (lg - g0) / (g1 - g0) * (y0 - y1); }
};

std::string fmt_px(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 2);
    return std::string(buf, res.ptr);
}

}  // namespace

void emit_plot(const std::vector<TrajectorySample>& samples, const std::filesystem::path& path,
               const PlotStyle& style) {
    std::vector<const TrajectorySample*> pos;
    for (const TrajectorySample& s : samples)
        if (s.f_gap > 0.0) pos.push_back(&s);
    if (pos.empty()) throw EmptyInput("emit_plot: no positive samples to draw");

    double t0 = pos.front()->t, t1 = pos.front()->t;
    double g0 = std::log10(pos.front()->f_gap), g1 = g0;
    for (const TrajectorySample* s : pos) {
        t0 = std::min(t0, s->t);
        t1 = std::max(t1, s->t);
        const double lg = std::log10(s->f_gap);
        g0 = std::min(g0, lg);
        g1 = std::max(g1, lg);
    }
    if (style.envelope) {
        const EnvelopeOverlay& e = *style.envelope;
        g1 = std::max(g1, std::log10(e.C * e.gap0));
    }
    if (t1 == t0) t1 = t0 + 1.0;
    if (g1 == g0) g1 = g0 + 1.0;

    const double w = style.width, h = style.height;
    const AxisMap m{t0, t1, g0, g1, 70.0, w - 20.0, h - 45.0, 30.0};

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << style.width << "\" height=\""
        << style.height << "\" viewBox=\"0 0 " << style.width << ' ' << style.height << "\">\n";
    out << "<rect width=\"" << style.width << "\" height=\"" << style.height
        << "\" fill=\"white\"/>\n";
    if (!style.title.empty())
        out << "<text x=\"" << fmt_px(w / 2) << "\" y=\"18\" text-anchor=\"middle\" "
               "font-family=\"sans-serif\" font-size=\"14\">" << style.title << "</text>\n";

    // axes
    out << "<line x1=\"" << fmt_px(m.x0) << "\" y1=\"" << fmt_px(m.y0) << "\" x2=\""
        << fmt_px(m.x1) << "\" y2=\"" << fmt_px(m.y0) << "\" stroke=\"black\"/>\n";
    out << "<line x1=\"" << fmt_px(m.x0) << "\" y1=\"" << fmt_px(m.y0) << "\" x2=\""
        << fmt_px(m.x0) << "\" y2=\"" << fmt_px(m.y1) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << fmt_px((m.x0 + m.x1) / 2) << "\" y=\"" << fmt_px(h - 10.0)
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">"
        << style.x_label << "</text>\n";

    // y ticks on whole decades, at most 12 labels
    const int lg_lo = static_cast<int>(std::ceil(g0));
    const int lg_hi = static_cast<int>(std::floor(g1));
    int stride = 1;
    while ((lg_hi - lg_lo) / stride + 1 > 12) stride *= 2;
    for (int lg = lg_lo; lg <= lg_hi; lg += stride) {
        const double y = m.py(lg);
        out << "<line x1=\"" << fmt_px(m.x0 - 4) << "\" y1=\"" << fmt_px(y) << "\" x2=\""
            << fmt_px(m.x0) << "\" y2=\"" << fmt_px(y) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(m.x0 - 8) << "\" y=\"" << fmt_px(y + 4)
            << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e" << lg
            << "</text>\n";
    }
    // x ticks at the ends
    for (double t : {t0, t1}) {
        const double x = m.px(t);
        out << "<line x1=\"" << fmt_px(x) << "\" y1=\"" << fmt_px(m.y0) << "\" x2=\""
            << fmt_px(x) << "\" y2=\"" << fmt_px(m.y0 + 4) << "\" stroke=\"black\"/>\n";
        out << "<text x=\"" << fmt_px(x) << "\" y=\"" << fmt_px(m.y0 + 18)
            << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
            << format_double(t) << "</text>\n";
    }

    if (style.envelope) {
        const EnvelopeOverlay& e = *style.envelope;
        out << "<path fill=\"none\" stroke=\"#c40000\" stroke-dasharray=\"6 4\" d=\"";
        const int n_env = 128;
        for (int j = 0; j <= n_env; ++j) {
            const double t = t0 + (t1 - t0) * j / n_env;
            const double lg = std::log10(e.C * e.gap0) - e.K * t / std::log(10.0);
            out << (j == 0 ? 'M' : 'L') << fmt_px(m.px(t)) << ' '
                << fmt_px(m.py(std::max(lg, g0)));
        }
        out << "\"/>\n";
    }

    out << "<polyline fill=\"none\" stroke=\"#1f4f9f\" stroke-width=\"1.2\" points=\"";
    for (std::size_t i = 0; i < pos.size(); ++i) {
        if (i) out << ' ';
        out << fmt_px(m.px(pos[i]->t)) << ',' << fmt_px(m.py(std::log10(pos[i]->f_gap)));
    }
    out << "\"/>\n";

    for (const TrajectorySample* s : pos)
        if (s->restarted)
            out << "<circle cx=\"" << fmt_px(m.px(s->t)) << "\" cy=\""
                << fmt_px(m.py(std::log10(s->f_gap))) << "\" r=\"2.4\" fill=\"#c47800\"/>\n";

    out << "</svg>\n";
    if (!out) throw Error("write failed for '" + path.string() + "'");
}

}  // namespace winrestart
