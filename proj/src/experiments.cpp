#include "winrestart/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "winrestart/errors.hpp"
#include "winrestart/format.hpp"
#include "winrestart/objective.hpp"

namespace winrestart {

namespace {

Objective objective_from(const ExperimentConfig& cfg) {
    return make_power_quadratic({cfg.n, cfg.rho});
}

IntegratorOptions integrator_options(const ExperimentConfig& cfg) {
    IntegratorOptions opts;
    opts.h_ode = cfg.h_ode;
    opts.event_tolerance = cfg.event_tol;
    opts.gradient_stop_tol = cfg.grad_tol;
    opts.max_time = cfg.horizon;
    return opts;
}

std::vector<TrajectorySample> samples_from_segment(const Objective& obj,
                                                   const SegmentResult& seg) {
    std::vector<TrajectorySample> out;
    out.reserve(seg.states.size());
    for (const PhaseState& st : seg.states)
        out.push_back({st.t, obj.gap(st.x), norm(st.v), false});
    return out;
}

std::vector<std::pair<double, double>> fit_series(const ExperimentConfig& cfg,
                                                  const std::vector<TrajectorySample>& samples) {
    auto series = cfg.fit_mode == "restarts" ? gap_series_restarts(samples) : gap_series(samples);
    if (cfg.fit_lo || cfg.fit_hi) {
        const double lo = cfg.fit_lo.value_or(0.0);
        const double hi = cfg.fit_hi.value_or(std::numeric_limits<double>::infinity());
        std::erase_if(series, [&](const auto& p) { return p.first < lo || p.first > hi; });
    }
    return series;
}

}  // namespace

ContinuousRun run_continuous(const ExperimentConfig& cfg) {
    validate_config(cfg);
    ContinuousRun run;
    run.cfg = cfg;
    run.gamma = resolved_gamma(cfg);
    const Objective obj = objective_from(cfg);
    const SystemParams p{cfg.alpha, cfg.beta, run.gamma};
    run.bounds = compute_bounds(p, obj.lipschitz, obj.pl_mu);

    const IntegratorOptions opts = integrator_options(cfg);
    run.trajectory = run_restarted(obj, p, cfg.z0, cfg.horizon, opts);
    run.already_optimal = run.trajectory.samples.size() <= 1 &&
                          run.trajectory.terminated_reason == Termination::GradientBelowTol;
    if (!run.trajectory.intervals.empty()) run.stats = interval_stats(run.trajectory.intervals);
    try {
        run.fit = fit_exponential(fit_series(cfg, run.trajectory.samples));
    } catch (const InsufficientData&) {
    }
    if (cfg.baseline)
        run.baseline = samples_from_segment(obj, integrate_plain(obj, p, cfg.z0, opts));
    return run;
}

DiscreteRun run_discrete(const ExperimentConfig& cfg, RestartPolicy policy) {
    validate_config(cfg);
    DiscreteRun run;
    run.cfg = cfg;
    run.gamma = resolved_gamma(cfg);
    run.policy = policy;
    const Objective obj = objective_from(cfg);

    DiscreteConfig dc;
    dc.params = {cfg.alpha, cfg.beta, run.gamma};
    dc.h = cfg.h;
    dc.max_iters = cfg.iters;
    dc.policy = policy;
    run.warnings = discrete_sanity_warnings(dc, obj.lipschitz);
    run.records = run_algorithm(obj, dc, cfg.z0);
    run.already_optimal = cfg.iters > 0 && run.records.size() <= 1;
    try {
        run.fit = fit_exponential(fit_series(cfg, to_samples(run.records)));
    } catch (const InsufficientData&) {
    }
    return run;
}

namespace {

void plot_samples(const std::vector<TrajectorySample>& samples,
                  const std::filesystem::path& svg, const std::string& title,
                  const std::string& x_label, std::optional<EnvelopeOverlay> envelope,
                  std::vector<std::filesystem::path>& files) {
    bool any_positive = false;
    for (const TrajectorySample& s : samples)
        if (s.f_gap > 0.0) {
            any_positive = true;
            break;
        }
    if (!any_positive) return;
    PlotStyle style;
    style.title = title;
    style.x_label = x_label;
    style.envelope = envelope;
    emit_plot(samples, svg, style);
    files.push_back(svg);
}

}  // namespace

std::vector<std::filesystem::path> write_continuous_outputs(
    const ContinuousRun& run, const std::filesystem::path& out_dir, const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;
    const auto csv = out_dir / (stem + ".csv");
    export_csv(run.trajectory.samples, csv);
    files.push_back(csv);

    std::optional<EnvelopeOverlay> env;
    if (!run.trajectory.samples.empty() && run.trajectory.samples.front().f_gap > 0.0)
        env = EnvelopeOverlay{run.bounds.C, run.bounds.K, run.trajectory.samples.front().f_gap};
    plot_samples(run.trajectory.samples, out_dir / (stem + ".svg"), stem, "t", env, files);

    if (run.baseline) {
        const auto bcsv = out_dir / (stem + "_baseline.csv");
        export_csv(*run.baseline, bcsv);
        files.push_back(bcsv);
        plot_samples(*run.baseline, out_dir / (stem + "_baseline.svg"), stem + " baseline", "t",
                     std::nullopt, files);
    }
    return files;
}

std::vector<std::filesystem::path> write_discrete_outputs(const DiscreteRun& run,
                                                          const std::filesystem::path& out_dir,
                                                          const std::string& stem) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::filesystem::path> files;
    const auto csv = out_dir / (stem + ".csv");
    export_csv(run.records, csv);
    files.push_back(csv);
    plot_samples(to_samples(run.records), out_dir / (stem + ".svg"), stem, "k", std::nullopt,
                 files);
    return files;
}

bool ReproduceReport::any_error() const {
    for (const CellOutcome& c : cells)
        if (!c.ok) return true;
    return false;
}

int ReproduceReport::failed_checks() const {
    int n = 0;
    for (const CellOutcome& c : cells)
        for (const CheckResult& ch : c.checks)
            if (!ch.pass) ++n;
    return n;
}

const std::vector<ReferenceEntry>& reference_continuous_B() {
    static const std::vector<ReferenceEntry> v = {
        {0.0, 0.1, 2.99, 0.25}, {0.0, 10.0, 6.62, 0.25},  {0.0, 100.0, 88.51, 0.25},
        {6.0, 0.1, 59.72, 0.25}, {6.0, 10.0, 59.14, 0.25}, {6.0, 100.0, 101.57, 0.25}};
    return v;
}

const std::vector<ReferenceEntry>& reference_interval_mean() {
    static const std::vector<ReferenceEntry> v = {
        {0.0, 0.1, 7.01e-1, 0.15}, {0.0, 10.0, 3.70e-1, 0.15}, {0.0, 100.0, 3.39e-2, 0.15},
        {6.0, 0.1, 3.79e-2, 0.15}, {6.0, 10.0, 3.76e-2, 0.15}, {6.0, 100.0, 2.59e-2, 0.15}};
    return v;
}

const std::vector<ReferenceEntry>& reference_interval_variance() {
    static const std::vector<ReferenceEntry> v = {
        {0.0, 0.1, 3.76e-1, 0.15}, {0.0, 10.0, 3.50e-3, 0.15}, {0.0, 100.0, 3.48e-4, 0.15},
        {6.0, 0.1, 2.85e-4, 0.15}, {6.0, 10.0, 2.79e-4, 0.15}, {6.0, 100.0, 1.51e-4, 0.15}};
    return v;
}

const std::vector<ReferenceEntry>& reference_discrete_B() {
    static const std::vector<ReferenceEntry> v = {
        {6.0, 0.1, 5.46e-2, 0.20}, {6.0, 10.0, 5.55e-2, 0.20}, {6.0, 100.0, 8.52e-2, 0.20}};
    return v;
}

namespace {

const double kEpsValues[3] = {0.1, 10.0, 100.0};
const char* const kEpsLabels[3] = {"0.1", "10", "100"};
const double kBetaValues[2] = {0.0, 6.0};
const char* const kBetaLabels[2] = {"0", "6"};

// Conservative fixed step: respect the stiffest real eigenvalue alpha + beta L
// and the fastest oscillation sqrt(gamma L).
double stable_h(double h_default, double alpha, double beta, double gamma, double L) {
    double h = h_default;
    h = std::min(h, 2.0 / (alpha + beta * L));
    h = std::min(h, 0.2 / std::sqrt(gamma * L));
    return h;
}

ExperimentConfig continuous_cell_config(double beta, double eps) {
    ExperimentConfig c;
    c.n = 3;
    c.rho = 10.0;
    c.alpha = 3.0;
    c.beta = beta;
    c.gamma.reset();
    c.gamma_i = 2;
    c.gamma_eps = eps;
    c.mode = "continuous";
    c.horizon = 5.0;
    c.h_ode = 1e-4;
    c.event_tol = 1e-8;
    c.grad_tol = 0.0;  // run the whole horizon; the interval statistics need every cycle
    c.baseline = true;
    c.z0 = {1.0, 1.0, 1.0};
    // The regression window is an implementation choice (the reference table
    // does not state one). The decay-rate table is fit on t in [0,1], where
    // the transient that distinguishes the cells is still visible; beyond it
    // the slowest mode's cycling dominates every cell equally.
    c.fit_hi = 1.0;
    const double gamma = resolved_gamma(c);
    const double L = std::pow(c.rho, c.n - 1);
    c.h_ode = stable_h(c.h_ode, c.alpha, c.beta, gamma, L);
    return c;
}

ExperimentConfig discrete_cell_config(double eps) {
    ExperimentConfig c;
    c.n = 3;
    c.rho = 10.0;
    c.alpha = 3.0;
    c.beta = 6.0;
    c.gamma.reset();
    c.gamma_i = 2;
    c.gamma_eps = eps;
    c.mode = "discrete";
    c.h = 1e-3;
    c.iters = 3000;
    c.z0 = {1.0, 1.0, 1.0};
    return c;
}

// No-restart conditioning comparison: first oscillating mode, small margin.
ExperimentConfig conditioning_config(double rho, double beta) {
    ExperimentConfig c;
    c.n = 3;
    c.rho = rho;
    c.alpha = 3.0;
    c.beta = beta;
    c.gamma.reset();
    c.gamma_i = 1;
    c.gamma_eps = 0.1;
    c.mode = "continuous";
    c.horizon = 5.0;
    c.h_ode = 1e-4;
    c.event_tol = 1e-8;
    c.grad_tol = 0.0;
    c.baseline = false;
    c.z0 = {1.0, 1.0, 1.0};
    const double gamma = resolved_gamma(c);
    const double L = std::pow(c.rho, c.n - 1);
    c.h_ode = stable_h(c.h_ode, c.alpha, c.beta, gamma, L);
    return c;
}

std::string metric(double v) { return format_double(v); }

CheckResult relative_check(const std::string& name, double got, double ref, double tol) {
    CheckResult r;
    const double rel = std::abs(got - ref) / std::abs(ref);
    r.name = name;
    r.pass = rel <= tol;
    r.detail = "got " + format_double(got) + ", reference " + format_double(ref) +
               ", relative error " + format_double(rel) + ", tolerance " + format_double(tol);
    return r;
}

const ReferenceEntry* find_ref(const std::vector<ReferenceEntry>& refs, double beta,
                               double eps) {
    for (const ReferenceEntry& r : refs)
        if (r.beta == beta && r.eps == eps) return &r;
    return nullptr;
}

struct GridData {
    // indexed [beta][eps]
    std::optional<ContinuousRun> cont[2][3];
    std::optional<DiscreteRun> disc_speed[3];
};

CellOutcome continuous_cell(double beta, std::size_t bi, std::size_t ei,
                            const std::filesystem::path& out_dir, GridData& data) {
    const double eps = kEpsValues[ei];
    CellOutcome out;
    out.name = std::string("continuous beta=") + kBetaLabels[bi] + " eps=" + kEpsLabels[ei];
    try {
        ContinuousRun run = run_continuous(continuous_cell_config(beta, eps));
        const std::string stem =
            std::string("continuous_beta") + kBetaLabels[bi] + "_eps" + kEpsLabels[ei];
        write_continuous_outputs(run, out_dir, stem);

        out.metrics.emplace_back("gamma", metric(run.gamma));
        out.metrics.emplace_back("cycles", std::to_string(run.stats.count));
        out.metrics.emplace_back("interval_mean", metric(run.stats.mean));
        out.metrics.emplace_back("interval_variance", metric(run.stats.variance));
        if (run.fit) {
            out.metrics.emplace_back("A", metric(run.fit->A));
            out.metrics.emplace_back("B", metric(run.fit->B));
            out.metrics.emplace_back("r_squared", metric(run.fit->r_squared));
        }
        out.metrics.emplace_back("tau3", metric(run.bounds.tau3));
        out.metrics.emplace_back("tau_upper", metric(run.bounds.tau_upper));
        out.metrics.emplace_back("Q", metric(run.bounds.Q));

        if (const ReferenceEntry* r = find_ref(reference_interval_mean(), beta, eps))
            out.checks.push_back(
                relative_check("interval mean vs reference", run.stats.mean, r->value, r->rel_tol));
        if (const ReferenceEntry* r = find_ref(reference_interval_variance(), beta, eps))
            out.checks.push_back(relative_check("interval variance vs reference",
                                                run.stats.variance, r->value, r->rel_tol));
        if (run.fit)
            if (const ReferenceEntry* r = find_ref(reference_continuous_B(), beta, eps))
                out.checks.push_back(
                    relative_check("decay rate B vs reference", run.fit->B, r->value, r->rel_tol));
        data.cont[bi][ei] = std::move(run);
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

CellOutcome discrete_cell(std::size_t ei, const std::filesystem::path& out_dir,
                          GridData& data) {
    const double eps = kEpsValues[ei];
    CellOutcome out;
    out.name = std::string("discrete eps=") + kEpsLabels[ei];
    try {
        const ExperimentConfig cfg = discrete_cell_config(eps);
        for (RestartPolicy policy :
             {RestartPolicy::None, RestartPolicy::Speed, RestartPolicy::WarmStart}) {
            DiscreteRun run = run_discrete(cfg, policy);
            const std::string stem = std::string("discrete_eps") + kEpsLabels[ei] + "_" +
                                     policy_name(policy);
            write_discrete_outputs(run, out_dir, stem);
            if (run.fit) {
                out.metrics.emplace_back("A_" + policy_name(policy), metric(run.fit->A));
                out.metrics.emplace_back("B_" + policy_name(policy), metric(run.fit->B));
                out.metrics.emplace_back("r_squared_" + policy_name(policy),
                                         metric(run.fit->r_squared));
            }
            if (policy == RestartPolicy::Speed) {
                if (run.fit)
                    if (const ReferenceEntry* r = find_ref(reference_discrete_B(), 6.0, eps))
                        out.checks.push_back(relative_check("discrete decay rate B vs reference",
                                                            run.fit->B, r->value, r->rel_tol));
                data.disc_speed[ei] = std::move(run);
            }
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

CellOutcome conditioning_cell(double rho, const char* rho_label,
                              const std::filesystem::path& out_dir) {
    CellOutcome out;
    out.name = std::string("conditioning rho=") + rho_label;
    try {
        for (std::size_t bi = 0; bi < 2; ++bi) {
            const ExperimentConfig cfg = conditioning_config(rho, kBetaValues[bi]);
            const Objective obj = make_power_quadratic({cfg.n, cfg.rho});
            const SystemParams p{cfg.alpha, cfg.beta, resolved_gamma(cfg)};
            const SegmentResult seg =
                integrate_plain(obj, p, cfg.z0, integrator_options(cfg));
            const auto samples = samples_from_segment(obj, seg);
            const std::string stem = std::string("conditioning_rho") + rho_label + "_beta" +
                                     kBetaLabels[bi];
            export_csv(samples, out_dir / (stem + ".csv"));
            PlotStyle style;
            style.title = stem;
            emit_plot(samples, out_dir / (stem + ".svg"), style);
            out.metrics.emplace_back(std::string("final_gap_beta") + kBetaLabels[bi],
                                     metric(samples.back().f_gap));
        }
        out.ok = true;
    } catch (const std::exception& e) {
        out.error = e.what();
    }
    return out;
}

CellOutcome ordering_cell(const GridData& data) {
    CellOutcome out;
    out.name = "orderings";
    out.ok = true;
    for (std::size_t ei = 0; ei < 3; ++ei) {
        const auto& r0 = data.cont[0][ei];
        const auto& r6 = data.cont[1][ei];
        CheckResult c;
        c.name = std::string("B(beta=6) > B(beta=0) at eps=") + kEpsLabels[ei];
        if (r0 && r6 && r0->fit && r6->fit) {
            c.pass = r6->fit->B > r0->fit->B;
            c.detail = format_double(r6->fit->B) + " vs " + format_double(r0->fit->B);
        } else {
            c.detail = "missing fits";
        }
        out.checks.push_back(c);
    }
    for (std::size_t ei = 0; ei + 1 < 3; ++ei) {
        const auto& lo = data.cont[0][ei];
        const auto& hi = data.cont[0][ei + 1];
        CheckResult c;
        c.name = std::string("beta=0: B increases from eps=") + kEpsLabels[ei] + " to " +
                 kEpsLabels[ei + 1];
        if (lo && hi && lo->fit && hi->fit) {
            c.pass = hi->fit->B > lo->fit->B;
            c.detail = format_double(hi->fit->B) + " vs " + format_double(lo->fit->B);
        } else {
            c.detail = "missing fits";
        }
        out.checks.push_back(c);
    }
    {
        const auto& d10 = data.disc_speed[1];
        const auto& d100 = data.disc_speed[2];
        CheckResult c;
        c.name = "discrete: B(eps=100) > B(eps=10)";
        if (d10 && d100 && d10->fit && d100->fit) {
            c.pass = d100->fit->B > d10->fit->B;
            c.detail = format_double(d100->fit->B) + " vs " + format_double(d10->fit->B);
        } else {
            c.detail = "missing fits";
        }
        out.checks.push_back(c);
    }
    return out;
}

int resolve_threads(int requested, std::size_t n_jobs) {
    int t = requested;
    if (t <= 0)
        if (const char* env = std::getenv("WINRESTART_THREADS")) t = std::atoi(env);
    if (t <= 0) t = static_cast<int>(std::thread::hardware_concurrency());
    if (t <= 0) t = 1;
    return std::min<int>(t, static_cast<int>(n_jobs));
}

void write_tables(const GridData& data, const std::filesystem::path& out_dir) {
    {
        std::ofstream out(out_dir / "table1_regression.csv", std::ios::binary);
        out << "beta,eps,gamma,A,B,r_squared,window_lo,window_hi\n";
        for (std::size_t bi = 0; bi < 2; ++bi)
            for (std::size_t ei = 0; ei < 3; ++ei) {
                const auto& run = data.cont[bi][ei];
                if (!run || !run->fit) continue;
                out << kBetaLabels[bi] << ',' << kEpsLabels[ei] << ','
                    << format_double(run->gamma) << ',' << format_double(run->fit->A) << ','
                    << format_double(run->fit->B) << ',' << format_double(run->fit->r_squared)
                    << ',' << format_double(run->fit->window_lo) << ','
                    << format_double(run->fit->window_hi) << '\n';
            }
    }
    {
        std::ofstream out(out_dir / "table2_intervals.csv", std::ios::binary);
        out << "beta,eps,count,mean,variance\n";
        for (std::size_t bi = 0; bi < 2; ++bi)
            for (std::size_t ei = 0; ei < 3; ++ei) {
                const auto& run = data.cont[bi][ei];
                if (!run) continue;
                out << kBetaLabels[bi] << ',' << kEpsLabels[ei] << ',' << run->stats.count << ','
                    << format_double(run->stats.mean) << ','
                    << format_double(run->stats.variance) << '\n';
            }
    }
    {
        std::ofstream out(out_dir / "table3_discrete.csv", std::ios::binary);
        out << "eps,A,B,r_squared,window_lo,window_hi\n";
        for (std::size_t ei = 0; ei < 3; ++ei) {
            const auto& run = data.disc_speed[ei];
            if (!run || !run->fit) continue;
            out << kEpsLabels[ei] << ',' << format_double(run->fit->A) << ','
                << format_double(run->fit->B) << ',' << format_double(run->fit->r_squared)
                << ',' << format_double(run->fit->window_lo) << ','
                << format_double(run->fit->window_hi) << '\n';
        }
    }
}

}  // namespace

ReproduceReport run_reproduce_paper(const ReproduceOptions& opts) {
    std::filesystem::create_directories(opts.out_dir);
    GridData data;
    ReproduceReport report;

    std::vector<std::function<CellOutcome()>> jobs;
    for (std::size_t bi = 0; bi < 2; ++bi)
        for (std::size_t ei = 0; ei < 3; ++ei)
            jobs.emplace_back([&, bi, ei] {
                return continuous_cell(kBetaValues[bi], bi, ei, opts.out_dir, data);
            });
    for (std::size_t ei = 0; ei < 3; ++ei)
        jobs.emplace_back([&, ei] { return discrete_cell(ei, opts.out_dir, data); });
    jobs.emplace_back([&] { return conditioning_cell(10.0, "10", opts.out_dir); });
    jobs.emplace_back([&] { return conditioning_cell(100.0, "100", opts.out_dir); });

    std::vector<CellOutcome> outcomes(jobs.size());
    const int n_threads = resolve_threads(opts.threads, jobs.size());
    if (n_threads <= 1) {
        for (std::size_t i = 0; i < jobs.size(); ++i) outcomes[i] = jobs[i]();
    } else {
        std::atomic<std::size_t> next{0};
        auto worker = [&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= jobs.size()) return;
                outcomes[i] = jobs[i]();
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(n_threads));
        for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    report.cells = std::move(outcomes);
    report.cells.push_back(ordering_cell(data));
    write_tables(data, opts.out_dir);

    {
        std::ofstream out(opts.out_dir / "report.txt", std::ios::binary);
        out << report_to_text(report);
    }
    {
        std::ofstream out(opts.out_dir / "report.json", std::ios::binary);
        out << report_to_json(report) << '\n';
    }
    return report;
}

std::string report_to_text(const ReproduceReport& report) {
    std::ostringstream out;
    int n_checks = 0, n_pass = 0;
    for (const CellOutcome& cell : report.cells) {
        out << "cell: " << cell.name << '\n';
        if (!cell.ok) {
            out << "  error: " << cell.error << '\n';
            continue;
        }
        for (const auto& [k, v] : cell.metrics) out << "  " << k << " = " << v << '\n';
        for (const CheckResult& ch : cell.checks) {
            ++n_checks;
            if (ch.pass) ++n_pass;
            out << "  check: " << ch.name << ": " << (ch.pass ? "PASS" : "FAIL") << " ("
                << ch.detail << ")\n";
        }
    }
    out << "summary: " << report.cells.size() << " cells, "
        << (report.any_error() ? "with errors" : "no errors") << ", " << n_pass << '/'
        << n_checks << " checks passed\n";
    return out.str();
}

std::string report_to_json(const ReproduceReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const CellOutcome& cell : report.cells) {
        nlohmann::json c;
        c["name"] = cell.name;
        c["ok"] = cell.ok;
        if (!cell.ok) c["error"] = cell.error;
        nlohmann::json metrics = nlohmann::json::object();
        for (const auto& [k, v] : cell.metrics) metrics[k] = v;
        c["metrics"] = metrics;
        nlohmann::json checks = nlohmann::json::array();
        for (const CheckResult& ch : cell.checks)
            checks.push_back({{"name", ch.name}, {"pass", ch.pass}, {"detail", ch.detail}});
        c["checks"] = checks;
        cells.push_back(c);
    }
    nlohmann::json root;
    root["cells"] = cells;
    root["any_error"] = report.any_error();
    root["failed_checks"] = report.failed_checks();
    return root.dump(2);
}

}  // namespace winrestart
