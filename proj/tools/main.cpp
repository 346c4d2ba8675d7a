#include <cstdint>
#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "winrestart/errors.hpp"
#include "winrestart/experiments.hpp"
#include "winrestart/format.hpp"

using namespace winrestart;

namespace {

// Every experiment option exists both as a config-file key and a flag; a
// flag that was actually given wins over the loaded file.
struct CommonOpts {
    std::string config_path;
    int n = 0;
    double rho = 0, alpha = 0, beta = 0, gamma = 0, gamma_eps = 0;
    double fit_lo = 0, fit_hi = 0;
    int gamma_i = 0;
    std::string policy, fit_mode, out_dir, format;
    double horizon = 0, h_ode = 0, event_tol = 0, grad_tol = 0, h = 0;
    bool baseline = false;
    int iters = 0;
    std::uint64_t seed = 0;
    std::vector<double> z0;

    CLI::Option *o_config = nullptr, *o_n = nullptr, *o_rho = nullptr, *o_alpha = nullptr,
                *o_beta = nullptr, *o_gamma = nullptr, *o_gamma_i = nullptr,
                *o_gamma_eps = nullptr, *o_policy = nullptr, *o_fit_mode = nullptr,
                *o_fit_lo = nullptr, *o_fit_hi = nullptr,
                *o_out = nullptr, *o_format = nullptr, *o_horizon = nullptr, *o_h_ode = nullptr,
                *o_event_tol = nullptr, *o_grad_tol = nullptr, *o_h = nullptr,
                *o_baseline = nullptr, *o_iters = nullptr, *o_seed = nullptr, *o_z0 = nullptr;

    void attach(CLI::App* app, bool discrete_opts) {
        o_config = app->add_option("--config", config_path, "config file (key = value lines)");
        o_n = app->add_option("--n", n, "problem dimension");
        o_rho = app->add_option("--rho", rho, "conditioning ratio between weights");
        o_alpha = app->add_option("--alpha", alpha, "viscous damping coefficient");
        o_beta = app->add_option("--beta", beta, "geometric damping coefficient");
        o_gamma = app->add_option("--gamma", gamma, "gradient coefficient (direct form)");
        o_gamma_i = app->add_option("--gamma-i", gamma_i, "oscillation rule: mode index");
        o_gamma_eps = app->add_option("--gamma-eps", gamma_eps, "oscillation rule: margin");
        o_fit_mode = app->add_option("--fit-mode", fit_mode, "regression samples: all | restarts");
        o_fit_lo = app->add_option("--fit-lo", fit_lo, "regression window start (t or k)");
        o_fit_hi = app->add_option("--fit-hi", fit_hi, "regression window end (t or k)");
        o_out = app->add_option("--out", out_dir, "output directory");
        o_format = app->add_option("--format", format, "summary format: csv | json");
        o_seed = app->add_option("--seed", seed, "random seed recorded with the run");
        o_z0 = app->add_option("--z0", z0, "initial point (n numbers)");
        if (discrete_opts) {
            // frees the short -h so the step size can be spelled --h like the
            // config key
            app->set_help_flag("--help", "print help");
            o_policy = app->add_option("--policy", policy,
                                       "restart policy: none | speed | warmstart");
            o_h = app->add_option("--h", h, "iteration step size");
            o_iters = app->add_option("--iters", iters, "number of iterations");
        } else {
            o_horizon = app->add_option("--horizon", horizon, "integration horizon");
            o_h_ode = app->add_option("--h-ode", h_ode, "integrator step size");
            o_event_tol = app->add_option("--event-tol", event_tol,
                                          "restart time resolution");
            o_grad_tol = app->add_option("--grad-tol", grad_tol,
                                         "stop when the gradient norm falls below this");
            o_baseline = app->add_flag("--baseline", baseline,
                                       "also integrate without restarts");
        }
    }

    ExperimentConfig build(const std::string& mode) const {
        ExperimentConfig cfg;
        if (o_config->count()) cfg = load_config(config_path);
        cfg.mode = mode;
        if (o_n->count()) cfg.n = n;
        if (o_rho->count()) cfg.rho = rho;
        if (o_alpha->count()) cfg.alpha = alpha;
        if (o_beta->count()) cfg.beta = beta;
        if (o_gamma->count()) {
            cfg.gamma = gamma;
            cfg.gamma_i.reset();
            cfg.gamma_eps.reset();
        }
        if (o_gamma_i->count()) {
            cfg.gamma_i = gamma_i;
            cfg.gamma.reset();
        }
        if (o_gamma_eps->count()) {
            cfg.gamma_eps = gamma_eps;
            cfg.gamma.reset();
        }
        if (o_fit_mode->count()) cfg.fit_mode = fit_mode;
        if (o_fit_lo->count()) cfg.fit_lo = fit_lo;
        if (o_fit_hi->count()) cfg.fit_hi = fit_hi;
        if (o_out->count()) cfg.out_dir = out_dir;
        if (o_format->count()) cfg.format = format;
        if (o_seed->count()) cfg.seed = seed;
        if (o_z0->count()) cfg.z0 = z0;
        if (o_policy && o_policy->count()) cfg.policy = policy;
        if (o_h && o_h->count()) cfg.h = h;
        if (o_iters && o_iters->count()) cfg.iters = iters;
        if (o_horizon && o_horizon->count()) cfg.horizon = horizon;
        if (o_h_ode && o_h_ode->count()) cfg.h_ode = h_ode;
        if (o_event_tol && o_event_tol->count()) cfg.event_tol = event_tol;
        if (o_grad_tol && o_grad_tol->count()) cfg.grad_tol = grad_tol;
        if (o_baseline && o_baseline->count()) cfg.baseline = baseline;
        return cfg;
    }
};

nlohmann::json config_to_json(const ExperimentConfig& cfg) {
    nlohmann::json j;
    j["n"] = cfg.n;
    j["rho"] = cfg.rho;
    j["alpha"] = cfg.alpha;
    j["beta"] = cfg.beta;
    if (cfg.gamma) j["gamma"] = *cfg.gamma; else j["gamma"] = nullptr;
    if (cfg.gamma_i) j["gamma_i"] = *cfg.gamma_i; else j["gamma_i"] = nullptr;
    if (cfg.gamma_eps) j["gamma_eps"] = *cfg.gamma_eps; else j["gamma_eps"] = nullptr;
    j["mode"] = cfg.mode;
    j["policy"] = cfg.policy;
    j["horizon"] = cfg.horizon;
    j["h_ode"] = cfg.h_ode;
    j["event_tol"] = cfg.event_tol;
    j["grad_tol"] = cfg.grad_tol;
    j["baseline"] = cfg.baseline;
    j["h"] = cfg.h;
    j["iters"] = cfg.iters;
    j["fit_mode"] = cfg.fit_mode;
    if (cfg.fit_lo) j["fit_lo"] = *cfg.fit_lo; else j["fit_lo"] = nullptr;
    if (cfg.fit_hi) j["fit_hi"] = *cfg.fit_hi; else j["fit_hi"] = nullptr;
    j["out"] = cfg.out_dir;
    j["format"] = cfg.format;
    j["seed"] = cfg.seed;
    j["z0"] = cfg.z0;
    return j;
}

nlohmann::json fit_to_json(const std::optional<RegressionFit>& fit) {
    if (!fit) return nullptr;
    return {{"A", fit->A},
            {"B", fit->B},
            {"r_squared", fit->r_squared},
            {"window_lo", fit->window_lo},
            {"window_hi", fit->window_hi},
            {"n_used", fit->n_used}};
}

nlohmann::json bounds_to_json(const TheoreticalBounds& b) {
    return {{"tau1", b.tau1},     {"tau2", b.tau2},           {"tau3", b.tau3},
            {"tau_star", b.tau_star}, {"tau_upper", b.tau_upper}, {"Q", b.Q},
            {"C", b.C},           {"K", b.K}};
}

nlohmann::json paths_to_json(const std::vector<std::filesystem::path>& files) {
    nlohmann::json j = nlohmann::json::array();
    for (const auto& f : files) j.push_back(f.string());
    return j;
}

int cmd_simulate(const CommonOpts& opts) {
    const ExperimentConfig cfg = opts.build("continuous");
    const ContinuousRun run = run_continuous(cfg);
    const auto files = write_continuous_outputs(run, cfg.out_dir, "trajectory");

    if (cfg.format == "json") {
        nlohmann::json j;
        j["config"] = config_to_json(cfg);
        j["gamma"] = run.gamma;
        j["already_optimal"] = run.already_optimal;
        j["cycles"] = run.stats.count;
        j["interval_mean"] = run.stats.count ? nlohmann::json(run.stats.mean) : nullptr;
        j["interval_variance"] =
            run.stats.count ? nlohmann::json(run.stats.variance) : nullptr;
        j["fit"] = fit_to_json(run.fit);
        j["bounds"] = bounds_to_json(run.bounds);
        j["files"] = paths_to_json(files);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (run.already_optimal) {
        std::cout << "already optimal at the initial point; nothing to integrate\n";
    } else {
        std::cout << "gamma = " << format_double(run.gamma) << '\n';
        std::cout << "restarts = " << run.trajectory.restart_times.size() << '\n';
        if (run.stats.count) {
            std::cout << "interval mean = " << format_double(run.stats.mean) << '\n';
            std::cout << "interval variance = " << format_double(run.stats.variance) << '\n';
        }
        if (run.fit) {
            std::cout << "fit A = " << format_double(run.fit->A) << '\n';
            std::cout << "fit B = " << format_double(run.fit->B) << '\n';
            std::cout << "fit r_squared = " << format_double(run.fit->r_squared) << '\n';
        }
        std::cout << "bound tau3 = " << format_double(run.bounds.tau3) << '\n';
        std::cout << "bound tau_upper = " << format_double(run.bounds.tau_upper) << '\n';
        std::cout << "bound Q = " << format_double(run.bounds.Q) << '\n';
    }
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    return 0;
}

int cmd_discrete(const CommonOpts& opts) {
    const ExperimentConfig cfg = opts.build("discrete");
    const DiscreteRun run = run_discrete(cfg, parse_policy(cfg.policy));
    for (const std::string& w : run.warnings) std::cerr << "warning: " << w << '\n';
    const auto files =
        write_discrete_outputs(run, cfg.out_dir, "iterates_" + std::string(policy_name(run.policy)));

    if (cfg.format == "json") {
        nlohmann::json j;
        j["config"] = config_to_json(cfg);
        j["gamma"] = run.gamma;
        j["policy"] = policy_name(run.policy);
        j["already_optimal"] = run.already_optimal;
        j["iterations"] = run.records.empty() ? 0 : run.records.size() - 1;
        int restarts = 0;
        for (const IterateRecord& r : run.records) restarts += r.restarted ? 1 : 0;
        j["restarts"] = restarts;
        j["final_gap"] = run.records.empty() ? nullptr : nlohmann::json(run.records.back().f_gap);
        j["fit"] = fit_to_json(run.fit);
        j["warnings"] = run.warnings;
        j["files"] = paths_to_json(files);
        std::cout << j.dump(2) << '\n';
        return 0;
    }

    if (run.already_optimal) std::cout << "already optimal at the initial point\n";
    std::cout << "gamma = " << format_double(run.gamma) << '\n';
    std::cout << "policy = " << policy_name(run.policy) << '\n';
    if (!run.records.empty())
        std::cout << "final gap = " << format_double(run.records.back().f_gap) << '\n';
    if (run.fit) {
        std::cout << "fit A = " << format_double(run.fit->A) << '\n';
        std::cout << "fit B = " << format_double(run.fit->B) << '\n';
        std::cout << "fit r_squared = " << format_double(run.fit->r_squared) << '\n';
    }
    for (const auto& f : files) std::cout << "wrote " << f.string() << '\n';
    return 0;
}

int cmd_theory(double alpha, double beta, double gamma, double L, double mu,
               const std::string& format) {
    if (mu > L)
        std::cerr << "warning: mu > L cannot hold for a smooth objective with these "
                     "constants; results may be vacuous\n";
    const SystemParams p{alpha, beta, gamma};
    validate(p);
    const TheoreticalBounds b = compute_bounds(p, L, mu);
    if (format == "json") {
        std::cout << bounds_to_json(b).dump(2) << '\n';
        return 0;
    }
    auto line = [](const char* name, double v) {
        std::printf("%s = %.12g\n", name, v);
    };
    line("tau1", b.tau1);
    line("tau2", b.tau2);
    line("tau3", b.tau3);
    line("tau_star", b.tau_star);
    line("tau_upper", b.tau_upper);
    line("Q", b.Q);
    line("C", b.C);
    line("K", b.K);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"speed-restarted inertial dynamics with Hessian-driven damping"};
    app.require_subcommand(1);

    CLI::App* sim = app.add_subcommand("simulate", "integrate the restarted trajectory");
    CommonOpts sim_opts;
    sim_opts.attach(sim, false);

    CLI::App* disc = app.add_subcommand("discrete", "run the inertial gradient iteration");
    CommonOpts disc_opts;
    disc_opts.attach(disc, true);

    CLI::App* theo = app.add_subcommand("theory", "restart-time bounds and decay constants");
    double t_alpha = 3.0, t_beta = 0.0, t_gamma = 1.0, t_L = 1.0, t_mu = 1.0;
    std::string t_format = "text";
    theo->add_option("--alpha", t_alpha, "viscous damping coefficient");
    theo->add_option("--beta", t_beta, "geometric damping coefficient");
    theo->add_option("--gamma", t_gamma, "gradient coefficient")->required();
    theo->add_option("--L", t_L, "smoothness constant");
    theo->add_option("--mu", t_mu, "PL constant");
    theo->add_option("--format", t_format, "text | json");

    CLI::App* rep = app.add_subcommand("reproduce-paper", "run the full experiment grid");
    ReproduceOptions rep_opts;
    std::string rep_out = "out";
    rep->add_option("--out", rep_out, "output directory");
    rep->add_option("--threads", rep_opts.threads, "worker threads (0: auto)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (*sim) return cmd_simulate(sim_opts);
        if (*disc) return cmd_discrete(disc_opts);
        if (*theo) return cmd_theory(t_alpha, t_beta, t_gamma, t_L, t_mu, t_format);
        if (*rep) {
            rep_opts.out_dir = rep_out;
            const ReproduceReport report = run_reproduce_paper(rep_opts);
            std::cout << report_to_text(report);
            return report.any_error() ? 1 : 0;
        }
    } catch (const ConfigError& e) {
        std::cerr << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
