// Acceptance gate. Runs ten independent checks over the whole stack and
// prints exactly one [PASS]/[FAIL] line per criterion; the exit code is the
// number of failed criteria. Reference numbers that a criterion compares
// against are restated next to the check.
#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "winrestart/analysis.hpp"
#include "winrestart/discrete.hpp"
#include "winrestart/dynamics.hpp"
#include "winrestart/errors.hpp"
#include "winrestart/objective.hpp"
#include "winrestart/restart.hpp"
#include "winrestart/theory.hpp"

namespace fs = std::filesystem;
using namespace winrestart;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// ---- shared continuous grid -------------------------------------------------
//
// Six cells on the n=3, rho=10 power quadratic (L=100, mu=1) from z0=(1,1,1),
// alpha=3, beta in {0,6}, gamma from the oscillation rule with margin eps in
// {0.1, 10, 100}, horizon 5.
struct Cell {
    double beta = 0.0;
    double eps = 0.0;
    SystemParams params;
    TheoreticalBounds bounds;
    RestartedTrajectory traj;
    std::vector<double> ratios;
};

struct Grid {
    Objective obj;
    std::vector<Cell> cells;
    double run_seconds = 0.0;
};

Grid run_grid() {
    Grid g;
    g.obj = make_power_quadratic({3, 10.0});
    IntegratorOptions opts;
    opts.h_ode = 1e-4;
    opts.event_tolerance = 1e-8;
    opts.max_time = 5.0;
    opts.gradient_stop_tol = 0.0;
    const Vec z0{1.0, 1.0, 1.0};
    const auto t0 = Clock::now();
    for (double beta : {0.0, 6.0}) {
        for (double eps : {0.1, 10.0, 100.0}) {
            Cell c;
            c.beta = beta;
            c.eps = eps;
            c.params = {3.0, beta, gamma_for_oscillation(3.0, beta, 10.0, 2, eps)};
            c.bounds = compute_bounds(c.params, g.obj.lipschitz, g.obj.pl_mu);
            c.traj = run_restarted(g.obj, c.params, z0, 5.0, opts);
            c.ratios = verify_cycle_contraction(c.traj, g.obj);
            g.cells.push_back(std::move(c));
        }
    }
    g.run_seconds = seconds_since(t0);
    return g;
}

std::string cell_tag(const Cell& c) {
    return "beta=" + fmt(c.beta) + ",eps=" + fmt(c.eps);
}

// ---- 1-d closed forms -------------------------------------------------------

Objective one_d_quadratic(double w) {
    Objective obj;
    obj.dim = 1;
    obj.eval = [w](const Vec& x) { return 0.5 * w * x[0] * x[0]; };
    obj.grad = [w](const Vec& x) { return Vec{w * x[0]}; };
    obj.hvp = [w](const Vec&, const Vec& v) { return Vec{w * v[0]}; };
    obj.lipschitz = w;
    obj.pl_mu = w;
    obj.f_star = 0.0;
    return obj;
}

// First zero of d/dt |x'|^2 for x'' + a x' + g x = 0 started from rest.
double closed_form_restart(double a, double g) {
    const double disc = a * a - 4.0 * g;
    if (disc < 0.0) {
        const double s = std::sqrt(-disc);
        return 2.0 / s * std::atan(s / a);
    }
    const double s = std::sqrt(disc);
    return std::log((a + s) / (a - s)) / s;
}

}  // namespace

int main() {
    int failures = 0;
    const auto report = [&failures](int id, const char* what, bool pass,
                                    const std::string& detail) {
        std::printf("[%s] criterion %d: %s (%s)\n", pass ? "PASS" : "FAIL", id, what,
                    detail.c_str());
        if (!pass) ++failures;
    };
    // Runs one criterion, converting an escaped exception into a failure.
    const auto run = [&report](int id, const char* what,
                               const std::function<std::pair<bool, std::string>()>& body) {
        bool pass = false;
        std::string detail;
        try {
            std::tie(pass, detail) = body();
        } catch (const std::exception& e) {
            pass = false;
            detail = std::string("exception: ") + e.what();
        }
        report(id, what, pass, detail);
    };

    const Grid grid = run_grid();

    // 1. Integrator against closed forms: 20 random 1-d quadratics, both
    //    damping regimes, restart time within 1e-5, under 5 seconds.
    run(1, "restart times match 1-d closed forms", [&] {
        const auto t0 = Clock::now();
        std::mt19937_64 rng(20260816ull);
        std::uniform_real_distribution<double> ua(1.0, 5.0), ub(0.0, 3.0),
            ulg(-0.5, 1.6), ulw(-0.5, 1.0), ux(0.6, 2.0);
        IntegratorOptions opts;
        opts.h_ode = 1e-4;
        opts.event_tolerance = 1e-9;
        opts.max_time = 50.0;
        opts.gradient_stop_tol = 0.0;
        double max_err = 0.0;
        int oscillatory = 0, overdamped = 0;
        for (int i = 0; i < 20; ++i) {
            const bool want_osc = i < 10;
            double alpha = 0.0, beta = 0.0, gamma = 0.0, w = 0.0, a = 0.0, g = 0.0;
            for (;;) {
                alpha = ua(rng);
                beta = ub(rng);
                gamma = std::pow(10.0, ulg(rng));
                w = std::pow(10.0, ulw(rng));
                a = alpha + beta * w;
                g = gamma * w;
                // Stay away from critical damping where the event flattens out.
                if (std::fabs(4.0 * g - a * a) < 0.5) continue;
                if ((4.0 * g > a * a) == want_osc) break;
            }
            (want_osc ? oscillatory : overdamped) += 1;
            const Objective obj = one_d_quadratic(w);
            const Vec z{ux(rng) * (i % 2 == 0 ? 1.0 : -1.0)};
            const auto seg =
                integrate_until_restart(obj, {alpha, beta, gamma}, z, opts);
            if (seg.termination != Termination::RestartFound)
                return std::make_pair(false, std::string("no restart event found"));
            max_err = std::max(max_err,
                               std::fabs(*seg.restart_time - closed_form_restart(a, g)));
        }
        const double secs = seconds_since(t0);
        const bool pass = max_err <= 1e-5 && secs < 5.0;
        return std::make_pair(pass, "max |T - T_exact| = " + fmt(max_err) + ", " +
                                        std::to_string(oscillatory) + " oscillatory / " +
                                        std::to_string(overdamped) + " overdamped, " +
                                        fmt(secs) + "s");
    });

    // 2. Every completed cycle duration inside [tau3 - 1e-7, tau_upper + 1e-7],
    //    under 30 seconds including the shared grid run.
    run(2, "cycle durations inside the predicted bracket", [&] {
        int bad = 0;
        std::size_t total = 0;
        std::string first_bad;
        for (const auto& c : grid.cells) {
            for (double ti : c.traj.intervals) {
                ++total;
                if (ti < c.bounds.tau3 - 1e-7 || ti > c.bounds.tau_upper + 1e-7) {
                    ++bad;
                    if (first_bad.empty())
                        first_bad = cell_tag(c) + ": T=" + fmt(ti) + " outside [" +
                                    fmt(c.bounds.tau3) + ", " + fmt(c.bounds.tau_upper) + "]";
                }
            }
        }
        const double secs = grid.run_seconds;
        const bool pass = bad == 0 && total > 0 && secs < 30.0;
        std::string detail = std::to_string(total) + " cycles across 6 cells, " +
                             std::to_string(bad) + " outside, " + fmt(secs) + "s";
        if (!first_bad.empty()) detail += "; first: " + first_bad;
        return std::make_pair(pass, detail);
    });

    // 3. The function-value gap never increases along any sampled trajectory
    //    (forward differences at most 1e-9 of the initial gap).
    run(3, "gap is monotone along every trajectory", [&] {
        double worst = -1e300;
        std::string where;
        for (const auto& c : grid.cells) {
            const double slack = 1e-9 * c.traj.samples.front().f_gap;
            for (std::size_t i = 0; i + 1 < c.traj.samples.size(); ++i) {
                const double d =
                    c.traj.samples[i + 1].f_gap - c.traj.samples[i].f_gap;
                if (d > worst) {
                    worst = d;
                    where = cell_tag(c);
                }
                if (d > slack)
                    return std::make_pair(false, cell_tag(c) + ": gap rises by " + fmt(d) +
                                                     " at t=" + fmt(c.traj.samples[i].t));
            }
        }
        return std::make_pair(true, "worst forward difference " + fmt(worst) + " (" +
                                        where + ")");
    });

    // 4. Pointwise exponential envelope: f_gap(t) <= C e^(-K t) f_gap(0) with
    //    the constants from convergence_constants.
    run(4, "trajectories stay under the C e^(-K t) envelope", [&] {
        double worst_ratio = 0.0;
        std::string where;
        for (const auto& c : grid.cells) {
            const auto [C, K] =
                convergence_constants(c.params, grid.obj.lipschitz, grid.obj.pl_mu);
            const double gap0 = c.traj.samples.front().f_gap;
            for (const auto& s : c.traj.samples) {
                const double env = C * std::exp(-K * s.t) * gap0;
                const double ratio = s.f_gap / env;
                if (ratio > worst_ratio) {
                    worst_ratio = ratio;
                    where = cell_tag(c) + " at t=" + fmt(s.t);
                }
            }
        }
        const bool pass = worst_ratio <= 1.0;
        return std::make_pair(pass,
                              "worst gap/envelope = " + fmt(worst_ratio) + " (" + where + ")");
    });

    // 5. Mean restart interval per cell within 15% of the reference values
    //    {0.701, 0.370, 0.0339} for beta=0 and {0.0379, 0.0376, 0.0259} for
    //    beta=6, under 2 minutes including the grid run.
    run(5, "mean restart intervals match the reference table", [&] {
        const double ref[6] = {0.701, 0.370, 0.0339, 0.0379, 0.0376, 0.0259};
        int bad = 0;
        std::string detail;
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            const auto& c = grid.cells[i];
            const auto st = interval_stats(c.traj.intervals);
            const double rel = std::fabs(st.mean - ref[i]) / ref[i];
            const bool ok = rel <= 0.15;
            if (!ok) ++bad;
            if (!detail.empty()) detail += "; ";
            detail += cell_tag(c) + ": " + fmt(st.mean) + " vs " + fmt(ref[i]) +
                      (ok ? " ok" : " off by " + fmt(100.0 * rel) + "%");
        }
        const double secs = grid.run_seconds;
        const bool pass = bad == 0 && secs < 120.0;
        detail += "; " + std::to_string(6 - bad) + "/6 within 15%, " + fmt(secs) + "s";
        return std::make_pair(pass, detail);
    });

    // 6. Fitted decay rates over t in [0,1]: within 25% of 2.99 (beta=0,
    //    eps=0.1) and 59.72 (beta=6, eps=0.1), rate(beta=6) > rate(beta=0) at
    //    every eps, and the beta=0 rate increases with eps.
    run(6, "fitted decay rates: pinned values and orderings", [&] {
        double B[6];
        for (std::size_t i = 0; i < grid.cells.size(); ++i) {
            auto series = gap_series(grid.cells[i].traj.samples);
            series.erase(std::remove_if(series.begin(), series.end(),
                                        [](const auto& s) { return s.first > 1.0; }),
                         series.end());
            B[i] = fit_exponential(series).B;
        }
        std::string detail = "B = {";
        for (int i = 0; i < 6; ++i) detail += (i ? ", " : "") + fmt(B[i]);
        detail += "}";
        bool pass = true;
        const double rel0 = std::fabs(B[0] - 2.99) / 2.99;
        const double rel3 = std::fabs(B[3] - 59.72) / 59.72;
        if (rel0 > 0.25) pass = false;
        if (rel3 > 0.25) pass = false;
        detail += "; beta=0,eps=0.1: " + fmt(B[0]) + " vs 2.99 (" + fmt(100 * rel0) +
                  "%), beta=6,eps=0.1: " + fmt(B[3]) + " vs 59.72 (" + fmt(100 * rel3) + "%)";
        for (int j = 0; j < 3; ++j) {
            if (!(B[3 + j] > B[j])) {
                pass = false;
                detail += "; ordering beta=6 > beta=0 fails at eps index " + std::to_string(j);
            }
        }
        if (!(B[0] < B[1] && B[1] < B[2])) {
            pass = false;
            detail += "; beta=0 rates not increasing in eps";
        }
        return std::make_pair(pass, detail);
    });

    // 7. Discrete speed-restart runs (h=1e-3, 3000 iterations from (1,1,1)):
    //    per-iteration decay rate within 20% of {5.46e-2, 5.55e-2, 8.52e-2}
    //    for eps in {0.1, 10, 100}, and rate(eps=100) > rate(eps=10).
    run(7, "discrete decay rates match the reference table", [&] {
        const double eps_list[3] = {0.1, 10.0, 100.0};
        const double ref[3] = {5.46e-2, 5.55e-2, 8.52e-2};
        double B[3];
        const Vec x0{1.0, 1.0, 1.0};
        for (int j = 0; j < 3; ++j) {
            DiscreteConfig cfg;
            cfg.params = {3.0, 6.0, gamma_for_oscillation(3.0, 6.0, 10.0, 2, eps_list[j])};
            cfg.h = 1e-3;
            cfg.max_iters = 3000;
            cfg.policy = RestartPolicy::Speed;
            cfg.stop_grad_tol = 0.0;
            const auto records = run_algorithm(grid.obj, cfg, x0);
            B[j] = fit_exponential(gap_series(to_samples(records))).B;
        }
        bool pass = true;
        std::string detail;
        for (int j = 0; j < 3; ++j) {
            const double rel = std::fabs(B[j] - ref[j]) / ref[j];
            if (rel > 0.20) pass = false;
            if (!detail.empty()) detail += "; ";
            detail += "eps=" + fmt(eps_list[j]) + ": " + fmt(B[j]) + " vs " + fmt(ref[j]) +
                      " (" + fmt(100.0 * rel) + "%)";
        }
        if (!(B[2] > B[1])) {
            pass = false;
            detail += "; ordering rate(eps=100) > rate(eps=10) fails";
        }
        return std::make_pair(pass, detail);
    });

    // 8. Per-cycle gap ratios never exceed the contraction factor Q, and
    //    q_factor lands in (0,1) for 50 random admissible parameter sets.
    run(8, "contraction factor bounds every cycle and stays in (0,1)", [&] {
        double worst = 0.0;
        std::string where;
        for (const auto& c : grid.cells) {
            for (double r : c.ratios) {
                if (r / c.bounds.Q > worst) {
                    worst = r / c.bounds.Q;
                    where = cell_tag(c);
                }
                if (r > c.bounds.Q + 1e-12)
                    return std::make_pair(false, cell_tag(c) + ": cycle ratio " + fmt(r) +
                                                     " exceeds Q = " + fmt(c.bounds.Q));
            }
        }
        std::mt19937_64 rng(911);
        std::uniform_real_distribution<double> ua(0.5, 6.0), ub(0.0, 8.0), ulg(-1.0, 3.0),
            ull(0.0, 2.5), uu(0.0, 1.0);
        for (int i = 0; i < 50; ++i) {
            const SystemParams p{ua(rng), ub(rng), std::pow(10.0, ulg(rng))};
            const double L = std::pow(10.0, ull(rng));
            const double mu = L * (0.05 + 0.95 * uu(rng));
            const double q = q_factor(p, L, mu);  // throws when outside (0,1)
            if (!(q > 0.0 && q < 1.0))
                return std::make_pair(false, "q = " + fmt(q) + " out of range");
        }
        return std::make_pair(true, "worst ratio/Q = " + fmt(worst) + " (" + where +
                                        "), 50 random parameter sets in (0,1)");
    });

    // 9. Numerical hygiene: series branch limits of H and G at 0+, root
    //    residuals at most 1e-10, fourth-order decay of the restart-time error
    //    under step halving, and Hessian products consistent with finite
    //    differences to 1e-6.
    run(9, "small-t limits, root residuals, integrator order, derivative checks", [&] {
        std::string detail;
        const std::vector<std::pair<SystemParams, double>> sets = {
            {{3.0, 1.0, 20.0}, 1.0},        {{3.0, 0.0, 20.0}, 1.0},
            {{3.0, 6.0, 909.1225}, 100.0},  {{3.0, 0.0, 0.1225}, 100.0},
            {{4.0, 2.0, 50.0}, 10.0},       {{1.0, 0.0, 2.0}, 1.0}};
        double worst_limit = 0.0, worst_resid = 0.0;
        for (const auto& [p, L] : sets) {
            worst_limit = std::max(worst_limit, std::fabs(eval_H(1e-12, p, L) - 1.0));
            worst_limit = std::max(worst_limit, std::fabs(eval_G(1e-13, p, L) - 1.0));
            const TauRoots roots = solve_tau(p, L);
            worst_resid = std::max(worst_resid, std::fabs(eval_H(roots.tau1, p, L)));
            worst_resid =
                std::max(worst_resid, std::fabs(eval_H(roots.tau2, p, L) - 0.5));
            worst_resid = std::max(worst_resid, std::fabs(eval_G(roots.tau3, p, L)));
        }
        if (worst_limit > 1e-8)
            return std::make_pair(false, "limit at 0+ off by " + fmt(worst_limit));
        if (worst_resid > 1e-10)
            return std::make_pair(false, "root residual " + fmt(worst_resid));
        detail = "limits off by " + fmt(worst_limit) + ", residuals " + fmt(worst_resid);

        // Halving the step must shrink the restart-time error by at least 8x
        // (16x for a clean fourth-order scheme).
        const Objective obj1 = one_d_quadratic(1.0);
        const SystemParams p{3.0, 1.0, 20.0};
        const double exact = closed_form_restart(4.0, 20.0);
        double errs[3];
        const double hs[3] = {0.02, 0.01, 0.005};
        for (int i = 0; i < 3; ++i) {
            IntegratorOptions opts;
            opts.h_ode = hs[i];
            opts.event_tolerance = 1e-12;
            opts.max_time = 5.0;
            opts.gradient_stop_tol = 0.0;
            const auto seg = integrate_until_restart(obj1, p, Vec{1.0}, opts);
            errs[i] = std::fabs(*seg.restart_time - exact);
        }
        const double r01 = errs[0] / errs[1];
        const double r12 = errs[1] / errs[2];
        if (!(r01 >= 8.0 && r12 >= 8.0))
            return std::make_pair(false, "halving ratios " + fmt(r01) + ", " + fmt(r12) +
                                             " below 8 (errors " + fmt(errs[0]) + ", " +
                                             fmt(errs[1]) + ", " + fmt(errs[2]) + ")");
        detail += ", halving ratios " + fmt(r01) + "/" + fmt(r12);

        // Analytic Hessian products against central differences of the
        // gradient, and the gradient against central differences of f.
        Objective quartic;
        quartic.dim = 2;
        quartic.eval = [](const Vec& x) {
            return 0.25 * (x[0] * x[0] * x[0] * x[0] + x[1] * x[1] * x[1] * x[1]);
        };
        quartic.grad = [](const Vec& x) {
            return Vec{x[0] * x[0] * x[0], x[1] * x[1] * x[1]};
        };
        quartic.hvp = [](const Vec& x, const Vec& v) {
            return Vec{3.0 * x[0] * x[0] * v[0], 3.0 * x[1] * x[1] * v[1]};
        };
        double worst_fd = 0.0;
        std::mt19937_64 rng(7);
        std::uniform_real_distribution<double> ur(-1.5, 1.5);
        const Objective* objs[2] = {&grid.obj, &quartic};
        for (const Objective* obj : objs) {
            for (int trial = 0; trial < 20; ++trial) {
                Vec x(obj->dim), v(obj->dim);
                for (auto& xi : x) xi = ur(rng);
                for (auto& vi : v) vi = ur(rng);
                const Vec hv = obj->hessian_vec(x, v);
                const Vec fd = finite_difference_hvp(*obj, x, v, 1e-4);
                worst_fd = std::max(worst_fd, dist(hv, fd));
                const Vec gr = obj->grad(x);
                for (int i = 0; i < obj->dim; ++i) {
                    Vec xp = x, xm = x;
                    xp[i] += 1e-4;
                    xm[i] -= 1e-4;
                    const double g_fd = (obj->eval(xp) - obj->eval(xm)) / 2e-4;
                    worst_fd = std::max(worst_fd, std::fabs(gr[i] - g_fd));
                }
            }
        }
        if (worst_fd > 1e-6)
            return std::make_pair(false, "derivative mismatch " + fmt(worst_fd));
        detail += ", derivative mismatch " + fmt(worst_fd);
        return std::make_pair(true, detail);
    });

    // 10. Two reproduce-paper runs write byte-identical csv files.
    run(10, "full reproduction run is deterministic", [&] {
        const fs::path base =
            fs::temp_directory_path() / ("winrestart_gate_" + std::to_string(::getpid()));
        const fs::path a = base / "a", b = base / "b";
        fs::create_directories(a);
        fs::create_directories(b);
        int codes[2];
        const fs::path* dirs[2] = {&a, &b};
        for (int i = 0; i < 2; ++i) {
            const std::string cmd = std::string(WINRESTART_BIN) +
                                    " reproduce-paper --threads 4 --out " +
                                    dirs[i]->string() + " > /dev/null 2>&1";
            const int raw = std::system(cmd.c_str());
            codes[i] = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
        }
        if (codes[0] != 0 || codes[1] != 0)
            return std::make_pair(false, "exit codes " + std::to_string(codes[0]) + ", " +
                                             std::to_string(codes[1]));
        const auto collect = [](const fs::path& root) {
            std::map<std::string, std::string> files;
            for (const auto& e : fs::recursive_directory_iterator(root)) {
                if (!e.is_regular_file() || e.path().extension() != ".csv") continue;
                std::ifstream in(e.path(), std::ios::binary);
                std::ostringstream ss;
                ss << in.rdbuf();
                files[fs::relative(e.path(), root).string()] = ss.str();
            }
            return files;
        };
        const auto fa = collect(a), fb = collect(b);
        if (fa.empty())
            return std::make_pair(false, std::string("no csv files were produced"));
        if (fa.size() != fb.size())
            return std::make_pair(false, "file sets differ: " + std::to_string(fa.size()) +
                                             " vs " + std::to_string(fb.size()));
        for (const auto& [rel, bytes] : fa) {
            const auto it = fb.find(rel);
            if (it == fb.end())
                return std::make_pair(false, rel + " missing from the second run");
            if (it->second != bytes)
                return std::make_pair(false, rel + " differs between runs");
        }
        fs::remove_all(base);
        return std::make_pair(true, std::to_string(fa.size()) + " csv files byte-identical");
    });

    return failures;
}
