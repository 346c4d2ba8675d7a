#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "winrestart/dynamics.hpp"
#include "winrestart/errors.hpp"
#include "winrestart/objective.hpp"

using namespace winrestart;

namespace {

Objective one_d() { return make_power_quadratic({1, 2.0}); }

// First speed maximum of x'' + a x' + g x = 0 started at rest: the solution
// is explicit in both damping regimes, and |x'| peaks where x'' = 0.
double closed_form_restart(double a, double g) {
    const double disc = 4.0 * g - a * a;
    if (disc > 0.0) {
        const double s = std::sqrt(disc);
        return 2.0 / s * std::atan(s / a);
    }
    const double s = std::sqrt(-disc);
    const double kp = 0.5 * (-a + s);
    const double km = 0.5 * (-a - s);
    return std::log(km / kp) / s;
}

}  // namespace

TEST_CASE("vector field and speed derivative arithmetic on a scalar quadratic") {
    const Objective obj = one_d();
    const SystemParams p{3, 1, 20};

    PhaseState s;
    s.x = {1.0};
    s.v = {0.0};
    const auto [dx, dv] = win_vector_field(obj, p, s);
    CHECK(dx[0] == 0.0);
    CHECK(dv[0] == doctest::Approx(-20.0).epsilon(1e-15));
    CHECK(speed_derivative(obj, p, s) == 0.0);

    s.x = {-1.0};
    s.v = {0.1};
    // dv = -3(0.1) - 1(0.1) + 20 = 19.6, so d|v|^2/dt = 2(0.1)(19.6).
    CHECK(speed_derivative(obj, p, s) == doctest::Approx(3.92).epsilon(1e-14));

    CHECK_THROWS_AS(win_vector_field(obj, {0, 0, 1}, s), std::invalid_argument);
}

TEST_CASE("detected restart time matches the closed form in both damping regimes") {
    const Objective obj = one_d();
    IntegratorOptions opts;
    opts.h_ode = 1e-4;
    opts.event_tolerance = 1e-9;
    opts.max_time = 50.0;
    opts.gradient_stop_tol = 0.0;

    // Oscillatory case, a = 4, disc = 64: t = atan(2)/4.
    {
        const SegmentResult seg = integrate_until_restart(obj, {3, 1, 20}, {1.0}, opts);
        REQUIRE(seg.termination == Termination::RestartFound);
        REQUIRE(seg.restart_time.has_value());
        CHECK(std::abs(*seg.restart_time - 0.25 * std::atan(2.0)) <= 1e-6);
    }
    // Overdamped case, a = 4, disc = -12.
    {
        const SegmentResult seg = integrate_until_restart(obj, {3, 1, 1}, {1.0}, opts);
        REQUIRE(seg.termination == Termination::RestartFound);
        CHECK(std::abs(*seg.restart_time - closed_form_restart(4.0, 1.0)) <= 1e-6);
    }

    std::mt19937_64 rng(42ull);
    std::uniform_real_distribution<double> ua(1.0, 5.0);
    std::uniform_real_distribution<double> ub(0.0, 3.0);
    std::uniform_real_distribution<double> ug(-0.5, 1.6);  // log10 gamma
    std::uniform_real_distribution<double> ux(0.6, 2.0);
    int oscillatory = 0, overdamped = 0;
    for (int rep = 0; rep < 20; ++rep) {
        double alpha, beta, gamma;
        do {
            alpha = ua(rng);
            beta = ub(rng);
            gamma = std::pow(10.0, ug(rng));
            // Stay clear of critical damping, where the closed form degenerates.
        } while (std::abs(4.0 * gamma - (alpha + beta) * (alpha + beta)) < 0.5);
        const double a = alpha + beta;
        (4.0 * gamma > a * a ? oscillatory : overdamped) += 1;

        const double x0 = ux(rng) * (rep % 2 ? 1.0 : -1.0);
        const SegmentResult seg =
            integrate_until_restart(obj, {alpha, beta, gamma}, {x0}, opts);
        REQUIRE(seg.termination == Termination::RestartFound);
        CHECK(std::abs(*seg.restart_time - closed_form_restart(a, gamma)) <= 1e-5);
    }
    CHECK(oscillatory >= 3);
    CHECK(overdamped >= 3);
}

TEST_CASE("speed grows until the detected event and the event is a stationary speed point") {
    const Objective obj = one_d();
    const SystemParams p{3, 1, 20};
    IntegratorOptions opts;
    opts.h_ode = 1e-3;
    opts.event_tolerance = 1e-9;
    opts.gradient_stop_tol = 0.0;

    const SegmentResult seg = integrate_until_restart(obj, p, {1.0}, opts);
    REQUIRE(seg.termination == Termination::RestartFound);
    REQUIRE(seg.states.size() >= 3);

    double max_speed = 0.0;
    for (const PhaseState& s : seg.states) max_speed = std::max(max_speed, norm(s.v));
    for (std::size_t k = 1; k + 1 < seg.states.size(); ++k)
        CHECK(norm(seg.states[k].v) >= norm(seg.states[k - 1].v) - 1e-12 * max_speed);

    const PhaseState& ev = seg.states.back();
    CHECK(ev.t == *seg.restart_time);
    CHECK(std::abs(speed_derivative(obj, p, ev)) <= 1e-6);
}

TEST_CASE("starting at the minimizer stops immediately on the gradient tolerance") {
    const Objective obj = make_power_quadratic({3, 10.0});
    IntegratorOptions opts;  // default gradient_stop_tol
    const SegmentResult seg = integrate_until_restart(obj, {3, 0, 20}, {0.0, 0.0, 0.0}, opts);
    CHECK(seg.termination == Termination::GradientBelowTol);
    CHECK(!seg.restart_time.has_value());
    REQUIRE(seg.states.size() == 1);
    CHECK(seg.states[0].t == 0.0);
}

TEST_CASE("restart time is invariant under scaling of the initial point") {
    const Objective obj = one_d();
    const SystemParams p{3, 1, 20};
    IntegratorOptions opts;
    opts.h_ode = 1e-4;
    opts.event_tolerance = 1e-10;
    opts.gradient_stop_tol = 0.0;

    const SegmentResult base = integrate_until_restart(obj, p, {1.0}, opts);
    REQUIRE(base.restart_time.has_value());
    for (double c : {0.5, 2.0, 10.0}) {
        const SegmentResult seg = integrate_until_restart(obj, p, {c}, opts);
        REQUIRE(seg.restart_time.has_value());
        CHECK(std::abs(*seg.restart_time - *base.restart_time) <= 1e-9);
    }
}

TEST_CASE("restart time error shrinks at fourth order under step halving") {
    const Objective obj = one_d();
    const SystemParams p{3, 1, 20};
    const double exact = 0.25 * std::atan(2.0);

    double err[3];
    const double hs[3] = {0.02, 0.01, 0.005};
    for (int i = 0; i < 3; ++i) {
        IntegratorOptions opts;
        opts.h_ode = hs[i];
        opts.event_tolerance = 1e-12;
        opts.gradient_stop_tol = 0.0;
        const SegmentResult seg = integrate_until_restart(obj, p, {1.0}, opts);
        REQUIRE(seg.restart_time.has_value());
        err[i] = std::abs(*seg.restart_time - exact);
    }
    CHECK(err[0] / err[1] >= 8.0);
    CHECK(err[1] / err[2] >= 8.0);
}

TEST_CASE("divergent integration reports a non-finite state") {
    const Objective obj = one_d();
    IntegratorOptions opts;
    opts.h_ode = 0.1;
    opts.gradient_stop_tol = 0.0;
    CHECK_THROWS_AS(integrate_until_restart(obj, {3, 1000, 1}, {1.0}, opts), NonFiniteState);
}

TEST_CASE("a run that cannot pick up speed is reported as a stall") {
    const Objective obj = one_d();
    IntegratorOptions opts;
    opts.h_ode = 1e-300;
    opts.max_time = 1e-296;
    opts.event_tolerance = 1e-310;
    opts.gradient_stop_tol = 0.0;
    CHECK_THROWS_AS(integrate_plain(obj, {3, 0, 20}, {1.0}, opts), ZeroSpeedStall);
}

TEST_CASE("integrator options and inputs are validated") {
    const Objective obj = one_d();
    const SystemParams p{3, 0, 20};

    IntegratorOptions bad;
    bad.h_ode = 0.0;
    CHECK_THROWS_AS(integrate_plain(obj, p, {1.0}, bad), std::invalid_argument);
    bad = {};
    bad.max_time = 0.0;
    CHECK_THROWS_AS(integrate_plain(obj, p, {1.0}, bad), std::invalid_argument);
    bad = {};
    bad.event_tolerance = bad.h_ode;  // must be strictly below the step
    CHECK_THROWS_AS(integrate_plain(obj, p, {1.0}, bad), std::invalid_argument);
    bad = {};
    bad.gradient_stop_tol = -1.0;
    CHECK_THROWS_AS(integrate_plain(obj, p, {1.0}, bad), std::invalid_argument);

    CHECK_THROWS_AS(integrate_plain(obj, p, {1.0, 2.0}, IntegratorOptions{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(integrate_plain(Objective{}, p, {}, IntegratorOptions{}),
                    std::invalid_argument);
}
