#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hjb/harness.hpp"

using namespace hjb;

namespace {

ControlSet interval_controls(double lo, double hi, std::size_t count) {
    ControlSetSpec spec;
    spec.kind = ControlSetSpec::Kind::interval;
    spec.lower = {lo};
    spec.upper = {hi};
    spec.count = count;
    return discretize_controls(spec);
}

}  // namespace

TEST_CASE("rate fit: exact powers are recovered") {
    CHECK(estimate_rate({{1.0, 0.1}, {0.5, 0.05}}) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(estimate_rate({{1.0, 0.04}, {0.5, 0.01}, {0.25, 0.0025}}) ==
          doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("rate fit: zero errors are excluded and starve the fit") {
    // One usable pair left after exclusion: not enough for a slope.
    CHECK_THROWS_AS(estimate_rate({{1.0, 0.1}, {0.5, 1e-15}, {0.25, 0.0}}),
                    InsufficientDataError);
    // Zero row in the middle is skipped, the remaining two still fit.
    CHECK(estimate_rate({{1.0, 0.1}, {0.5, 1e-16}, {0.25, 0.025}}) ==
          doctest::Approx(1.0).epsilon(1e-12));
    CHECK_THROWS_AS(estimate_rate({{0.0, 0.1}, {0.5, 0.05}}), HarnessError);
}

TEST_CASE("interp study: kinked function meets the Lipschitz bound at rate one") {
    // Asymmetric domain keeps the kink of |x| off the node lattice at every
    // refinement level.
    const auto report = interp_error_study(
        [](const Point& x) { return std::abs(x[0]); }, 1.0,
        BoxDomain::create({-1.0}, {1.5}), {3}, 4, 20000, 7);
    REQUIRE(report.levels.size() == 4);
    for (const auto& level : report.levels) {
        CHECK(level.bound_ok);
        CHECK(level.sup_error > 0.0);
    }
    REQUIRE(report.rate_defined);
    CHECK(report.fitted_rate > 0.7);
    CHECK(report.fitted_rate < 1.3);
}

TEST_CASE("interp study: affine data is reproduced exactly") {
    const auto report = interp_error_study(
        [](const Point& x) { return 2.0 * x[0] - 0.7; }, 2.0,
        BoxDomain::create({-1.0}, {1.0}), {4}, 3, 5000, 3);
    for (const auto& level : report.levels) {
        CHECK(level.sup_error <= 1e-12);
        CHECK(level.bound_ok);
    }
    CHECK_FALSE(report.rate_defined);  // every level sits at the zero floor
}

TEST_CASE("interp study: smooth curvature converges at rate two") {
    const auto report = interp_error_study(
        [](const Point& x) { return x[0] * x[0]; }, 2.0,
        BoxDomain::create({0.0}, {1.0}), {2}, 4, 20000, 11);
    REQUIRE(report.rate_defined);
    CHECK(report.fitted_rate == doctest::Approx(2.0).epsilon(0.05));
    for (const auto& level : report.levels) {
        // Max error of linear interpolation of x^2 is k^2 / 4, at midpoints.
        const double cap = level.k * level.k / 4.0;
        CHECK(level.sup_error <= cap * (1.0 + 1e-9));
        CHECK(level.sup_error >= cap * 0.9);
    }
}

TEST_CASE("one-control gap study: trivial instance is exact on every level") {
    ProblemSpec p;
    p.name = "unit_cost";
    p.state_dim = 1;
    p.control_dim = 1;
    p.t_begin = 0.0;
    p.t_end = 1.0;
    p.dynamics = [](const Point&, const Control&, double) { return Point{0.0}; };
    p.running_cost = [](const Point&, const Control&, double) { return 1.0; };
    p.terminal_cost = [](const Point&) { return 0.0; };

    Lemma1StudyConfig config;
    config.domain = BoxDomain::create({-1.0}, {1.0});
    config.base_subdivisions = {2};
    config.base_steps = 4;
    config.levels = 3;
    config.x = {0.5};
    config.base_control.start_level = 0;
    config.base_control.values.assign(4, {0.0});
    const auto report = lemma1_study(p, config);
    REQUIRE(report.levels.size() == 3);
    for (const auto& level : report.levels) {
        CHECK(level.error <= 1e-12);
        CHECK(level.exact);
    }
    CHECK_FALSE(report.rate_defined);
}

TEST_CASE("one-control gap study: discounting produces a first-order gap") {
    ProblemSpec p;
    p.name = "unit_cost_discounted";
    p.state_dim = 1;
    p.control_dim = 1;
    p.t_begin = 0.0;
    p.t_end = 1.0;
    p.discount = 1.0;
    p.dynamics = [](const Point&, const Control&, double) { return Point{0.0}; };
    p.running_cost = [](const Point&, const Control&, double) { return 1.0; };
    p.terminal_cost = [](const Point&) { return 0.0; };

    Lemma1StudyConfig config;
    config.domain = BoxDomain::create({-1.0}, {1.0});
    config.base_subdivisions = {2};
    config.base_steps = 4;
    config.levels = 4;
    config.x = {0.0};
    config.base_control.start_level = 0;
    config.base_control.values.assign(4, {0.0});
    const auto report = lemma1_study(p, config);
    REQUIRE(report.rate_defined);
    CHECK(report.fitted_rate > 0.9);
    CHECK(report.fitted_rate < 1.2);
    // The discrete rectangle sum overshoots the exact integral 1 - e^{-1}.
    CHECK(report.levels[0].error > report.levels[3].error);
}

TEST_CASE("one-control gap study: control length is validated") {
    ProblemSpec p;
    p.name = "unit_cost";
    p.state_dim = 1;
    p.control_dim = 1;
    p.t_begin = 0.0;
    p.t_end = 1.0;
    p.dynamics = [](const Point&, const Control&, double) { return Point{0.0}; };
    p.running_cost = [](const Point&, const Control&, double) { return 0.0; };
    p.terminal_cost = [](const Point&) { return 0.0; };

    Lemma1StudyConfig config;
    config.domain = BoxDomain::create({-1.0}, {1.0});
    config.base_subdivisions = {2};
    config.base_steps = 4;
    config.levels = 2;
    config.x = {0.0};
    config.base_control.values.assign(3, {0.0});  // one short
    CHECK_THROWS_AS(lemma1_study(p, config), HarnessError);
}

TEST_CASE("convergence study: refinement halves the scales and fits a rate") {
    const auto p = make_problem("eikonal1d", {{"umax", 0.25}});
    const auto controls = interval_controls(-0.25, 0.25, 3);

    ConvergenceStudyConfig config;
    config.domain = BoxDomain::create({-2.0}, {2.0});
    config.base_subdivisions = {16};
    config.base_steps = 4;
    config.levels = 3;
    config.subdomain = BoxDomain::create({-0.5}, {0.5});
    config.norm = ErrorNorm::mean;
    config.policy = BoundaryPolicy::project;
    config.workers = 2;
    const auto report = run_convergence(p, controls, config);

    REQUIRE(report.levels.size() == 3);
    for (std::size_t l = 0; l + 1 < report.levels.size(); ++l) {
        CHECK(report.levels[l + 1].h == doctest::Approx(report.levels[l].h / 2.0));
        CHECK(report.levels[l + 1].k == doctest::Approx(report.levels[l].k / 2.0));
    }
    for (const auto& level : report.levels) {
        CHECK(level.num_controls == 3);
        CHECK(level.error > 0.0);
        CHECK(level.Lu >= 0.0);
        CHECK(level.wall_seconds >= 0.0);
    }
    REQUIRE(report.rate_defined);
    CHECK(report.fitted_rate > 0.5);

    // The growth flag must agree with a recomputation from the stored data.
    bool grew = false;
    for (std::size_t l = 0; l + 1 < report.levels.size(); ++l) {
        grew = grew || report.levels[l + 1].Lu > 2.0 * report.levels[l].Lu;
    }
    CHECK(report.lu_growth_flag == grew);
}

TEST_CASE("convergence study: max norm dominates the mean norm") {
    const auto p = make_problem("eikonal1d", {{"umax", 0.25}});
    const auto controls = interval_controls(-0.25, 0.25, 3);

    ConvergenceStudyConfig config;
    config.domain = BoxDomain::create({-2.0}, {2.0});
    config.base_subdivisions = {16};
    config.base_steps = 4;
    config.levels = 2;
    config.subdomain = BoxDomain::create({-0.5}, {0.5});
    config.policy = BoundaryPolicy::project;
    config.norm = ErrorNorm::max;
    const auto max_report = run_convergence(p, controls, config);
    config.norm = ErrorNorm::mean;
    const auto mean_report = run_convergence(p, controls, config);
    for (std::size_t l = 0; l < 2; ++l) {
        CHECK(mean_report.levels[l].error <= max_report.levels[l].error + 1e-15);
    }
}

TEST_CASE("convergence study: reference mode covers problems without a closed form") {
    const auto p = make_problem("advect_lin", {{"a0", 0.3}, {"a1", -0.4}});
    const auto controls = interval_controls(-1.0, 1.0, 3);

    ConvergenceStudyConfig config;
    config.domain = BoxDomain::create({-2.0}, {2.0});
    config.base_subdivisions = {8};
    config.base_steps = 4;
    config.levels = 2;
    config.subdomain = BoxDomain::create({-0.5}, {0.5});
    config.policy = BoundaryPolicy::project;

    CHECK_THROWS_AS(run_convergence(p, controls, config), HarnessError);
    config.allow_reference = true;
    const auto report = run_convergence(p, controls, config);
    REQUIRE(report.levels.size() == 2);
    CHECK(report.notes.find("reference") != std::string::npos);
    for (const auto& level : report.levels) {
        CHECK(level.error >= 0.0);
    }
}

TEST_CASE("convergence study: configuration guards") {
    const auto p = make_problem("eikonal1d", {});
    const auto controls = interval_controls(-1.0, 1.0, 2);

    ConvergenceStudyConfig config;
    config.domain = BoxDomain::create({-2.0}, {2.0});
    config.base_subdivisions = {8};
    config.base_steps = 4;
    config.subdomain = BoxDomain::create({-3.0}, {0.5});  // pokes outside
    config.policy = BoundaryPolicy::project;
    CHECK_THROWS_AS(run_convergence(p, controls, config), HarnessError);

    config.subdomain = BoxDomain::create({-0.5}, {0.5});
    config.levels = 0;
    CHECK_THROWS_AS(run_convergence(p, controls, config), HarnessError);
}
