#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "mfl/errors.hpp"
#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/pde.hpp"

using namespace mfl;

namespace {
constexpr double kTau = 2.0 * std::numbers::pi;

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

double l2_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += (a[i] - b[i]) * (a[i] - b[i]);
    return std::sqrt(s / static_cast<double>(a.size()));
}
} // namespace

TEST_CASE("no interaction and unit noise reduce to the heat equation") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    const int n = 64;
    MeanFieldSolver solver(spec, 1, n);
    const double t_end = 0.02;
    SolveOptions opt;
    opt.dt = 5e-6;  // small enough that the O(dt^2) stepping error sits below 1e-8
    const auto snaps = solver.run(cosine_density(1, n, {0.5}), t_end, opt, {t_end});
    REQUIRE(snaps.size() == 1);
    const double decay = std::exp(-kTau * kTau * t_end);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = j / static_cast<double>(n);
        worst = std::max(worst, std::abs(snaps[0].values[static_cast<std::size_t>(j)] -
                                         (1.0 + 0.5 * decay * std::cos(kTau * x))));
    }
    CHECK(worst < 1e-8);
    CHECK(snaps[0].integral() == doctest::Approx(1.0).epsilon(1e-13));
}

TEST_CASE("stable_dt follows the diffusion stability rule") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {2.0, 0.5}, 1);
    MeanFieldSolver solver(spec, 1, 128);
    // safety * h^2 / ||sigma||^2 with h = 1/n and ||sigma|| = 2
    CHECK(solver.stable_dt(0.2) == doctest::Approx(0.2 / (128.0 * 128.0 * 4.0)).epsilon(1e-12));
    CHECK(solver.stable_dt(1.0) == doctest::Approx(5.0 * solver.stable_dt(0.2)).epsilon(1e-12));
}

TEST_CASE("rhs has zero mean for generic states") {
    const KernelSpec spec =
        make_kernel("trig_drift", {0.4, 1.0}, "trig_sigma", {1.0, 0.01, 1.0, 0.5}, 1);
    const int n = 64;
    MeanFieldSolver solver(spec, 1, n);
    const DensityGrid rho = cosine_density(1, n, {0.3});
    std::vector<double> out;
    solver.rhs(rho.values, out);
    double mean = 0.0;
    for (double v : out) mean += v;
    CHECK(std::abs(mean / n) < 1e-10);
}

TEST_CASE("marching conserves mass and positivity with interactions on") {
    const KernelSpec spec =
        make_kernel("trig_drift", {0.4, 1.0}, "trig_sigma", {1.0, 0.01, 1.0, 0.5}, 1);
    const int n = 64;
    MeanFieldSolver solver(spec, 1, n);
    TrajectoryNorms norms;
    SolveOptions opt;
    const double t_end = 0.05;
    const auto snaps =
        solver.run(cosine_density(1, n, {0.25}), t_end, opt, {0.025, t_end}, &norms);
    REQUIRE(snaps.size() == 2);
    for (const auto& s : snaps) {
        CHECK(std::abs(s.integral() - 1.0) < 1e-10);
        CHECK(s.min_value() > 0.0);
    }
    CHECK(snaps[0].time == doctest::Approx(0.025).epsilon(1e-9));
    CHECK(norms.inf_rho > 0.0);
    CHECK(norms.inf_rho <= 0.75 + 1e-9);
    CHECK(norms.sup_rho >= 1.25 - 1e-9);
    CHECK(norms.grad_sup >= 0.25 * kTau - 1e-9);
    CHECK(norms.hess_sup >= 0.25 * kTau * kTau - 1e-9);
}

TEST_CASE("grid_norms reports the extrema of the cosine state") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    MeanFieldSolver solver(spec, 1, 64);
    const TrajectoryNorms g = solver.grid_norms(cosine_density(1, 64, {0.5}));
    CHECK(g.inf_rho == doctest::Approx(0.5));
    CHECK(g.sup_rho == doctest::Approx(1.5));
    CHECK(g.grad_sup == doctest::Approx(0.5 * kTau).epsilon(1e-9));
    CHECK(g.hess_sup == doctest::Approx(0.5 * kTau * kTau).epsilon(1e-9));
}

TEST_CASE("imex scheme is stable above the explicit limit") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    const int n = 64;
    MeanFieldSolver solver(spec, 1, n);
    SolveOptions opt;
    opt.scheme = "imex";
    opt.dt = 4.0 * solver.stable_dt(1.0);
    const double t_end = 0.02;
    const auto snaps = solver.run(cosine_density(1, n, {0.5}), t_end, opt, {t_end});
    const double decay = std::exp(-kTau * kTau * t_end);
    double worst = 0.0;
    for (int j = 0; j < n; ++j) {
        const double x = j / static_cast<double>(n);
        worst = std::max(worst, std::abs(snaps[0].values[static_cast<std::size_t>(j)] -
                                         (1.0 + 0.5 * decay * std::cos(kTau * x))));
    }
    CHECK(worst < 0.01);  // first order in time, but stable and mass-exact
    CHECK(snaps[0].integral() == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(snaps[0].min_value() > 0.0);
}

TEST_CASE("diagnostics report mass, extrema and entropy") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    MeanFieldSolver solver(spec, 1, 32);
    const auto d = solver.diagnostics(cosine_density(1, 32, {}));
    CHECK(d.mass == doctest::Approx(1.0));
    CHECK(d.min == doctest::Approx(1.0));
    CHECK(d.max == doctest::Approx(1.0));
    CHECK(d.l2 == doctest::Approx(1.0));
    CHECK(d.entropy == doctest::Approx(0.0));
}

TEST_CASE("run rejects invalid stepping requests") {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    MeanFieldSolver solver(spec, 1, 32);
    const DensityGrid rho = cosine_density(1, 32, {0.25});
    SolveOptions opt;
    opt.dt = 10.0 * solver.stable_dt(1.0);
    CHECK_THROWS_AS(solver.run(rho, 0.01, opt, {0.01}), ConfigError);
    SolveOptions bad_scheme;
    bad_scheme.scheme = "leapfrog";
    CHECK_THROWS_AS(solver.run(rho, 0.01, bad_scheme, {0.01}), ConfigError);
    SolveOptions ok;
    CHECK_THROWS_AS(solver.run(rho, 0.01, ok, {0.02}), ConfigError);   // record beyond t_end
    CHECK_THROWS_AS(solver.run(rho, 0.01, ok, {0.01, 0.005}), ConfigError);  // not ascending
}

TEST_CASE("picard converges to the marched solution with contracting sweeps") {
    const KernelSpec spec =
        make_kernel("trig_drift", {0.4, 1.0}, "trig_sigma", {1.0, 0.01, 1.0, 0.5}, 1);
    const int n = 32;
    MeanFieldSolver solver(spec, 1, n);
    const DensityGrid rho0 = cosine_density(1, n, {0.25});
    const double t_end = 0.02;
    const double dt = 1e-4;
    const PicardResult pr = solver.picard(rho0, t_end, dt, 1e-10, 30);
    CHECK(pr.converged);
    CHECK(pr.iterations >= 2);
    REQUIRE(pr.residuals.size() >= 2);
    for (std::size_t k = 0; k + 1 < pr.residuals.size(); ++k) {
        if (pr.residuals[k] > 1e-13) {
            CHECK(pr.residuals[k + 1] < 0.8 * pr.residuals[k]);
        }
    }
    SolveOptions opt;
    opt.dt = dt;
    const auto snaps = solver.run(rho0, t_end, opt, {t_end});
    CHECK(l2_diff(pr.trajectory.back().values, snaps[0].values) < 1e-8);
    CHECK(max_abs_diff(pr.trajectory.front().values, rho0.values) == 0.0);
}
