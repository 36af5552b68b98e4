// Acceptance suite for the mean-field laboratory.  Each criterion prints one
// [PASS]/[FAIL] line with the measured quantity and its budget; the process
// exits nonzero when any criterion fails.  Budgets are desk-scale: the whole
// suite is sized for a single machine.
#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "mfl/chaos.hpp"
#include "mfl/combinatorics.hpp"
#include "mfl/csv.hpp"
#include "mfl/ensemble.hpp"
#include "mfl/enumeration.hpp"
#include "mfl/errors.hpp"
#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/lde.hpp"
#include "mfl/pde.hpp"
#include "mfl/phi.hpp"
#include "mfl/rng.hpp"

using namespace mfl;

namespace {

constexpr double kTau = 2.0 * std::numbers::pi;

std::string fmt(double v) { return format_number(v); }

struct Outcome {
    bool pass = false;
    std::string detail;
};

// ---------------------------------------------------------------------------
// Shared artifacts (several criteria inspect the same runs).

struct NullRun {
    RowStats stats;
    double bias = 0.0;
    std::string csv;
};

struct Context {
    std::optional<std::vector<DensityGrid>> heat_snaps;
    std::optional<NullRun> null_run;
    std::optional<ChaosReport> sweep;
    std::optional<PhiField> field; // trig field on the 128-node background
    std::optional<BoundConstants> bc;
};

KernelSpec trig_kernel(double sigma_amp) {
    return make_kernel("trig_drift", {0.4, 1.0}, "trig_sigma", {1.0, sigma_amp, 1.0, 0.5}, 1);
}

double linf_error_vs_heat(const DensityGrid& rho, double amp, double t) {
    const double decay = std::exp(-kTau * kTau * t);
    double err = 0.0;
    for (std::size_t f = 0; f < rho.values.size(); ++f) {
        const double truth = 1.0 + amp * decay * std::cos(kTau * rho.coord(f, 0));
        err = std::max(err, std::abs(rho.values[f] - truth));
    }
    return err;
}

double l2_distance(const DensityGrid& a, const DensityGrid& b) {
    double acc = 0.0;
    for (std::size_t f = 0; f < a.values.size(); ++f) {
        const double d = a.values[f] - b.values[f];
        acc += d * d;
    }
    return std::sqrt(acc / static_cast<double>(a.values.size()));
}

NullRun run_null_test() {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    const DensityGrid limit = cosine_density(1, 128, {});
    ParticleEnsemble ens = ParticleEnsemble::sample_initial(limit, 64, 64, 7);
    SimConfig sim;
    sim.dt = 1e-3;
    sim.t_end = 0.25;
    sim.seed = 7;
    const auto snaps = ens.run(spec, sim, {0.25});

    MetricsConfig metrics;
    metrics.bins = 16;
    metrics.bootstrap = 200;
    metrics.seed = 7;
    NullRun out;
    out.stats = row_stats(snaps.back(), limit, metrics);
    const MarginalEstimate m1 = estimate_marginal(snaps.back(), 1, metrics.bins);
    out.bias = plugin_bias(m1);

    CsvTable table({"N", "t", "H1", "sigma_H1", "bias_bound", "L1_1", "L1_2"});
    table.add_row({"64", fmt(0.25), fmt(out.stats.h1), fmt(out.stats.sigma_h1), fmt(out.bias),
                   fmt(out.stats.l1_1), fmt(out.stats.l1_2)});
    out.csv = table.str();
    return out;
}

// ---------------------------------------------------------------------------
// Criteria.

Outcome c01_heat_reduction(Context& ctx) {
    const KernelSpec spec = make_kernel("zero_drift", {}, "constant_sigma", {1.0, 0.5}, 1);
    MeanFieldSolver solver(spec, 1, 128);
    const DensityGrid rho0 = cosine_density(1, 128, {0.5});
    SolveOptions opt;
    ctx.heat_snaps = solver.run(rho0, 0.1, opt, {0.1});
    const double err = linf_error_vs_heat(ctx.heat_snaps->back(), 0.5, 0.1);
    return {err < 1e-6, "max|rho - analytic| = " + fmt(err) + " (budget 1e-06)"};
}

Outcome c02_invariants(Context& ctx) {
    const KernelSpec spec = trig_kernel(0.01);
    MeanFieldSolver solver(spec, 1, 64);
    const DensityGrid rho0 = cosine_density(1, 64, {0.1});
    SolveOptions opt;
    TrajectoryNorms norms;
    const auto snaps = solver.run(rho0, 0.05, opt, {0.01, 0.02, 0.03, 0.04, 0.05}, &norms);

    double mass_drift = std::abs(rho0.integral() - 1.0);
    double min_rho = rho0.min_value();
    for (const auto& s : snaps) {
        mass_drift = std::max(mass_drift, std::abs(s.integral() - 1.0));
        min_rho = std::min(min_rho, s.min_value());
    }
    if (ctx.heat_snaps) {
        for (const auto& s : *ctx.heat_snaps) {
            mass_drift = std::max(mass_drift, std::abs(s.integral() - 1.0));
            min_rho = std::min(min_rho, s.min_value());
        }
    }

    double rhs_integral = 0.0;
    std::vector<double> out;
    for (const DensityGrid* g : {&rho0, &snaps.back()}) {
        solver.rhs(g->values, out);
        double acc = 0.0;
        for (double v : out) acc += v;
        rhs_integral = std::max(rhs_integral, std::abs(acc / static_cast<double>(out.size())));
    }

    const bool pass =
        mass_drift < 1e-8 && min_rho > 0.0 && norms.inf_rho > 0.0 && rhs_integral < 1e-10;
    return {pass, "mass drift " + fmt(mass_drift) + " (budget 1e-08), min rho " + fmt(min_rho) +
                      ", |int rhs| " + fmt(rhs_integral) + " (budget 1e-10)"};
}

Outcome c03_null_entropy(Context& ctx) {
    ctx.null_run = run_null_test();
    const NullRun& r = *ctx.null_run;
    const double budget = r.bias + 3.0 * r.stats.sigma_h1;
    return {r.stats.h1 <= budget, "independent particles: H1 = " + fmt(r.stats.h1) +
                                      " vs bias bound + 3 sigma = " + fmt(budget)};
}

Outcome c04_entropy_decay(Context& ctx) {
    const KernelSpec spec = trig_kernel(0.01);
    const DensityGrid rho0 = cosine_density(1, 128, {0.1});
    MeanFieldSolver solver(spec, 1, 128);
    SolveOptions opt;
    TrajectoryNorms norms;
    const auto traj = solver.run(rho0, 0.25, opt, {0.25}, &norms);

    SimConfig sim;
    sim.dt = 1e-3;
    sim.t_end = 0.25;
    sim.seed = 5;
    MetricsConfig metrics;
    metrics.bins = 16;
    metrics.bootstrap = 200;
    metrics.seed = 5;
    ctx.sweep = chaos_sweep({16, 32, 64, 128, 256, 512}, {0.25}, spec, rho0, 0.0, traj, norms,
                            sim, 64, metrics);
    const ChaosReport& rep = *ctx.sweep;

    bool all_ok = rep.rows.size() == 6;
    for (const auto& row : rep.rows) all_ok = all_ok && row.status == "ok";
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < rep.rows.size(); ++i) {
        const auto& a = rep.rows[i];
        const auto& b = rep.rows[i + 1];
        if (b.h1 > a.h1 + 3.0 * (a.sigma_h1 + b.sigma_h1)) monotone = false;
    }
    const bool pass = all_ok && monotone && rep.slope <= -0.7;
    return {pass, "slope " + fmt(rep.slope) + " (budget -0.7), monotone within 3 sigma: " +
                      (monotone ? "yes" : "no") + ", minimal C = " + fmt(rep.minimal_c) +
                      ", C=1 log-envelope at N=512: " + fmt(rep.rows.back().log_envelope)};
}

Outcome c05_l1_entropy_bound(Context& ctx) {
    if (!ctx.sweep) return {false, "sweep unavailable"};
    int violations = 0;
    double worst = -1e300;
    for (const auto& row : ctx.sweep->rows) {
        if (row.status != "ok") continue;
        const double slack = row.ckp_1 + 3.0 * row.sigma_l1_1 - row.l1_1;
        worst = std::max(worst, row.l1_1 - row.ckp_1 - 3.0 * row.sigma_l1_1);
        if (slack < 0.0) ++violations;
    }
    return {violations == 0, "L1 <= sqrt(2 H1) + 3 sigma on every row: " +
                                 std::to_string(violations) + " violations, worst margin " +
                                 fmt(worst)};
}

Outcome c06_cancellations(Context& ctx) {
    const KernelSpec spec = trig_kernel(0.25);
    ctx.field.emplace(spec, cosine_density(1, 128, {0.2}));
    const auto p1 = ctx.field->check_cancellations_phi1(64, 2026);
    const auto p2 = ctx.field->check_cancellations_phi2(64, 2026);
    const double r128 = std::max(std::max(p1.first_slot_max, p1.other_slots_max),
                                 std::max(p2.first_slot_max, p2.other_slots_max));

    PhiField fine(spec, cosine_density(1, 256, {0.2}));
    const auto q1 = fine.check_cancellations_phi1(64, 2026);
    const auto q2 = fine.check_cancellations_phi2(64, 2026);
    const double r256 = std::max(std::max(q1.first_slot_max, q1.other_slots_max),
                                 std::max(q2.first_slot_max, q2.other_slots_max));

    // Residuals must sit at roundoff on both grids — refining the grid must
    // not be what makes them small.
    const bool pass = r128 < 1e-8 && r128 < 1e-10 && r256 < 1e-10;
    return {pass, "max residual " + fmt(r128) + " at n=128, " + fmt(r256) +
                      " at n=256 (budget 1e-08, roundoff 1e-10)"};
}

Outcome c07_exp_moment(Context& ctx) {
    if (!ctx.field) return {false, "field unavailable"};
    const PhiField& field = *ctx.field;
    ctx.bc = constants(field);
    const BoundConstants& bc = *ctx.bc;

    bool pass = true;
    double worst_margin = 1e300;
    std::string mc_detail;
    for (int n : {8, 32, 128}) {
        const MomentEstimate est = exp_moment_mc(field, bc.eta, n, 10000, 7);
        const double upper = est.mean + 3.0 * est.sigma;
        worst_margin = std::min(worst_margin, bc.c_bound - upper);
        if (upper > bc.c_bound) pass = false;
        mc_detail += " N=" + std::to_string(n) + ": " + fmt(upper);
    }

    // Cross-check the sampler against tensor quadrature at N=2 (the grid
    // weights are the background density, so the rule is spectrally exact).
    const DensityGrid bg = cosine_density(1, 128, {0.2});
    const int n = bg.n;
    double quad = 0.0;
    double xs[2];
    for (int a = 0; a < n; ++a) {
        for (int b = 0; b < n; ++b) {
            xs[0] = static_cast<double>(a) / n;
            xs[1] = static_cast<double>(b) / n;
            const double s = bc.eta / 4.0 * grouped_triple_sum(field, xs, 2);
            quad += bg.values[a] * bg.values[b] / static_cast<double>(n * n) * std::exp(s);
        }
    }
    const MomentEstimate two = exp_moment_mc(field, bc.eta, 2, 10000, 7);
    const double gap = std::abs(two.mean - quad);
    const double ci = 3.0 * two.sigma + 1e-9;
    if (gap > ci) pass = false;

    return {pass, "mean+3sigma vs C=" + fmt(bc.c_bound) + ":" + mc_detail +
                      "; N=2 MC vs quadrature gap " + fmt(gap) + " (CI " + fmt(ci) + ")"};
}

Outcome c08_constants_arithmetic(Context&) {
    const double limit = 1.0 / (6.0 * std::exp(2.0));
    std::vector<double> sups;
    sups.reserve(1000);
    const std::uint64_t stream = rng::stream_id(rng::Domain::mc_config, 99);
    for (int i = 0; i < 1000; ++i) {
        const double u = std::min(rng::u01(2026, stream, static_cast<std::uint64_t>(i)),
                                  1.0 - 1e-12);
        sups.push_back(u * limit);
    }
    std::sort(sups.begin(), sups.end());

    bool pass = true;
    double prev_c = 0.0;
    for (double m : sups) {
        const BoundConstants bc = constants_from_mpsup(m);
        if (!(bc.alpha > 0.0 && bc.alpha < 1.0)) pass = false;
        if (!(bc.beta > 0.0 && bc.beta < 1.0)) pass = false;
        if (!std::isfinite(bc.c_bound) || bc.c_bound <= prev_c) pass = false;
        prev_c = bc.c_bound;
    }
    return {pass, "1000 admissible sups: alpha, beta in (0,1), C finite and increasing (max C " +
                      fmt(prev_c) + ")"};
}

Outcome c09_screening(Context&) {
    const KernelSpec spec =
        make_kernel("zero_drift", {}, "trig_sigma", {1.0, 0.25, 1.0, 0.5}, 1);
    PhiField field(spec, cosine_density(1, 64, {0.2}));
    TripleOracle oracle(field, 32);

    struct Case {
        int n, m;
    };
    bool pass = true;
    std::string detail;
    for (const Case c : {Case{2, 1}, Case{3, 1}, Case{4, 1}, Case{2, 2}, Case{3, 2}}) {
        const EnumerationReport rep = enumerate_survivors(c.n, c.m);
        if (!rep.identities_ok) pass = false;
        if (static_cast<double>(rep.survivors) > rep.cap) pass = false;
        if (rep.stars_and_bars_formula != binomial(2 * c.m + c.n - 1, c.n - 1)) pass = false;
        if (static_cast<double>(rep.stars_and_bars_direct) != rep.stars_and_bars_formula)
            pass = false;

        // Every triple the screen rejects must integrate to (numerical) zero.
        const int slots = 6 * c.m;
        std::vector<int> digits(slots, 0);
        IndexTriple t;
        t.m = c.m;
        t.i.resize(2 * c.m);
        t.j.resize(2 * c.m);
        t.k.resize(2 * c.m);
        long long rejected = 0;
        long long violations = 0;
        while (true) {
            for (int l = 0; l < 2 * c.m; ++l) {
                t.i[l] = digits[l];
                t.j[l] = digits[2 * c.m + l];
                t.k[l] = digits[4 * c.m + l];
            }
            if (!survives(t)) {
                ++rejected;
                if (!oracle.vanishes(t, 1e-6)) ++violations;
            }
            int pos = slots - 1;
            while (pos >= 0 && ++digits[pos] == c.n) {
                digits[pos] = 0;
                --pos;
            }
            if (pos < 0) break;
        }
        if (rejected != rep.total - rep.survivors) pass = false;
        if (violations != 0) pass = false;
        detail += " (N=" + std::to_string(c.n) + ",m=" + std::to_string(c.m) + "): " +
                  std::to_string(rep.survivors) + "/" + std::to_string(rep.total) +
                  " survive, " + std::to_string(violations) + " oracle violations;";
    }
    return {pass, "screen vs quadrature oracle:" + detail};
}

Outcome c10_series_terms(Context& ctx) {
    if (!ctx.bc) return {false, "constants unavailable"};
    const PhiField& field = *ctx.field;
    const BoundConstants& bc = *ctx.bc;

    struct Case {
        int m, n;
    };
    bool pass = true;
    std::string detail;
    for (const Case c : {Case{1, 16}, Case{2, 16}, Case{1, 3}}) {
        const MomentEstimate est = moment_power_mc(field, bc.eta, c.n, c.m, 4000, 11);
        const double bound = series_term_bound(bc.m_p_sup, c.m, c.n);
        const double upper = est.mean + 3.0 * est.sigma;
        if (!(est.mean >= 0.0) || upper > bound) pass = false;
        detail += " (m=" + std::to_string(c.m) + ",N=" + std::to_string(c.n) + "): " +
                  fmt(upper) + " <= " + fmt(bound) + ";";
    }
    return {pass, "MC moment terms vs closed-form bounds:" + detail};
}

Outcome c11_determinism(Context& ctx) {
    if (!ctx.null_run) return {false, "null run unavailable"};
    const NullRun repeat = run_null_test();
    const bool pass = !ctx.null_run->csv.empty() && repeat.csv == ctx.null_run->csv;
    return {pass, pass ? "repeated run reproduced the report byte for byte"
                       : "repeated run produced different bytes"};
}

Outcome c12_picard_march(Context&) {
    const KernelSpec spec = trig_kernel(0.01);
    MeanFieldSolver solver(spec, 1, 64);
    const DensityGrid rho0 = cosine_density(1, 64, {0.1});
    const double t_end = 0.05;
    const double dt = 2e-5;

    const PicardResult pr = solver.picard(rho0, t_end, dt, 1e-8, 20);
    SolveOptions opt;
    opt.dt = dt;
    const auto snaps = solver.run(rho0, t_end, opt, {t_end});
    const double gap = l2_distance(pr.trajectory.back(), snaps.back());

    bool geometric = pr.converged && pr.residuals.size() >= 2;
    double worst_ratio = 0.0;
    for (std::size_t i = 1; i < pr.residuals.size(); ++i) {
        if (pr.residuals[i - 1] <= 0.0) {
            geometric = false;
            break;
        }
        const double ratio = pr.residuals[i] / pr.residuals[i - 1];
        worst_ratio = std::max(worst_ratio, ratio);
        if (ratio >= 0.9) geometric = false;
    }
    const bool pass = pr.converged && gap < 1e-7 && geometric;
    return {pass, "L2 gap " + fmt(gap) + " (budget 1e-07), " +
                      std::to_string(pr.iterations) + " sweeps, worst residual ratio " +
                      fmt(worst_ratio)};
}

} // namespace

int main() {
    struct Entry {
        const char* id;
        const char* name;
        std::function<Outcome(Context&)> fn;
    };
    const std::vector<Entry> entries = {
        {"C01", "heat_kernel_reduction", c01_heat_reduction},
        {"C02", "conservation_invariants", c02_invariants},
        {"C03", "independent_null_entropy", c03_null_entropy},
        {"C04", "entropy_decay_rate", c04_entropy_decay},
        {"C05", "l1_vs_entropy_bound", c05_l1_entropy_bound},
        {"C06", "convolution_cancellations", c06_cancellations},
        {"C07", "exponential_moment_bound", c07_exp_moment},
        {"C08", "constants_arithmetic", c08_constants_arithmetic},
        {"C09", "screening_soundness", c09_screening},
        {"C10", "series_term_bounds", c10_series_terms},
        {"C11", "determinism", c11_determinism},
        {"C12", "picard_march_agreement", c12_picard_march},
    };

    Context ctx;
    int failures = 0;
    for (const auto& entry : entries) {
        Outcome out;
        try {
            out = entry.fn(ctx);
        } catch (const std::exception& e) {
            out = {false, std::string("exception: ") + e.what()};
        }
        if (!out.pass) ++failures;
        std::printf("[%s] %s %s: %s\n", out.pass ? "PASS" : "FAIL", entry.id, entry.name,
                    out.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("acceptance: %d/%zu criteria passed\n", static_cast<int>(entries.size()) - failures,
                entries.size());
    return failures == 0 ? 0 : 1;
}
