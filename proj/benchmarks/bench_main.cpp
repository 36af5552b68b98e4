// Microbenchmarks for the inner loops that dominate the wall clock:
// pairwise drift/noise sums, one spectral step, pointwise phi2 evaluation,
// the grouped triple sum, and the binned entropy estimate.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <vector>

#include "mfl/chaos.hpp"
#include "mfl/ensemble.hpp"
#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/lde.hpp"
#include "mfl/pde.hpp"
#include "mfl/phi.hpp"
#include "mfl/rng.hpp"

namespace {

mfl::KernelSpec bench_kernel(int dim) {
    return mfl::make_kernel("trig_drift", {0.4, 1.0}, "trig_sigma", {1.0, 0.01, 1.0, 0.5}, dim);
}

std::vector<double> random_coords(int count, std::uint64_t seed) {
    std::vector<double> xs(static_cast<std::size_t>(count));
    std::uint64_t index = 0;
    for (int i = 0; i < count; i += 2) {
        const auto u = mfl::rng::u01_pair(seed, 17, index++);
        xs[static_cast<std::size_t>(i)] = u[0];
        if (i + 1 < count) {
            xs[static_cast<std::size_t>(i) + 1] = u[1];
        }
    }
    return xs;
}

void BM_ParticleStep(benchmark::State& state) {
    const int n_particles = static_cast<int>(state.range(0));
    const mfl::KernelSpec kernel = bench_kernel(1);
    mfl::SimConfig sim;
    sim.dt = 1e-3;
    sim.t_end = 1e-3;
    sim.seed = 42;
    const mfl::DensityGrid init = mfl::cosine_density(1, 64, {0.1});
    mfl::ParticleEnsemble ens =
        mfl::ParticleEnsemble::sample_initial(init, n_particles, 1, sim.seed);
    for (auto _ : state) {
        ens.step(kernel, sim.dt, sim);
    }
    state.SetItemsProcessed(state.iterations() * n_particles * n_particles);
}
BENCHMARK(BM_ParticleStep)->Arg(64)->Arg(256)->Arg(512);

void BM_PdeStep(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const mfl::KernelSpec kernel = bench_kernel(1);
    mfl::DensityGrid rho = mfl::cosine_density(1, n, {0.1});
    mfl::MeanFieldSolver solver(kernel, 1, n);
    const double dt = solver.stable_dt();
    for (auto _ : state) {
        solver.step(rho, dt);
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_PdeStep)->Arg(128)->Arg(256);

void BM_Phi2Eval(benchmark::State& state) {
    const mfl::KernelSpec kernel = bench_kernel(1);
    const mfl::DensityGrid background = mfl::cosine_density(1, 64, {0.1});
    const mfl::PhiField field(kernel, background);
    const std::vector<double> xs = random_coords(3 * 1024, 7);
    std::size_t i = 0;
    double acc = 0.0;
    for (auto _ : state) {
        acc += field.phi2(&xs[i], &xs[i + 1], &xs[i + 2]);
        i = (i + 3) % (xs.size() - 3);
    }
    benchmark::DoNotOptimize(acc);
}
BENCHMARK(BM_Phi2Eval);

void BM_GroupedTripleSum(benchmark::State& state) {
    const int n_particles = static_cast<int>(state.range(0));
    const mfl::KernelSpec kernel = bench_kernel(1);
    const mfl::DensityGrid background = mfl::cosine_density(1, 64, {0.1});
    const mfl::PhiField field(kernel, background);
    const std::vector<double> xs = random_coords(n_particles, 11);
    double acc = 0.0;
    for (auto _ : state) {
        acc += mfl::grouped_triple_sum(field, xs.data(), n_particles);
    }
    benchmark::DoNotOptimize(acc);
    state.SetItemsProcessed(state.iterations() * n_particles * n_particles);
}
BENCHMARK(BM_GroupedTripleSum)->Arg(32)->Arg(128)->Arg(512);

void BM_EntropyEstimate(benchmark::State& state) {
    const int samples = static_cast<int>(state.range(0));
    mfl::EnsembleSnapshot snap;
    snap.dim = 1;
    snap.n_particles = samples;
    snap.n_replicas = 1;
    snap.positions = random_coords(samples, 3);
    const mfl::DensityGrid limit = mfl::cosine_density(1, 64, {0.1});
    for (auto _ : state) {
        const mfl::MarginalEstimate marg = mfl::estimate_marginal(snap, 1, 16);
        const double h = mfl::relative_entropy(marg, limit, 1);
        benchmark::DoNotOptimize(h);
    }
    state.SetItemsProcessed(state.iterations() * samples);
}
BENCHMARK(BM_EntropyEstimate)->Arg(4096)->Arg(65536);

}  // namespace

BENCHMARK_MAIN();
