#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/sampling.hpp"

namespace mfl {

struct SimConfig {
    double dt = 1e-3;
    double t_end = 0.25;
    std::string scheme = "euler_maruyama";
    std::uint64_t seed = 0;
    std::string interaction = "direct"; ///< "direct" or "cell_list"
    double cutoff = 0.5;                ///< cell_list reach in the max-norm
    bool include_self = true;           ///< keep the k=i term of the pair sums

    void validate() const;
};

struct EnsembleSnapshot {
    double time = 0.0;
    int dim = 1;
    int n_particles = 0;
    int n_replicas = 0;
    std::vector<double> positions; ///< ((r * N + i) * dim + a)

    double at(int replica, int particle, int axis) const {
        return positions[(static_cast<std::size_t>(replica) * static_cast<std::size_t>(n_particles) +
                          static_cast<std::size_t>(particle)) *
                             static_cast<std::size_t>(dim) +
                         static_cast<std::size_t>(axis)];
    }
};

/// M independent replicas of the interacting N-particle system, advanced by
/// Euler-Maruyama. Noise is counter-based and keyed by (seed, replica,
/// particle, step), so trajectories are reproducible regardless of the order
/// replicas are stepped in.
class ParticleEnsemble {
public:
    /// Optional deterministic noise override for tests: fill out[0..dim) with
    /// the Gaussian increments for (replica, particle) at the given step.
    using NoiseFn =
        std::function<void(int replica, int particle, std::int64_t step, double* out)>;

    ParticleEnsemble(int dim, int n_particles, int n_replicas, std::uint64_t seed);

    /// Draw all positions i.i.d. from the density (inverse-CDF in d=1,
    /// rejection in d=2); replica r, particle i uses its own counter stream.
    static ParticleEnsemble sample_initial(const DensityGrid& density, int n_particles,
                                           int n_replicas, std::uint64_t seed);

    int dim() const { return dim_; }
    int n_particles() const { return n_; }
    int n_replicas() const { return m_; }
    double time() const { return time_; }
    std::int64_t steps_taken() const { return step_; }
    std::uint64_t seed() const { return seed_; }

    double position(int replica, int particle, int axis) const {
        return pos_[flat(replica, particle, axis)];
    }
    void set_position(int replica, int particle, int axis, double v) {
        pos_[flat(replica, particle, axis)] = TorusPoint::wrap_coord(v);
    }

    /// One synchronous Euler-Maruyama step of every replica.
    void step(const KernelSpec& spec, double dt, const SimConfig& cfg,
              const NoiseFn& noise = nullptr);

    /// March to cfg.t_end, snapshotting at each checkpoint time (each must be
    /// an integer multiple of cfg.dt within rounding tolerance). An empty
    /// checkpoint list yields only the final state.
    std::vector<EnsembleSnapshot> run(const KernelSpec& spec, const SimConfig& cfg,
                                      const std::vector<double>& checkpoints,
                                      const NoiseFn& noise = nullptr);

    EnsembleSnapshot snapshot() const;

private:
    std::size_t flat(int r, int i, int a) const {
        return (static_cast<std::size_t>(r) * static_cast<std::size_t>(n_) +
                static_cast<std::size_t>(i)) *
                   static_cast<std::size_t>(dim_) +
               static_cast<std::size_t>(a);
    }

    void pair_sums_direct(const KernelSpec& spec, int replica, int particle, bool include_self,
                          double* drift, double* diag) const;
    void pair_sums_cells(const KernelSpec& spec, int replica, bool include_self, double cutoff,
                         std::vector<double>& drift_all, std::vector<double>& diag_all) const;

    int dim_;
    int n_;
    int m_;
    std::uint64_t seed_;
    double time_ = 0.0;
    std::int64_t step_ = 0;
    std::vector<double> pos_;
    std::vector<double> next_;
};

} // namespace mfl
