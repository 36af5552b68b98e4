#include "mfl/ensemble.hpp"

#include <cmath>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

void SimConfig::validate() const {
    if (!(dt > 0.0)) throw ConfigError("SimConfig: dt must be positive");
    if (!(t_end >= dt)) throw ConfigError("SimConfig: t_end must be at least dt");
    if (scheme != "euler_maruyama")
        throw ConfigError("SimConfig: unknown scheme '" + scheme + "' (only euler_maruyama)");
    if (interaction != "direct" && interaction != "cell_list")
        throw ConfigError("SimConfig: interaction must be 'direct' or 'cell_list'");
    if (interaction == "cell_list" && cutoff < 0.5)
        throw ConfigError("SimConfig: builtin kernels have global support, so cell_list "
                          "requires cutoff >= 0.5 (full torus reach); got " +
                          std::to_string(cutoff));
}

ParticleEnsemble::ParticleEnsemble(int dim, int n_particles, int n_replicas, std::uint64_t seed)
    : dim_(dim), n_(n_particles), m_(n_replicas), seed_(seed) {
    if (dim != 1 && dim != 2) throw ConfigError("ParticleEnsemble: dim must be 1 or 2");
    if (n_particles < 1) throw ConfigError("ParticleEnsemble: need at least one particle");
    if (n_replicas < 1) throw ConfigError("ParticleEnsemble: need at least one replica");
    pos_.assign(static_cast<std::size_t>(n_) * static_cast<std::size_t>(m_) *
                    static_cast<std::size_t>(dim_),
                0.0);
    next_ = pos_;
}

ParticleEnsemble ParticleEnsemble::sample_initial(const DensityGrid& density, int n_particles,
                                                  int n_replicas, std::uint64_t seed) {
    Spectral spectral(density.dim, density.n);
    DensitySampler sampler(density, spectral);
    ParticleEnsemble ens(density.dim, n_particles, n_replicas, seed);
    for (int r = 0; r < n_replicas; ++r) {
        for (int i = 0; i < n_particles; ++i) {
            std::uint64_t cursor = 0;
            const auto stream = rng::stream_id(rng::Domain::init_sample, static_cast<std::uint32_t>(r),
                                               static_cast<std::uint32_t>(i));
            const TorusPoint p = sampler.draw(seed, stream, cursor);
            for (int a = 0; a < ens.dim_; ++a) ens.pos_[ens.flat(r, i, a)] = p[a];
        }
    }
    return ens;
}

void ParticleEnsemble::pair_sums_direct(const KernelSpec& spec, int replica, int particle,
                                        bool include_self, double* drift, double* diag) const {
    const int d = dim_;
    double xi[kMaxDim] = {0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        xi[a] = pos_[flat(replica, particle, a)];
        drift[a] = 0.0;
        diag[a] = 0.0;
    }
    const bool no_drift = spec.drift_is_zero();
    double y[kMaxDim] = {0.0, 0.0};
    for (int j = 0; j < n_; ++j) {
        if (!include_self && j == particle) continue;
        for (int a = 0; a < d; ++a)
            y[a] = TorusPoint::wrap_diff(xi[a] - pos_[flat(replica, j, a)]);
        for (int a = 0; a < d; ++a) {
            if (!no_drift) drift[a] += spec.drift(a, y);
            diag[a] += spec.sigma(a, y);
        }
    }
    const double inv_n = 1.0 / static_cast<double>(n_);
    for (int a = 0; a < d; ++a) {
        drift[a] *= inv_n;
        diag[a] *= inv_n;
    }
}

void ParticleEnsemble::pair_sums_cells(const KernelSpec& spec, int replica, bool include_self,
                                       double cutoff, std::vector<double>& drift_all,
                                       std::vector<double>& diag_all) const {
    // Bucket particles into cells of side >= cutoff; only neighbor cells can
    // hold partners within the max-norm cutoff. For cutoff >= 1/2 this visits
    // every pair and reproduces the direct sums up to summation order.
    const int d = dim_;
    const int nc = std::max(1, static_cast<int>(std::floor(1.0 / cutoff)));
    const int ncells = (d == 2) ? nc * nc : nc;
    std::vector<std::vector<int>> cells(static_cast<std::size_t>(ncells));
    auto cell_of = [&](int i) {
        int c0 = std::min(nc - 1, static_cast<int>(pos_[flat(replica, i, 0)] * nc));
        if (d == 1) return c0;
        int c1 = std::min(nc - 1, static_cast<int>(pos_[flat(replica, i, 1)] * nc));
        return c1 * nc + c0;
    };
    for (int i = 0; i < n_; ++i) cells[static_cast<std::size_t>(cell_of(i))].push_back(i);

    const bool no_drift = spec.drift_is_zero();
    const double inv_n = 1.0 / static_cast<double>(n_);
    double y[kMaxDim] = {0.0, 0.0};
    for (int i = 0; i < n_; ++i) {
        double* drift = &drift_all[static_cast<std::size_t>(i) * kMaxDim];
        double* diag = &diag_all[static_cast<std::size_t>(i) * kMaxDim];
        for (int a = 0; a < d; ++a) drift[a] = diag[a] = 0.0;
        const int ci = cell_of(i);
        const int ci0 = ci % nc, ci1 = ci / nc;
        // Unique neighbor cells (offsets alias once nc <= 2).
        int cand[9];
        int ncand = 0;
        for (int d1 = (d == 2 ? -1 : 0); d1 <= (d == 2 ? 1 : 0); ++d1) {
            for (int d0 = -1; d0 <= 1; ++d0) {
                const int c0 = ((ci0 + d0) % nc + nc) % nc;
                const int c1 = (d == 2) ? (((ci1 + d1) % nc + nc) % nc) : 0;
                const int cell = c1 * nc + c0;
                bool seen = false;
                for (int s = 0; s < ncand; ++s) seen = seen || (cand[s] == cell);
                if (!seen) cand[ncand++] = cell;
            }
        }
        for (int s = 0; s < ncand; ++s) {
            for (int j : cells[static_cast<std::size_t>(cand[s])]) {
                if (!include_self && j == i) continue;
                bool in_range = true;
                for (int a = 0; a < d; ++a) {
                    y[a] = TorusPoint::wrap_diff(pos_[flat(replica, i, a)] -
                                                 pos_[flat(replica, j, a)]);
                    if (std::abs(y[a]) > cutoff) in_range = false;
                }
                if (!in_range) continue;
                for (int a = 0; a < d; ++a) {
                    if (!no_drift) drift[a] += spec.drift(a, y);
                    diag[a] += spec.sigma(a, y);
                }
            }
        }
        for (int a = 0; a < d; ++a) {
            drift[a] *= inv_n;
            diag[a] *= inv_n;
        }
    }
}

void ParticleEnsemble::step(const KernelSpec& spec, double dt, const SimConfig& cfg,
                            const NoiseFn& noise) {
    if (!(dt > 0.0)) throw ConfigError("ParticleEnsemble::step: dt must be positive");
    if (spec.dim() != dim_)
        throw ConfigError("ParticleEnsemble::step: kernel dimension mismatch");
    const double root = std::sqrt(2.0 * dt);
    const bool cells = (cfg.interaction == "cell_list");
    std::vector<double> drift_all, diag_all;
    if (cells) {
        drift_all.resize(static_cast<std::size_t>(n_) * kMaxDim);
        diag_all.resize(static_cast<std::size_t>(n_) * kMaxDim);
    }
    for (int r = 0; r < m_; ++r) {
        if (cells) pair_sums_cells(spec, r, cfg.include_self, cfg.cutoff, drift_all, diag_all);
        for (int i = 0; i < n_; ++i) {
            double drift[kMaxDim], diag[kMaxDim], xi[kMaxDim];
            if (cells) {
                for (int a = 0; a < dim_; ++a) {
                    drift[a] = drift_all[static_cast<std::size_t>(i) * kMaxDim + a];
                    diag[a] = diag_all[static_cast<std::size_t>(i) * kMaxDim + a];
                }
            } else {
                pair_sums_direct(spec, r, i, cfg.include_self, drift, diag);
            }
            if (noise) {
                noise(r, i, step_, xi);
            } else {
                const auto stream = rng::stream_id(rng::Domain::em_noise,
                                                   static_cast<std::uint32_t>(r),
                                                   static_cast<std::uint32_t>(i));
                const auto g = rng::gauss_pair(seed_, stream, static_cast<std::uint64_t>(step_));
                xi[0] = g[0];
                xi[1] = g[1];
            }
            for (int a = 0; a < dim_; ++a) {
                const double x = pos_[flat(r, i, a)] + dt * drift[a] + root * diag[a] * xi[a];
                if (!std::isfinite(x))
                    throw NumericalError("ParticleEnsemble: non-finite position in replica " +
                                         std::to_string(r) + " at step " + std::to_string(step_));
                next_[flat(r, i, a)] = TorusPoint::wrap_coord(x);
            }
        }
    }
    pos_.swap(next_);
    time_ += dt;
    ++step_;
}

std::vector<EnsembleSnapshot> ParticleEnsemble::run(const KernelSpec& spec, const SimConfig& cfg,
                                                    const std::vector<double>& checkpoints,
                                                    const NoiseFn& noise) {
    cfg.validate();
    const long nsteps = std::lround(cfg.t_end / cfg.dt);
    if (nsteps < 1 || std::abs(nsteps * cfg.dt - cfg.t_end) > 1e-9 * std::max(1.0, cfg.t_end))
        throw ConfigError("ParticleEnsemble::run: t_end must be an integer multiple of dt");
    std::vector<long> marks;
    marks.reserve(checkpoints.size());
    for (std::size_t c = 0; c < checkpoints.size(); ++c) {
        if (c > 0 && checkpoints[c] < checkpoints[c - 1])
            throw ConfigError("ParticleEnsemble::run: checkpoints must be ascending");
        const long k = std::lround(checkpoints[c] / cfg.dt);
        if (k < 0 || k > nsteps || std::abs(k * cfg.dt - checkpoints[c]) > 1e-9)
            throw ConfigError("ParticleEnsemble::run: checkpoint " + std::to_string(checkpoints[c]) +
                              " is not a step multiple within [0, t_end]");
        marks.push_back(k);
    }
    std::vector<EnsembleSnapshot> snaps;
    std::size_t next_mark = 0;
    while (next_mark < marks.size() && marks[next_mark] == 0) {
        snaps.push_back(snapshot());
        ++next_mark;
    }
    for (long k = 1; k <= nsteps; ++k) {
        step(spec, cfg.dt, cfg, noise);
        while (next_mark < marks.size() && marks[next_mark] == k) {
            snaps.push_back(snapshot());
            ++next_mark;
        }
    }
    if (checkpoints.empty()) snaps.push_back(snapshot());
    return snaps;
}

EnsembleSnapshot ParticleEnsemble::snapshot() const {
    EnsembleSnapshot s;
    s.time = time_;
    s.dim = dim_;
    s.n_particles = n_;
    s.n_replicas = m_;
    s.positions = pos_;
    return s;
}

} // namespace mfl
