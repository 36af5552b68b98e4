#include "mfl/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {
namespace {

std::size_t ipow(std::size_t base, int exp) {
    std::size_t r = 1;
    for (int i = 0; i < exp; ++i) r *= base;
    return r;
}

// Flat cell index of one particle's position (axis 0 fastest).
std::size_t particle_cell(const EnsembleSnapshot& snap, int r, int i, int bins) {
    std::size_t idx = 0;
    for (int a = snap.dim - 1; a >= 0; --a) {
        const double x = snap.at(r, i, a);
        const int c = std::min(bins - 1, static_cast<int>(x * bins));
        idx = idx * static_cast<std::size_t>(bins) + static_cast<std::size_t>(c);
    }
    return idx;
}

double stddev(const std::vector<double>& v) {
    if (v.size() < 2) return 0.0;
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double s = 0.0;
    for (double x : v) s += (x - mean) * (x - mean);
    return std::sqrt(s / static_cast<double>(v.size()));
}

const double kE2 = std::exp(2.0);

} // namespace

int auto_bins(long n_samples, int dim_times_k, int grid_cap) {
    if (n_samples < 1) throw ConfigError("auto_bins: need samples");
    const double rule = std::pow(static_cast<double>(n_samples),
                                 1.0 / static_cast<double>(dim_times_k + 2));
    int bins = 2;
    while (2 * bins <= grid_cap && 2 * bins <= static_cast<int>(rule)) bins *= 2;
    return bins;
}

std::vector<double> bin_density(const DensityGrid& grid, int bins) {
    if (bins < 1 || bins > grid.n || grid.n % bins != 0)
        throw ConfigError("bin_density: bins must divide the grid resolution (bins=" +
                          std::to_string(bins) + ", n=" + std::to_string(grid.n) + ")");
    const int per = grid.n / bins;
    std::vector<double> q(ipow(static_cast<std::size_t>(bins), grid.dim), 0.0);
    const double w = 1.0 / static_cast<double>(grid.values.size());
    for (std::size_t flat = 0; flat < grid.values.size(); ++flat) {
        std::size_t idx = 0;
        for (int a = grid.dim - 1; a >= 0; --a) {
            const std::size_t nn = static_cast<std::size_t>(grid.n);
            const std::size_t j = (a == 0) ? (flat % nn) : (flat / nn);
            idx = idx * static_cast<std::size_t>(bins) + j / static_cast<std::size_t>(per);
        }
        q[idx] += grid.values[flat] * w;
    }
    return q;
}

ReplicaHistograms replica_histograms(const EnsembleSnapshot& snap, int k, int bins,
                                     long pair_cap, std::uint64_t seed) {
    if (k != 1 && k != 2) throw ConfigError("replica_histograms: k must be 1 or 2");
    if (bins < 2) throw ConfigError("replica_histograms: bins must be >= 2");
    if (k == 2 && snap.n_particles < 2)
        throw ConfigError("replica_histograms: pair marginal needs N >= 2");
    ReplicaHistograms reps;
    reps.order = k;
    reps.dim = snap.dim;
    reps.bins = bins;
    const std::size_t cells = ipow(static_cast<std::size_t>(bins), snap.dim * k);
    reps.counts.assign(static_cast<std::size_t>(snap.n_replicas),
                       std::vector<double>(cells, 0.0));
    reps.samples.assign(static_cast<std::size_t>(snap.n_replicas), 0);

    const int n = snap.n_particles;
    if (k == 1) {
        for (int r = 0; r < snap.n_replicas; ++r) {
            for (int i = 0; i < n; ++i)
                reps.counts[static_cast<std::size_t>(r)][particle_cell(snap, r, i, bins)] += 1.0;
            reps.samples[static_cast<std::size_t>(r)] = n;
        }
        return reps;
    }

    const long pairs_per_rep = static_cast<long>(n) * static_cast<long>(n - 1);
    const long total = pairs_per_rep * snap.n_replicas;
    const std::size_t cells1 = ipow(static_cast<std::size_t>(bins), snap.dim);
    auto add_pair = [&](int r, int i, int j) {
        const std::size_t c =
            particle_cell(snap, r, i, bins) * cells1 + particle_cell(snap, r, j, bins);
        reps.counts[static_cast<std::size_t>(r)][c] += 1.0;
        ++reps.samples[static_cast<std::size_t>(r)];
    };
    if (total <= pair_cap) {
        for (int r = 0; r < snap.n_replicas; ++r)
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    if (i != j) add_pair(r, i, j);
        return reps;
    }
    // Subsample (with replacement) an equal share of ordered pairs per replica.
    const long per_rep = std::max<long>(1, pair_cap / snap.n_replicas);
    for (int r = 0; r < snap.n_replicas; ++r) {
        const auto stream = rng::stream_id(rng::Domain::pair_sub, static_cast<std::uint32_t>(r), 0);
        for (long s = 0; s < per_rep; ++s) {
            const auto u = rng::u01_pair(seed, stream, static_cast<std::uint64_t>(s));
            long p = static_cast<long>(u[0] * static_cast<double>(pairs_per_rep));
            p = std::min(p, pairs_per_rep - 1);
            const int i = static_cast<int>(p / (n - 1));
            int j = static_cast<int>(p % (n - 1));
            if (j >= i) ++j;
            add_pair(r, i, j);
        }
    }
    return reps;
}

MarginalEstimate pool_histograms(const ReplicaHistograms& reps) {
    MarginalEstimate m;
    m.order = reps.order;
    m.dim = reps.dim;
    m.bins = reps.bins;
    if (reps.counts.empty()) throw ConfigError("pool_histograms: no replicas");
    m.histogram.assign(reps.counts.front().size(), 0.0);
    long total = 0;
    for (std::size_t r = 0; r < reps.counts.size(); ++r) {
        for (std::size_t c = 0; c < m.histogram.size(); ++c)
            m.histogram[c] += reps.counts[r][c];
        total += reps.samples[r];
    }
    const long min_needed = 10 * static_cast<long>(m.histogram.size());
    if (total < min_needed)
        throw ConfigError("pool_histograms: undersampled marginal, " + std::to_string(total) +
                          " pooled samples < required minimum " + std::to_string(min_needed));
    m.n_samples = total;
    for (double& c : m.histogram) c /= static_cast<double>(total);
    return m;
}

MarginalEstimate estimate_marginal(const EnsembleSnapshot& snap, int k, int bins, long pair_cap,
                                   std::uint64_t seed) {
    return pool_histograms(replica_histograms(snap, k, bins, pair_cap, seed));
}

namespace {

// Shared kernel of relative_entropy / l1_distance over the (possibly
// tensorized) binned limit.
template <typename F>
void for_cells(const MarginalEstimate& marg, const DensityGrid& limit, F&& f) {
    if (limit.min_value() <= 0.0)
        throw NumericalError("marginal metrics: limit density must be strictly positive");
    if (limit.dim != marg.dim)
        throw ConfigError("marginal metrics: limit dimension mismatch");
    const auto q1 = bin_density(limit, marg.bins);
    if (marg.order == 1) {
        for (std::size_t c = 0; c < marg.histogram.size(); ++c) f(marg.histogram[c], q1[c]);
    } else {
        const std::size_t cells1 = q1.size();
        for (std::size_t c = 0; c < marg.histogram.size(); ++c)
            f(marg.histogram[c], q1[c / cells1] * q1[c % cells1]);
    }
}

} // namespace

double relative_entropy(const MarginalEstimate& marg, const DensityGrid& limit, int k) {
    if (k != marg.order) throw ConfigError("relative_entropy: order mismatch");
    double h = 0.0;
    for_cells(marg, limit, [&](double p, double q) {
        if (p > 0.0) h += p * std::log(p / q);
    });
    return h / static_cast<double>(k);
}

double l1_distance(const MarginalEstimate& marg, const DensityGrid& limit, int k) {
    if (k != marg.order) throw ConfigError("l1_distance: order mismatch");
    double s = 0.0;
    for_cells(marg, limit, [&](double p, double q) { s += std::abs(p - q); });
    return s;
}

double plugin_bias(const MarginalEstimate& marg) {
    return (static_cast<double>(marg.cells()) - 1.0) /
           (2.0 * static_cast<double>(marg.n_samples) * static_cast<double>(marg.order));
}

double envelope_m(const KernelSpec& spec, const TrajectoryNorms& norms) {
    if (norms.inf_rho <= 0.0)
        throw NumericalError("envelope_m: trajectory infimum must be positive");
    const auto& kn = spec.norms();
    const double d = static_cast<double>(spec.dim());
    const double ratio1 = norms.grad_sup / norms.inf_rho;
    const double ratio2 = norms.hess_sup / norms.inf_rho;
    const double s2 = kn.sigma_w2inf * kn.sigma_w2inf;
    const double drift_term = (kn.k_inf + kn.divk_wneg) * ratio1;
    const double potential_term =
        d / (spec.sigma_floor() * spec.sigma_floor()) * kn.divk_wneg * kn.divk_wneg;
    const double noise_term =
        12.0 * kE2 * (8.0 * d * s2 + 8.0 * d * s2 * ratio1 + 2.0 * d * s2 * ratio2);
    return drift_term + potential_term + noise_term;
}

double theoretical_envelope_log(const KernelSpec& spec, const TrajectoryNorms& norms, double t,
                                int n_particles, double universal_c, double h0) {
    if (n_particles < 1) throw ConfigError("theoretical_envelope: need N >= 1");
    if (universal_c <= 0.0) throw ConfigError("theoretical_envelope: universal constant must be positive");
    const double m = envelope_m(spec, norms);
    return universal_c * m * t + std::log(h0 + 1.0 / static_cast<double>(n_particles));
}

double theoretical_envelope(const KernelSpec& spec, const TrajectoryNorms& norms, double t,
                            int n_particles, double universal_c, double h0) {
    const double lg = theoretical_envelope_log(spec, norms, t, n_particles, universal_c, h0);
    if (lg > 700.0) return std::numeric_limits<double>::infinity();
    return std::exp(lg);
}

RowStats row_stats(const EnsembleSnapshot& snap, const DensityGrid& limit,
                   const MetricsConfig& metrics) {
    RowStats out;
    const long s1 = static_cast<long>(snap.n_particles) * snap.n_replicas;
    const long pairs =
        static_cast<long>(snap.n_particles) * (snap.n_particles - 1) * snap.n_replicas;
    const int bins1 = metrics.bins > 0 ? metrics.bins
                                       : auto_bins(s1, snap.dim, std::min(metrics.grid_cap, limit.n));
    const int bins2 = metrics.bins > 0
                          ? metrics.bins
                          : auto_bins(std::min(pairs, metrics.pair_cap), 2 * snap.dim,
                                      std::min(metrics.grid_cap, limit.n));
    const auto reps1 = replica_histograms(snap, 1, bins1, metrics.pair_cap, metrics.seed);
    const auto reps2 = replica_histograms(snap, 2, bins2, metrics.pair_cap, metrics.seed);
    const auto m1 = pool_histograms(reps1);
    const auto m2 = pool_histograms(reps2);
    out.bins = bins1;
    out.samples_1 = m1.n_samples;
    out.samples_2 = m2.n_samples;
    out.h1 = relative_entropy(m1, limit, 1);
    out.h2 = relative_entropy(m2, limit, 2);
    out.l1_1 = l1_distance(m1, limit, 1);
    out.l1_2 = l1_distance(m2, limit, 2);

    // Paired bootstrap over replicas.
    const int m = snap.n_replicas;
    std::vector<double> bh1, bh2, bl1, bl2;
    bh1.reserve(static_cast<std::size_t>(metrics.bootstrap));
    bh2.reserve(static_cast<std::size_t>(metrics.bootstrap));
    bl1.reserve(static_cast<std::size_t>(metrics.bootstrap));
    bl2.reserve(static_cast<std::size_t>(metrics.bootstrap));
    MarginalEstimate r1 = m1, r2 = m2;
    for (int b = 0; b < metrics.bootstrap; ++b) {
        std::fill(r1.histogram.begin(), r1.histogram.end(), 0.0);
        std::fill(r2.histogram.begin(), r2.histogram.end(), 0.0);
        long t1 = 0, t2 = 0;
        const auto stream =
            rng::stream_id(rng::Domain::bootstrap, static_cast<std::uint32_t>(b), 0);
        for (int r = 0; r < m; ++r) {
            const auto u =
                rng::u01_pair(metrics.seed, stream, static_cast<std::uint64_t>(r));
            const int pick = std::min(m - 1, static_cast<int>(u[0] * m));
            const auto& c1 = reps1.counts[static_cast<std::size_t>(pick)];
            const auto& c2 = reps2.counts[static_cast<std::size_t>(pick)];
            for (std::size_t c = 0; c < c1.size(); ++c) r1.histogram[c] += c1[c];
            for (std::size_t c = 0; c < c2.size(); ++c) r2.histogram[c] += c2[c];
            t1 += reps1.samples[static_cast<std::size_t>(pick)];
            t2 += reps2.samples[static_cast<std::size_t>(pick)];
        }
        for (double& v : r1.histogram) v /= static_cast<double>(t1);
        for (double& v : r2.histogram) v /= static_cast<double>(t2);
        r1.n_samples = t1;
        r2.n_samples = t2;
        bh1.push_back(relative_entropy(r1, limit, 1));
        bh2.push_back(relative_entropy(r2, limit, 2));
        bl1.push_back(l1_distance(r1, limit, 1));
        bl2.push_back(l1_distance(r2, limit, 2));
    }
    out.sigma_h1 = stddev(bh1);
    out.sigma_h2 = stddev(bh2);
    out.sigma_l1_1 = stddev(bl1);
    out.sigma_l1_2 = stddev(bl2);
    return out;
}

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw ConfigError("fit_slope: need at least two matched points");
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    if (denom == 0.0) throw ConfigError("fit_slope: degenerate abscissae");
    return (n * sxy - sx * sy) / denom;
}

double density_kl(const DensityGrid& p, const DensityGrid& q) {
    if (p.dim != q.dim || p.n != q.n)
        throw ConfigError("density_kl: grids must share a shape");
    if (q.min_value() <= 0.0) throw NumericalError("density_kl: q must be strictly positive");
    double s = 0.0;
    for (std::size_t i = 0; i < p.values.size(); ++i)
        if (p.values[i] > 0.0) s += p.values[i] * std::log(p.values[i] / q.values[i]);
    return s / static_cast<double>(p.values.size());
}

ChaosReport chaos_sweep(const std::vector<int>& n_list, const std::vector<double>& checkpoints,
                        const KernelSpec& spec, const DensityGrid& init, double h0,
                        const std::vector<DensityGrid>& pde_traj, const TrajectoryNorms& norms,
                        const SimConfig& sim, int n_replicas, const MetricsConfig& metrics) {
    if (n_list.size() < 2) throw ConfigError("chaos_sweep: need at least two N values");
    for (std::size_t i = 0; i + 1 < n_list.size(); ++i)
        if (n_list[i + 1] <= n_list[i])
            throw ConfigError("chaos_sweep: N list must be strictly increasing");
    if (checkpoints.empty()) throw ConfigError("chaos_sweep: need at least one checkpoint");
    if (pde_traj.size() != checkpoints.size())
        throw ConfigError("chaos_sweep: limit trajectory does not match checkpoints");

    ChaosReport report;
    report.h0 = h0;
    report.m_value = envelope_m(spec, norms);
    SimConfig row_sim = sim;
    row_sim.t_end = checkpoints.back();

    for (int n_particles : n_list) {
        try {
            ParticleEnsemble ens =
                ParticleEnsemble::sample_initial(init, n_particles, n_replicas, sim.seed);
            const auto snaps = ens.run(spec, row_sim, checkpoints);
            for (std::size_t c = 0; c < checkpoints.size(); ++c) {
                ChaosRow row;
                row.n_particles = n_particles;
                row.t = checkpoints[c];
                const RowStats rs = row_stats(snaps[c], pde_traj[c], metrics);
                row.h1 = rs.h1;
                row.h2 = rs.h2;
                row.l1_1 = rs.l1_1;
                row.l1_2 = rs.l1_2;
                row.ckp_1 = std::sqrt(2.0 * 1.0 * rs.h1);
                row.ckp_2 = std::sqrt(2.0 * 2.0 * rs.h2);
                row.sigma_h1 = rs.sigma_h1;
                row.sigma_h2 = rs.sigma_h2;
                row.sigma_l1_1 = rs.sigma_l1_1;
                row.sigma_l1_2 = rs.sigma_l1_2;
                row.samples_1 = rs.samples_1;
                row.samples_2 = rs.samples_2;
                row.bins = rs.bins;
                row.m_value = report.m_value;
                row.log_envelope = theoretical_envelope_log(spec, norms, row.t, n_particles,
                                                            metrics.universal_c, h0);
                row.envelope = theoretical_envelope(spec, norms, row.t, n_particles,
                                                    metrics.universal_c, h0);
                report.rows.push_back(std::move(row));
            }
        } catch (const Error& e) {
            ChaosRow row;
            row.n_particles = n_particles;
            row.t = checkpoints.back();
            row.status = e.what();
            report.rows.push_back(std::move(row));
        }
    }

    // Slope of log H1 vs log N at the final checkpoint.
    std::vector<double> lx, ly;
    for (const auto& row : report.rows)
        if (row.status == "ok" && row.t == checkpoints.back() && row.h1 > 0.0) {
            lx.push_back(std::log(static_cast<double>(row.n_particles)));
            ly.push_back(std::log(row.h1));
        }
    if (lx.size() >= 2) report.slope = fit_slope(lx, ly);
    for (auto& row : report.rows) row.slope = report.slope;

    // Smallest universal constant for which every positive-time row sits
    // below its envelope (0 when the t=0 bound H0 + 1/N already dominates).
    double c_min = 0.0;
    for (const auto& row : report.rows)
        if (row.status == "ok" && row.t > 0.0 && row.h1 > 0.0 && report.m_value > 0.0) {
            const double need = (std::log(row.h1) -
                                 std::log(h0 + 1.0 / static_cast<double>(row.n_particles))) /
                                (report.m_value * row.t);
            c_min = std::max(c_min, need);
        }
    report.minimal_c = c_min;
    return report;
}

} // namespace mfl
