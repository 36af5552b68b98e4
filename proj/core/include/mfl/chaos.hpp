#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mfl/ensemble.hpp"
#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/pde.hpp"

namespace mfl {

/// Normalized histogram of the pooled k-particle samples on (T^d)^k.
struct MarginalEstimate {
    int order = 1;     ///< k in {1, 2}
    int dim = 1;       ///< d of the underlying torus
    int bins = 0;      ///< per axis
    long n_samples = 0;
    std::vector<double> histogram; ///< size bins^(d*k), sums to 1

    std::size_t cells() const { return histogram.size(); }
};

/// Per-replica histogram counts, the unit the bootstrap resamples over.
struct ReplicaHistograms {
    int order = 1;
    int dim = 1;
    int bins = 0;
    std::vector<std::vector<double>> counts; ///< one vector of cell counts per replica
    std::vector<long> samples;               ///< pooled sample count per replica
};

struct MetricsConfig {
    int bins = 0;          ///< 0 selects bins = samples^(1/(dk+2)) rounded down to a power of two
    int grid_cap = 128;    ///< bins never exceed the PDE grid resolution
    int bootstrap = 200;   ///< resamples for statistical tolerances
    long pair_cap = 200000; ///< max pooled ordered pairs for k=2
    double universal_c = 1.0;
    std::uint64_t seed = 0; ///< bootstrap / subsample stream seed
};

/// One (N, t) row of the sweep report. Sigma fields are bootstrap standard
/// deviations (not serialized in the pinned CSV schema).
struct ChaosRow {
    int n_particles = 0;
    double t = 0.0;
    double h1 = 0.0, h2 = 0.0;
    double l1_1 = 0.0, l1_2 = 0.0;
    double ckp_1 = 0.0, ckp_2 = 0.0;
    double envelope = 0.0;     ///< e^(C M t) (H0 + 1/N), +inf if it overflows
    double log_envelope = 0.0; ///< C M t + log(H0 + 1/N), always finite
    double m_value = 0.0;
    double slope = 0.0;        ///< final-time fit, repeated on every row
    double sigma_h1 = 0.0, sigma_h2 = 0.0, sigma_l1_1 = 0.0, sigma_l1_2 = 0.0;
    long samples_1 = 0, samples_2 = 0;
    int bins = 0;
    std::string status = "ok";
};

struct ChaosReport {
    std::vector<ChaosRow> rows;
    double slope = 0.0;      ///< fitted d log H1 / d log N at the final checkpoint
    double minimal_c = 0.0;  ///< smallest universal constant making every row envelope-valid
    double m_value = 0.0;
    double h0 = 0.0;
};

/// Bin count from the samples^(1/(dk+2)) rule, rounded down to a power of two
/// in [2, grid_cap] so bins always divide the PDE grid.
int auto_bins(long n_samples, int dim_times_k, int grid_cap);

/// Integrate a density over the bins^d cells (bins must divide grid.n).
std::vector<double> bin_density(const DensityGrid& grid, int bins);

/// Histogram the pooled k-particle samples of each replica. k=1 pools all
/// N*M positions; k=2 pools all ordered pairs (i,j), i != j, subsampled to
/// pair_cap (spread evenly over replicas) when the total exceeds the cap.
ReplicaHistograms replica_histograms(const EnsembleSnapshot& snap, int k, int bins,
                                     long pair_cap, std::uint64_t seed);

/// Pool the per-replica counts into a normalized estimate. Throws when the
/// pooled sample count is below 10 * bins^(dk).
MarginalEstimate pool_histograms(const ReplicaHistograms& reps);

MarginalEstimate estimate_marginal(const EnsembleSnapshot& snap, int k, int bins,
                                   long pair_cap = 200000, std::uint64_t seed = 0);

/// Rescaled relative entropy (1/k) sum_cell p log(p/q) against the binned
/// tensor power of the limit density. Nonnegative by Gibbs' inequality.
double relative_entropy(const MarginalEstimate& marg, const DensityGrid& limit, int k);

/// sum_cell |p - q| in [0, 2].
double l1_distance(const MarginalEstimate& marg, const DensityGrid& limit, int k);

/// Analytic chi^2/2 bias of the plug-in entropy: (cells - 1) / (2 samples).
double plugin_bias(const MarginalEstimate& marg);

/// The a-priori constant M assembled from kernel norms and solution extrema.
double envelope_m(const KernelSpec& spec, const TrajectoryNorms& norms);

/// log of e^(C M t) (h0 + 1/N); finite even when the envelope overflows.
double theoretical_envelope_log(const KernelSpec& spec, const TrajectoryNorms& norms, double t,
                                int n_particles, double universal_c, double h0 = 0.0);

double theoretical_envelope(const KernelSpec& spec, const TrajectoryNorms& norms, double t,
                            int n_particles, double universal_c, double h0 = 0.0);

/// Entropy/L1/CKP estimates with bootstrap tolerances for one snapshot
/// against the limit density at the matching time.
struct RowStats {
    double h1 = 0.0, h2 = 0.0, l1_1 = 0.0, l1_2 = 0.0;
    double sigma_h1 = 0.0, sigma_h2 = 0.0, sigma_l1_1 = 0.0, sigma_l1_2 = 0.0;
    long samples_1 = 0, samples_2 = 0;
    int bins = 0;
};
RowStats row_stats(const EnsembleSnapshot& snap, const DensityGrid& limit,
                   const MetricsConfig& metrics);

/// Least-squares slope of y against x.
double fit_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Pointwise relative entropy int p log(p/q) of two grids (same shape, q > 0).
double density_kl(const DensityGrid& p, const DensityGrid& q);

/// Headline experiment: for each N, sample an ensemble from init (i.i.d.),
/// march it, and score every checkpoint against the limit trajectory
/// (pde_traj[c] at checkpoints[c], norms accumulated over the march). `init`
/// may differ from the limit initial state; pass its relative entropy as h0.
ChaosReport chaos_sweep(const std::vector<int>& n_list, const std::vector<double>& checkpoints,
                        const KernelSpec& spec, const DensityGrid& init, double h0,
                        const std::vector<DensityGrid>& pde_traj, const TrajectoryNorms& norms,
                        const SimConfig& sim, int n_replicas, const MetricsConfig& metrics);

} // namespace mfl
