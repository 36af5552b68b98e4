#pragma once

#include <cstdint>
#include <vector>

#include "mfl/phi.hpp"

namespace mfl {

/// Diagnostic table of L^p(rho dx)-norm estimates for the scaled envelope
/// Phi(x) = eta * sup_{z,z'} |phi2(x, z, z')|, sampled on a dense grid.
struct MPTable {
    std::vector<double> p;       ///< probe exponents (1, 2, 4, 8, 16)
    std::vector<double> norm_p;  ///< grid estimate of ||Phi||_{L^p(rho dx)}
    double sup_ratio = 0.0;      ///< max over probes of ||Phi||_p / p
    double grid_linf = 0.0;      ///< grid sup of Phi
};

/// Constants entering the exponential-moment bound.  With
/// M = m_p_sup < 1/(6 e^2):
///   alpha = 32 e^3 M^2,  beta = (3 e^2 M)^2,
///   C = 2 (1 + 4 alpha / (1 - alpha)^3 + 1 / (1 - beta)).
struct BoundConstants {
    double b_amplitude = 0.0;  ///< pointwise bound B for |phi2|
    double eta = 0.0;          ///< scaling so that ||eta * phi2||_inf <= 1/(12 e^2)
    double m_p_sup = 0.0;      ///< certified value eta * B used for the constants
    double alpha = 0.0;
    double beta = 0.0;
    double c_bound = 0.0;
    MPTable table;             ///< grid diagnostics (estimates, not certificates)
};

/// Pure arithmetic: alpha, beta and C from a given m_p_sup.  Throws
/// ConfigError when m_p_sup is outside (0, 1/(6 e^2)).
BoundConstants constants_from_mpsup(double m_p_sup);

/// Full constants for a residual field.  When eta_given > 0 that value of eta
/// is used (and m_p_sup = eta * B must stay admissible); otherwise eta is the
/// canonical choice 1/(12 e^2 B).  probe_n controls the dense grid used for
/// the diagnostic table (0 selects a default by dimension).
BoundConstants constants(const PhiField& field, double eta_given = 0.0, int probe_n = 0);

/// Monte Carlo estimate with a bootstrap spread.
struct MomentEstimate {
    double mean = 0.0;
    double sigma = 0.0;        ///< bootstrap standard deviation of the mean
    int n_mc = 0;
    double max_exponent = 0.0; ///< largest exponent fed to exp (exp_moment_mc)
};

/// Sum over all ordered index triples (i, j, k) of phi2(x_i, x_j, x_k) for a
/// configuration of N points, via per-particle pair accumulators in
/// O(N^2 + N) background evaluations.
double grouped_triple_sum(const PhiField& field, const double* xs, int n_particles);

/// Same sum by direct O(N^3) evaluation (reference implementation).
double naive_triple_sum(const PhiField& field, const double* xs, int n_particles);

/// Estimates  E[ exp( (eta / N^2) sum_{i,j,k} phi2 ) ]  over i.i.d. samples of
/// N background-distributed particles.  Throws NumericalError if an exponent
/// exceeds the overflow guard.
MomentEstimate exp_moment_mc(const PhiField& field, double eta, int n_particles, int n_mc,
                             std::uint64_t seed);

/// Estimates  r_m = (2 / (2m)!) E[ ( (eta / N^2) sum_{i,j,k} phi2 )^{2m} ].
MomentEstimate moment_power_mc(const PhiField& field, double eta, int n_particles, int m,
                               int n_mc, std::uint64_t seed);

/// Series-term bounds from the combinatorial propositions, already including
/// the factor 2 in front of the even-term expansion:
///   4m > N:      2 (3 e^2 M)^{2m}
///   4 <= 4m <= N: 2 * 2 m^2 (sqrt(32 e^3) M)^{2m}
/// (m = 0 gives 2).  Throws ConfigError for m < 0.
double series_term_bound(double m_p_sup, int m, int n_particles);

} // namespace mfl
