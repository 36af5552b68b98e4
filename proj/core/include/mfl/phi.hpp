#pragma once

#include <cstdint>
#include <vector>

#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"
#include "mfl/torus.hpp"

namespace mfl {

/// Residual fields that drive the fluctuation estimates.  Both compare a
/// pairwise kernel expression against its mean-field counterpart evaluated in
/// a fixed background density:
///
///   phi1(x, z)     = -(div K(x-z) - (div K * rho)(x))
///                    - (K(x-z) - (K * rho)(x)) . grad log rho(x)
///
///   phi2(x, z, z') = sum_a  d^2/dx_a^2 [ s_a(x-z) s_a(x-z') - (s_a*rho)(x)^2 ]
///                  + 2 d/dx_a [ ... ] * d_a log rho(x)
///                  + [ ... ] * (d^2_a rho(x) / rho(x))
///
/// with s_a the diagonal noise coefficients.  The background convolutions and
/// the log-derivative fields are cached in sparse trigonometric form so both
/// residuals can be evaluated at arbitrary (off-grid) points cheaply.
class PhiField {
public:
    PhiField(const KernelSpec& kernel, const DensityGrid& background);

    int dim() const { return dim_; }
    const KernelSpec& kernel() const { return kernel_; }
    const DensityGrid& background() const { return background_; }

    /// Pointwise residuals.  Arrays are length dim().
    double phi1(const double* x, const double* z) const;
    double phi2(const double* x, const double* z, const double* zp) const;

    /// Background-dependent building blocks, exposed for tests and for the
    /// grouped triple-sum evaluator.
    double rho(const double* x) const { return rho_f_.eval(x); }
    /// d^order (s_a * rho) at x, order in {0, 1, 2}; derivative along axis a.
    double conv_sigma(int alpha, int order, const double* x) const;
    double conv_drift(int beta, const double* x) const { return conv_k_[beta].eval(x); }
    double conv_div_drift(const double* x) const { return conv_divk_.eval(x); }
    /// d_a log rho = (d_a rho) / rho            at x.
    double log_rho_d(int alpha, const double* x) const;
    /// (d^2_a rho) / rho                        at x.
    double rho_dd_over_rho(int alpha, const double* x) const;

    /// Amplitude bound for |phi2|:
    ///   B = 8 d S2 + 8 d S2 |grad rho|_inf / inf rho + 2 d S2 |D^2 rho|_inf / inf rho
    /// with S2 the squared W^{2,inf} norm of the noise coefficients.  Uses the
    /// declared floor of the kernel family and spectral grid norms of the
    /// background.
    double amplitude_bound() const { return amplitude_; }
    double background_inf() const { return inf_rho_; }
    double background_grad_sup() const { return grad_sup_; }
    double background_hess_sup() const { return hess_sup_; }

    struct CancellationReport {
        /// max over probes of | int phi(x, .) rho(x) dx |  (integrate the
        /// first slot against the background).
        double first_slot_max = 0.0;
        /// max over probes of the remaining-slot integral:
        /// phi1: | int phi1(x, z) rho(z) dz |,
        /// phi2: | int int phi2(x, z, z') rho(z) rho(z') dz dz' |.
        double other_slots_max = 0.0;
        /// Probe realising each maximum (coordinates of the frozen slots).
        double first_slot_probe[2 * kMaxDim] = {0, 0, 0, 0};
        double other_slots_probe[kMaxDim] = {0, 0};
        int probes = 0;
        int quad_n = 0;
        bool passed(double tol) const {
            return first_slot_max < tol && other_slots_max < tol;
        }
    };

    /// Checks the exchangeability cancellations for both residual fields by
    /// periodic quadrature at quad_n nodes per axis (0 selects the background
    /// resolution).  Probe points are drawn uniformly from a counter stream
    /// keyed by seed.
    CancellationReport check_cancellations_phi1(int probe_count, std::uint64_t seed,
                                                int quad_n = 0) const;
    CancellationReport check_cancellations_phi2(int probe_count, std::uint64_t seed,
                                                int quad_n = 0) const;

private:
    double phi2_group(int alpha, const double* x, const double* z, const double* zp,
                      double l1, double l2) const;

    KernelSpec kernel_;
    DensityGrid background_;
    int dim_;
    SparseField rho_f_;
    SparseField rho_d_[kMaxDim];
    SparseField rho_dd_[kMaxDim];
    SparseField conv_s_[kMaxDim];
    SparseField conv_s_d_[kMaxDim];
    SparseField conv_s_dd_[kMaxDim];
    SparseField conv_k_[kMaxDim];
    SparseField conv_divk_;
    double inf_rho_ = 0.0;
    double grad_sup_ = 0.0;
    double hess_sup_ = 0.0;
    double amplitude_ = 0.0;
};

} // namespace mfl
