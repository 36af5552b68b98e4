#pragma once

#include <array>
#include <string>
#include <vector>

#include "mfl/torus.hpp"

namespace mfl {

/// One trigonometric mode amp * sin(2*pi*mode*y[axis]) (or cos). All builtin
/// kernels are finite sums of these, so every derivative and convolution the
/// rest of the system needs has an exact closed form.
struct TrigTerm {
    double amp = 0.0;
    int mode = 1;        ///< integer frequency >= 1
    int axis = 0;        ///< coordinate the wave depends on
    bool is_cos = false; ///< cos instead of sin
};

/// Scalar field base + sum of trig terms on T^d.
struct TrigScalar {
    double base = 0.0;
    std::vector<TrigTerm> terms;

    double eval(const double* y) const;
    /// First partial derivative with respect to y[gamma].
    double partial(int gamma, const double* y) const;
    /// Second partial derivative d^2/dy[gamma]^2.
    double partial2(int gamma, const double* y) const;
    /// Exact mean over the torus (trig terms integrate to zero).
    double mean() const { return base; }
    bool is_constant() const { return terms.empty(); }
};

/// Sup-norm data entering the entropy-bound constant. The homogeneous
/// negative-Sobolev norm of div K is reported through ||g||_inf for the
/// declared potential g with div g = div K (a certified upper bound for the
/// infimum over all such potentials).
struct KernelNorms {
    double k_inf = 0.0;        ///< ||K||_inf (dense sampling)
    double divk_wneg = 0.0;    ///< ||g||_inf upper bound for ||div K||_{W^{-1,inf}}
    double sigma_w2inf = 0.0;  ///< max of sup|sigma|, sup|d sigma|, sup|d^2 sigma|
    double sigma_min = 0.0;    ///< min over grid and alpha of sigma_aa
};

/// The interaction pair (K, sigma) with analytic derivatives, a divergence
/// potential, and cached norm data. Immutable after construction; all
/// evaluation operations are pure and safe to share across workers.
///
/// K : T^d -> R^d is the drift kernel, sigma holds the d diagonal entries
/// sigma_aa : T^d -> R of the (diagonal) diffusion kernel. sigma_floor is the
/// uniform ellipticity constant: sigma_aa > sigma_floor everywhere.
class KernelSpec {
public:
    KernelSpec(int dim,
               std::array<TrigScalar, kMaxDim> drift,
               std::array<TrigScalar, kMaxDim> drift_potential,
               std::array<TrigScalar, kMaxDim> sigma,
               double sigma_floor,
               std::string name);

    int dim() const { return dim_; }
    const std::string& name() const { return name_; }
    double sigma_floor() const { return sigma_floor_; }
    const KernelNorms& norms() const { return norms_; }

    /// K_beta(y), the beta-th drift component at displacement y.
    double drift(int beta, const double* y) const { return drift_[beta].eval(y); }
    /// Declared divergence of K at y (sum of analytic partials).
    double drift_div(const double* y) const;
    /// g_beta(y): declared potential with div g = div K.
    double potential(int beta, const double* y) const { return pot_[beta].eval(y); }
    /// sigma_aa(y).
    double sigma(int alpha, const double* y) const { return sigma_[alpha].eval(y); }
    /// d/dy[gamma] sigma_aa(y).
    double sigma_d(int alpha, int gamma, const double* y) const {
        return sigma_[alpha].partial(gamma, y);
    }
    /// d^2/dy[gamma]^2 sigma_aa(y).
    double sigma_dd(int alpha, int gamma, const double* y) const {
        return sigma_[alpha].partial2(gamma, y);
    }

    const TrigScalar& drift_component(int beta) const { return drift_[beta]; }
    const TrigScalar& sigma_component(int alpha) const { return sigma_[alpha]; }

    bool drift_is_zero() const;
    bool sigma_is_constant() const;

    /// Recompute norm data by dense sampling with grid_pts nodes per axis.
    KernelNorms norm_audit(int grid_pts) const;

    /// Check declared derivatives and the potential against centered finite
    /// differences on a grid (tolerance 10*h^2); throws NumericalError on
    /// mismatch. Also checks the declared divergence has zero mean and that
    /// sigma clears the floor at every node.
    void validate(int grid_pts) const;

private:
    int dim_;
    std::array<TrigScalar, kMaxDim> drift_;
    std::array<TrigScalar, kMaxDim> pot_;
    std::array<TrigScalar, kMaxDim> sigma_;
    double sigma_floor_;
    std::string name_;
    KernelNorms norms_;
};

/// Named builtin families:
///   zero_drift      []                      K == 0, g == 0
///   trig_drift      [amp, mode]             K_b(y) = amp*sin(2*pi*mode*y_b), g = K
///   constant_sigma  [c, floor]              sigma_aa == c
///   trig_sigma      [base, amp, mode, floor] sigma_aa(y) = base + amp*sin(2*pi*mode*y_a)
/// A family fills its side of the pair; the other side gets the neutral
/// default (zero drift / unit constant sigma with floor 0.5).
KernelSpec builtin_kernel(const std::string& name, int dim, const std::vector<double>& params);

/// Build the pair explicitly from a drift family and a sigma family.
KernelSpec make_kernel(const std::string& drift_name, const std::vector<double>& drift_params,
                       const std::string& sigma_name, const std::vector<double>& sigma_params,
                       int dim);

} // namespace mfl
