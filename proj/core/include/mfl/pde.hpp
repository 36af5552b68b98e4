#pragma once

#include <string>
#include <vector>

#include "mfl/grid.hpp"
#include "mfl/kernel.hpp"

namespace mfl {

struct SolveOptions {
    double dt = 0.0;            ///< <= 0 selects the stability-limited step
    std::string scheme = "rk2"; ///< "rk2" (Heun) or "imex"
    double cfl_safety = 0.2;
    double mass_tol = 1e-8;
    bool dealias = true;
};

/// Running extrema of the solution and its derivatives over a march; inputs
/// to the a-priori constant of the chaos envelope.
struct TrajectoryNorms {
    double grad_sup = 0.0; ///< sup_t max_beta |d rho / dx_beta|_inf
    double hess_sup = 0.0; ///< sup_t max over second partials
    double inf_rho = 0.0;  ///< inf_t min_x rho
    double sup_rho = 0.0;

    void absorb(const TrajectoryNorms& other);
};

struct EnergyDiagnostics {
    double mass = 0.0;
    double min = 0.0;
    double max = 0.0;
    double l2 = 0.0;     ///< sqrt(int rho^2)
    double entropy = 0.0; ///< int rho log rho
};

struct PicardResult {
    std::vector<DensityGrid> trajectory; ///< state at every step time, size nsteps+1
    std::vector<double> residuals;       ///< sup-in-time L2 gap per sweep
    int iterations = 0;
    bool converged = false;
};

/// Pseudo-spectral solver for the nonlocal advection-diffusion equation
///     d_t rho + div((K * rho) rho) = sum_a d^2/dx_a^2 ((sigma_aa * rho)^2 rho)
/// on T^d. Products are formed pointwise and dealiased by the 2/3 rule;
/// derivatives and convolutions are spectral, so total mass is conserved to
/// roundoff by construction.
class MeanFieldSolver {
public:
    MeanFieldSolver(const KernelSpec& kernel, int dim, int n);

    int dim() const { return dim_; }
    int n() const { return n_; }

    /// Largest explicit step allowed by the diffusion stability limit.
    double stable_dt(double safety = 0.2) const;

    /// Nonlinear right-hand side at the given state.
    void rhs(const std::vector<double>& rho, std::vector<double>& out);

    /// One Heun (explicit trapezoid) step of the nonlinear equation.
    void step(DensityGrid& rho, double dt);

    /// One first-order IMEX step: the mean diffusion coefficient is treated
    /// implicitly (diagonal in Fourier), the remainder explicitly.
    void step_imex(DensityGrid& rho, double dt);

    /// March from rho to t_end. Snapshots are taken at each time in
    /// `record_at` (ascending, within [rho.time, t_end]); pass
    /// `norms` to accumulate derivative/positivity extrema over every step.
    std::vector<DensityGrid> run(DensityGrid rho, double t_end, const SolveOptions& opt,
                                 const std::vector<double>& record_at,
                                 TrajectoryNorms* norms = nullptr);

    EnergyDiagnostics diagnostics(const DensityGrid& rho);

    /// Extrema of rho and its grid derivatives at a single time.
    TrajectoryNorms grid_norms(const DensityGrid& rho);

    /// Fixed-point iteration for the same equation: solve the linear equation
    /// with coefficient fields frozen from the previous iterate's trajectory,
    /// starting from the constant-in-time iterate rho^0(t) = rho0. Residual
    /// is the sup-in-time L2 distance between consecutive iterates.
    PicardResult picard(const DensityGrid& rho0, double t_end, double dt, double tol,
                        int max_iter);

    const KernelSpec& kernel() const { return *kernel_; }

private:
    struct Coeffs {
        std::vector<double> vel[kMaxDim];  ///< V_b = K_b * rho
        std::vector<double> diff[kMaxDim]; ///< U_a = (sigma_aa * rho)^2
    };

    void coefficients_from(const std::vector<double>& rho, Coeffs& c);
    void rhs_linear(const std::vector<double>& rho, const Coeffs& c, std::vector<double>& out);

    const KernelSpec* kernel_;
    int dim_;
    int n_;
    Spectral spec_;
    std::vector<double> kfield_[kMaxDim]; ///< sampled drift components
    std::vector<double> sfield_[kMaxDim]; ///< sampled diagonal sigma entries
    bool drift_zero_ = false;
    // scratch
    std::vector<double> conv_, prod_, term_, k1_, k2_, stage_;
    Coeffs scratch_coeffs_;
};

} // namespace mfl
