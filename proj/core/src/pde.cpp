#include "mfl/pde.hpp"

#include <algorithm>
#include <cmath>

#include "mfl/errors.hpp"

namespace mfl {
namespace {

double l2_distance(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = a[i] - b[i];
        s += d * d;
    }
    return std::sqrt(s / static_cast<double>(a.size()));
}

} // namespace

void TrajectoryNorms::absorb(const TrajectoryNorms& other) {
    grad_sup = std::max(grad_sup, other.grad_sup);
    hess_sup = std::max(hess_sup, other.hess_sup);
    inf_rho = std::min(inf_rho, other.inf_rho);
    sup_rho = std::max(sup_rho, other.sup_rho);
}

MeanFieldSolver::MeanFieldSolver(const KernelSpec& kernel, int dim, int n)
    : kernel_(&kernel), dim_(dim), n_(n), spec_(dim, n) {
    if (kernel.dim() != dim)
        throw ConfigError("MeanFieldSolver: kernel dimension " + std::to_string(kernel.dim()) +
                          " does not match grid dimension " + std::to_string(dim));
    drift_zero_ = kernel.drift_is_zero();
    for (int beta = 0; beta < dim_; ++beta) {
        kfield_[beta] = sample_field(dim_, n_, kernel.drift_component(beta)).values;
        sfield_[beta] = sample_field(dim_, n_, kernel.sigma_component(beta)).values;
    }
}

double MeanFieldSolver::stable_dt(double safety) const {
    const double dx = 1.0 / static_cast<double>(n_);
    const double s2 = kernel_->norms().sigma_w2inf * kernel_->norms().sigma_w2inf;
    if (s2 <= 0.0) throw ConfigError("MeanFieldSolver: degenerate sigma norm");
    return safety * dx * dx / s2;
}

void MeanFieldSolver::coefficients_from(const std::vector<double>& rho, Coeffs& c) {
    for (int beta = 0; beta < dim_; ++beta) {
        if (!drift_zero_) spec_.convolve(kfield_[beta], rho, c.vel[beta]);
        spec_.convolve(sfield_[beta], rho, conv_);
        auto& u = c.diff[beta];
        u.resize(conv_.size());
        for (std::size_t i = 0; i < conv_.size(); ++i) u[i] = conv_[i] * conv_[i];
        spec_.dealias(u);
    }
}

void MeanFieldSolver::rhs_linear(const std::vector<double>& rho, const Coeffs& c,
                                 std::vector<double>& out) {
    out.assign(rho.size(), 0.0);
    for (int beta = 0; beta < dim_; ++beta) {
        if (!drift_zero_) {
            prod_.resize(rho.size());
            for (std::size_t i = 0; i < rho.size(); ++i) prod_[i] = c.vel[beta][i] * rho[i];
            spec_.dealias(prod_);
            spec_.derivative(prod_, beta, 1, term_);
            for (std::size_t i = 0; i < rho.size(); ++i) out[i] -= term_[i];
        }
        prod_.resize(rho.size());
        for (std::size_t i = 0; i < rho.size(); ++i) prod_[i] = c.diff[beta][i] * rho[i];
        spec_.dealias(prod_);
        spec_.derivative(prod_, beta, 2, term_);
        for (std::size_t i = 0; i < rho.size(); ++i) out[i] += term_[i];
    }
}

void MeanFieldSolver::rhs(const std::vector<double>& rho, std::vector<double>& out) {
    coefficients_from(rho, scratch_coeffs_);
    rhs_linear(rho, scratch_coeffs_, out);
}

void MeanFieldSolver::step(DensityGrid& rho, double dt) {
    rhs(rho.values, k1_);
    stage_.resize(rho.values.size());
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        stage_[i] = rho.values[i] + dt * k1_[i];
    rhs(stage_, k2_);
    for (std::size_t i = 0; i < rho.values.size(); ++i)
        rho.values[i] += 0.5 * dt * (k1_[i] + k2_[i]);
    rho.time += dt;
}

void MeanFieldSolver::step_imex(DensityGrid& rho, double dt) {
    coefficients_from(rho.values, scratch_coeffs_);
    // Split the mean of each diffusion coefficient into the implicit operator.
    double cbar[kMaxDim] = {0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        double s = 0.0;
        for (double v : scratch_coeffs_.diff[a]) s += v;
        cbar[a] = s / static_cast<double>(scratch_coeffs_.diff[a].size());
    }
    rhs_linear(rho.values, scratch_coeffs_, k1_);
    for (int a = 0; a < dim_; ++a) {
        spec_.derivative(rho.values, a, 2, term_);
        for (std::size_t i = 0; i < rho.values.size(); ++i) k1_[i] -= cbar[a] * term_[i];
    }
    for (std::size_t i = 0; i < rho.values.size(); ++i) rho.values[i] += dt * k1_[i];
    spec_.helmholtz_solve(rho.values, cbar, dt);
    rho.time += dt;
}

std::vector<DensityGrid> MeanFieldSolver::run(DensityGrid rho, double t_end,
                                              const SolveOptions& opt,
                                              const std::vector<double>& record_at,
                                              TrajectoryNorms* norms) {
    rho.check_invariants(true, opt.mass_tol);
    if (static_cast<int>(rho.values.size()) != (dim_ == 2 ? n_ * n_ : n_) || rho.dim != dim_)
        throw ConfigError("MeanFieldSolver::run: state does not match solver shape");
    if (t_end < rho.time) throw ConfigError("MeanFieldSolver::run: t_end precedes state time");
    for (std::size_t i = 0; i + 1 < record_at.size(); ++i)
        if (record_at[i + 1] < record_at[i])
            throw ConfigError("MeanFieldSolver::run: record times must be ascending");
    if (!record_at.empty() &&
        (record_at.front() < rho.time - 1e-12 || record_at.back() > t_end + 1e-12))
        throw ConfigError("MeanFieldSolver::run: record times outside march interval");

    const bool imex = (opt.scheme == "imex");
    if (!imex && opt.scheme != "rk2")
        throw ConfigError("MeanFieldSolver::run: unknown scheme '" + opt.scheme + "'");
    double dt = opt.dt > 0.0 ? opt.dt : stable_dt(opt.cfl_safety);
    if (!imex && dt > stable_dt(1.0))
        throw ConfigError("MeanFieldSolver::run: dt=" + std::to_string(dt) +
                          " exceeds the explicit stability limit " +
                          std::to_string(stable_dt(1.0)));

    std::vector<DensityGrid> snaps;
    std::size_t next = 0;
    auto maybe_record = [&]() {
        while (next < record_at.size() && rho.time >= record_at[next] - 1e-12) {
            snaps.push_back(rho);
            ++next;
        }
    };
    if (norms) *norms = grid_norms(rho);
    maybe_record();

    const double eps = 1e-12 * std::max(1.0, std::abs(t_end));
    while (rho.time < t_end - eps) {
        double h = std::min(dt, t_end - rho.time);
        if (next < record_at.size()) h = std::min(h, record_at[next] - rho.time);
        if (h <= 0.0) h = eps;
        if (imex)
            step_imex(rho, h);
        else
            step(rho, h);
        rho.check_invariants(true, opt.mass_tol);
        if (norms) norms->absorb(grid_norms(rho));
        maybe_record();
    }
    return snaps;
}

EnergyDiagnostics MeanFieldSolver::diagnostics(const DensityGrid& rho) {
    EnergyDiagnostics d;
    d.mass = rho.integral();
    d.min = rho.min_value();
    d.max = rho.max_value();
    double s2 = 0.0, ent = 0.0;
    for (double v : rho.values) {
        s2 += v * v;
        ent += (v > 0.0) ? v * std::log(v) : 0.0;
    }
    d.l2 = std::sqrt(s2 / static_cast<double>(rho.values.size()));
    d.entropy = ent / static_cast<double>(rho.values.size());
    return d;
}

TrajectoryNorms MeanFieldSolver::grid_norms(const DensityGrid& rho) {
    TrajectoryNorms t;
    t.inf_rho = rho.min_value();
    t.sup_rho = rho.max_value();
    auto max_abs = [](const std::vector<double>& v) {
        double m = 0.0;
        for (double x : v) m = std::max(m, std::abs(x));
        return m;
    };
    for (int beta = 0; beta < dim_; ++beta) {
        spec_.derivative(rho.values, beta, 1, term_);
        t.grad_sup = std::max(t.grad_sup, max_abs(term_));
        spec_.derivative(rho.values, beta, 2, prod_);
        t.hess_sup = std::max(t.hess_sup, max_abs(prod_));
    }
    if (dim_ == 2) {
        spec_.derivative(rho.values, 0, 1, term_);
        spec_.derivative(term_, 1, 1, prod_);
        t.hess_sup = std::max(t.hess_sup, max_abs(prod_));
    }
    return t;
}

PicardResult MeanFieldSolver::picard(const DensityGrid& rho0, double t_end, double dt,
                                     double tol, int max_iter) {
    rho0.check_invariants(true, 1e-8);
    if (dt <= 0.0 || t_end <= 0.0)
        throw ConfigError("MeanFieldSolver::picard: dt and t_end must be positive");
    if (max_iter < 1) throw ConfigError("MeanFieldSolver::picard: max_iter must be >= 1");
    const int nsteps = std::max(1, static_cast<int>(std::lround(t_end / dt)));
    const double h = t_end / static_cast<double>(nsteps); // uniform step hitting t_end exactly

    PicardResult result;
    // Iterate 0 is frozen at the initial state for all times.
    result.trajectory.assign(static_cast<std::size_t>(nsteps) + 1, rho0);
    for (int k = 0; k <= nsteps; ++k)
        result.trajectory[static_cast<std::size_t>(k)].time = rho0.time + k * h;

    Coeffs c_now, c_next;
    std::vector<DensityGrid> next_traj(result.trajectory.size());
    for (int sweep = 1; sweep <= max_iter; ++sweep) {
        DensityGrid rho = rho0;
        next_traj[0] = rho;
        for (int k = 0; k < nsteps; ++k) {
            // Heun with coefficients frozen from the previous iterate at the
            // two stage times.
            coefficients_from(result.trajectory[static_cast<std::size_t>(k)].values, c_now);
            coefficients_from(result.trajectory[static_cast<std::size_t>(k) + 1].values, c_next);
            rhs_linear(rho.values, c_now, k1_);
            stage_.resize(rho.values.size());
            for (std::size_t i = 0; i < rho.values.size(); ++i)
                stage_[i] = rho.values[i] + h * k1_[i];
            rhs_linear(stage_, c_next, k2_);
            for (std::size_t i = 0; i < rho.values.size(); ++i)
                rho.values[i] += 0.5 * h * (k1_[i] + k2_[i]);
            rho.time += h;
            rho.check_invariants(true, 1e-8);
            next_traj[static_cast<std::size_t>(k) + 1] = rho;
        }
        double resid = 0.0;
        for (std::size_t k = 0; k < next_traj.size(); ++k)
            resid = std::max(resid,
                             l2_distance(next_traj[k].values, result.trajectory[k].values));
        result.trajectory.swap(next_traj);
        result.residuals.push_back(resid);
        result.iterations = sweep;
        if (resid < tol) {
            result.converged = true;
            break;
        }
    }
    return result;
}

} // namespace mfl
