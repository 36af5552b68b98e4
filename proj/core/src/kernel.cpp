#include "mfl/kernel.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace mfl {

namespace {
constexpr double kTwoPi = 2.0 * std::numbers::pi;
} // namespace

double TrigScalar::eval(const double* y) const {
    double v = base;
    for (const TrigTerm& t : terms) {
        const double u = kTwoPi * t.mode * y[t.axis];
        v += t.amp * (t.is_cos ? std::cos(u) : std::sin(u));
    }
    return v;
}

double TrigScalar::partial(int gamma, const double* y) const {
    double v = 0.0;
    for (const TrigTerm& t : terms) {
        if (t.axis != gamma) continue;
        const double w = kTwoPi * t.mode;
        const double u = w * y[t.axis];
        // (sin)' = cos, (cos)' = -sin
        v += t.amp * w * (t.is_cos ? -std::sin(u) : std::cos(u));
    }
    return v;
}

double TrigScalar::partial2(int gamma, const double* y) const {
    double v = 0.0;
    for (const TrigTerm& t : terms) {
        if (t.axis != gamma) continue;
        const double w = kTwoPi * t.mode;
        const double u = w * y[t.axis];
        v += -t.amp * w * w * (t.is_cos ? std::cos(u) : std::sin(u));
    }
    return v;
}

KernelSpec::KernelSpec(int dim,
                       std::array<TrigScalar, kMaxDim> drift,
                       std::array<TrigScalar, kMaxDim> drift_potential,
                       std::array<TrigScalar, kMaxDim> sigma,
                       double sigma_floor,
                       std::string name)
    : dim_(dim),
      drift_(std::move(drift)),
      pot_(std::move(drift_potential)),
      sigma_(std::move(sigma)),
      sigma_floor_(sigma_floor),
      name_(std::move(name)) {
    if (dim_ < 1 || dim_ > kMaxDim) throw ConfigError("KernelSpec: dim must be 1 or 2");
    if (sigma_floor_ <= 0.0) throw ConfigError("KernelSpec: sigma_floor must be positive");
    norms_ = norm_audit(64);
    if (norms_.sigma_min <= sigma_floor_) {
        std::ostringstream os;
        os << "KernelSpec '" << name_ << "': uniform ellipticity violated, min sigma = "
           << norms_.sigma_min << " does not clear the floor " << sigma_floor_;
        throw ConfigError(os.str());
    }
}

double KernelSpec::drift_div(const double* y) const {
    double v = 0.0;
    for (int b = 0; b < dim_; ++b) v += drift_[b].partial(b, y);
    return v;
}

bool KernelSpec::drift_is_zero() const {
    for (int b = 0; b < dim_; ++b)
        if (drift_[b].base != 0.0 || !drift_[b].terms.empty()) return false;
    return true;
}

bool KernelSpec::sigma_is_constant() const {
    for (int a = 0; a < dim_; ++a)
        if (!sigma_[a].is_constant()) return false;
    return true;
}

KernelNorms KernelSpec::norm_audit(int grid_pts) const {
    if (grid_pts < 16) throw ConfigError("norm_audit: grid_pts must be >= 16 per axis");
    KernelNorms n;
    n.sigma_min = std::numeric_limits<double>::infinity();
    const int nodes = (dim_ == 1) ? grid_pts : grid_pts * grid_pts;
    double y[kMaxDim] = {0.0, 0.0};
    for (int idx = 0; idx < nodes; ++idx) {
        y[0] = static_cast<double>(idx % grid_pts) / grid_pts;
        if (dim_ == 2) y[1] = static_cast<double>(idx / grid_pts) / grid_pts;
        double knorm2 = 0.0, gnorm2 = 0.0;
        for (int b = 0; b < dim_; ++b) {
            const double kb = drift_[b].eval(y);
            const double gb = pot_[b].eval(y);
            knorm2 += kb * kb;
            gnorm2 += gb * gb;
        }
        n.k_inf = std::max(n.k_inf, std::sqrt(knorm2));
        n.divk_wneg = std::max(n.divk_wneg, std::sqrt(gnorm2));
        for (int a = 0; a < dim_; ++a) {
            const double s = sigma_[a].eval(y);
            n.sigma_min = std::min(n.sigma_min, s);
            n.sigma_w2inf = std::max(n.sigma_w2inf, std::abs(s));
            for (int g = 0; g < dim_; ++g) {
                n.sigma_w2inf = std::max(n.sigma_w2inf, std::abs(sigma_[a].partial(g, y)));
                n.sigma_w2inf = std::max(n.sigma_w2inf, std::abs(sigma_[a].partial2(g, y)));
            }
        }
    }
    return n;
}

void KernelSpec::validate(int grid_pts) const {
    const double h = 1.0 / grid_pts;
    const double tol = 10.0 * h * h;
    const int nodes = (dim_ == 1) ? grid_pts : grid_pts * grid_pts;
    double y[kMaxDim] = {0.0, 0.0};
    double div_mean = 0.0;
    for (int idx = 0; idx < nodes; ++idx) {
        y[0] = static_cast<double>(idx % grid_pts) / grid_pts;
        if (dim_ == 2) y[1] = static_cast<double>(idx / grid_pts) / grid_pts;
        div_mean += drift_div(y);
        for (int g = 0; g < dim_; ++g) {
            double yp[kMaxDim] = {y[0], y[1]}, ym[kMaxDim] = {y[0], y[1]};
            yp[g] += h;
            ym[g] -= h;
            // centered differences of sigma and its declared first derivative
            for (int a = 0; a < dim_; ++a) {
                const double fd1 = (sigma_[a].eval(yp) - sigma_[a].eval(ym)) / (2 * h);
                if (std::abs(fd1 - sigma_[a].partial(g, y)) > tol * std::max(1.0, std::abs(fd1)))
                    throw NumericalError("KernelSpec::validate: declared d sigma mismatch");
                const double fd2 =
                    (sigma_[a].eval(yp) - 2 * sigma_[a].eval(y) + sigma_[a].eval(ym)) / (h * h);
                if (std::abs(fd2 - sigma_[a].partial2(g, y)) > tol * std::max(1.0, std::abs(fd2)))
                    throw NumericalError("KernelSpec::validate: declared d^2 sigma mismatch");
            }
        }
        // div K by finite differences of the components, and div g likewise
        double fd_div_k = 0.0, fd_div_g = 0.0;
        for (int b = 0; b < dim_; ++b) {
            double yp[kMaxDim] = {y[0], y[1]}, ym[kMaxDim] = {y[0], y[1]};
            yp[b] += h;
            ym[b] -= h;
            fd_div_k += (drift_[b].eval(yp) - drift_[b].eval(ym)) / (2 * h);
            fd_div_g += (pot_[b].eval(yp) - pot_[b].eval(ym)) / (2 * h);
        }
        const double declared = drift_div(y);
        if (std::abs(fd_div_k - declared) > tol * std::max(1.0, std::abs(declared)))
            throw NumericalError("KernelSpec::validate: declared div K mismatch");
        if (std::abs(fd_div_g - declared) > tol * std::max(1.0, std::abs(declared)))
            throw NumericalError("KernelSpec::validate: potential divergence mismatch");
        for (int a = 0; a < dim_; ++a)
            if (sigma_[a].eval(y) <= sigma_floor_)
                throw NumericalError("KernelSpec::validate: sigma at or below floor");
    }
    // membership of div K in the homogeneous negative-Sobolev class needs a
    // zero mean; exact for trig families, checked to quadrature tolerance
    if (std::abs(div_mean / nodes) > 1e-10)
        throw NumericalError("KernelSpec::validate: declared div K has nonzero mean");
}

namespace {

std::array<TrigScalar, kMaxDim> zero_fields() { return {TrigScalar{}, TrigScalar{}}; }

std::array<TrigScalar, kMaxDim> constant_fields(int dim, double c) {
    std::array<TrigScalar, kMaxDim> f{};
    for (int a = 0; a < dim; ++a) f[a].base = c;
    return f;
}

void expect_params(const std::string& name, const std::vector<double>& p, size_t n) {
    if (p.size() != n) {
        std::ostringstream os;
        os << "builtin_kernel '" << name << "' expects " << n << " parameter(s), got "
           << p.size();
        throw ConfigError(os.str());
    }
}

struct FamilyParts {
    bool is_drift = false;
    std::array<TrigScalar, kMaxDim> field{};
    std::array<TrigScalar, kMaxDim> potential{};
    double floor = 0.5;
};

FamilyParts build_family(const std::string& name, int dim, const std::vector<double>& params) {
    FamilyParts parts;
    if (name == "zero_drift") {
        expect_params(name, params, 0);
        parts.is_drift = true;
        parts.field = zero_fields();
        parts.potential = zero_fields();
    } else if (name == "trig_drift") {
        expect_params(name, params, 2);
        const double amp = params[0];
        const int mode = static_cast<int>(params[1]);
        if (mode < 1) throw ConfigError("trig_drift: mode must be a positive integer");
        parts.is_drift = true;
        for (int b = 0; b < dim; ++b)
            parts.field[b].terms.push_back({amp, mode, b, false});
        // g = K works as the divergence potential: div g = div K trivially
        parts.potential = parts.field;
    } else if (name == "constant_sigma") {
        expect_params(name, params, 2);
        const double c = params[0];
        parts.floor = params[1];
        if (!(c > parts.floor) || parts.floor <= 0.0)
            throw ConfigError("constant_sigma: requires c > floor > 0 (uniform ellipticity)");
        parts.field = constant_fields(dim, c);
    } else if (name == "trig_sigma") {
        expect_params(name, params, 4);
        const double base = params[0], amp = params[1];
        const int mode = static_cast<int>(params[2]);
        parts.floor = params[3];
        if (mode < 1) throw ConfigError("trig_sigma: mode must be a positive integer");
        if (!(base - std::abs(amp) > parts.floor) || parts.floor <= 0.0)
            throw ConfigError(
                "trig_sigma: requires base - |amp| > floor > 0 (uniform ellipticity)");
        for (int a = 0; a < dim; ++a) {
            parts.field[a].base = base;
            parts.field[a].terms.push_back({amp, mode, a, false});
        }
    } else {
        throw ConfigError("builtin_kernel: unknown family '" + name +
                          "' (valid: zero_drift, trig_drift, constant_sigma, trig_sigma)");
    }
    return parts;
}

} // namespace

KernelSpec builtin_kernel(const std::string& name, int dim, const std::vector<double>& params) {
    FamilyParts parts = build_family(name, dim, params);
    if (parts.is_drift) {
        return KernelSpec(dim, parts.field, parts.potential, constant_fields(dim, 1.0), 0.5,
                          name);
    }
    return KernelSpec(dim, zero_fields(), zero_fields(), parts.field, parts.floor,
                      "zero_drift+" + name);
}

KernelSpec make_kernel(const std::string& drift_name, const std::vector<double>& drift_params,
                       const std::string& sigma_name, const std::vector<double>& sigma_params,
                       int dim) {
    FamilyParts drift = build_family(drift_name, dim, drift_params);
    FamilyParts sigma = build_family(sigma_name, dim, sigma_params);
    if (!drift.is_drift) throw ConfigError("make_kernel: '" + drift_name + "' is not a drift family");
    if (sigma.is_drift) throw ConfigError("make_kernel: '" + sigma_name + "' is not a sigma family");
    return KernelSpec(dim, drift.field, drift.potential, sigma.field, sigma.floor,
                      drift_name + "+" + sigma_name);
}

} // namespace mfl
