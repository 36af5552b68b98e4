#include "mfl/lde.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"
#include "mfl/sampling.hpp"

namespace mfl {

namespace {

const double kE2 = std::exp(2.0);
const double kE3 = std::exp(3.0);

double factorial(int k) {
    double f = 1.0;
    for (int i = 2; i <= k; ++i) f *= static_cast<double>(i);
    return f;
}

// Population standard deviation of bootstrap means.
double bootstrap_sigma(const std::vector<double>& values, std::uint64_t seed, int resamples) {
    const std::size_t n = values.size();
    std::vector<double> means(static_cast<std::size_t>(resamples), 0.0);
    for (int b = 0; b < resamples; ++b) {
        const std::uint64_t stream = rng::stream_id(rng::Domain::bootstrap,
                                                    static_cast<std::uint32_t>(b), 0);
        std::uint64_t index = 0;
        double acc = 0.0;
        std::size_t drawn = 0;
        while (drawn < n) {
            const auto u = rng::u01_pair(seed, stream, index++);
            for (int half = 0; half < 2 && drawn < n; ++half, ++drawn) {
                std::size_t pick = static_cast<std::size_t>(u[half] * static_cast<double>(n));
                if (pick >= n) pick = n - 1;
                acc += values[pick];
            }
        }
        means[static_cast<std::size_t>(b)] = acc / static_cast<double>(n);
    }
    double mean = 0.0;
    for (double v : means) mean += v;
    mean /= static_cast<double>(resamples);
    double var = 0.0;
    for (double v : means) var += (v - mean) * (v - mean);
    return std::sqrt(var / static_cast<double>(resamples));
}

// Runs the Monte Carlo loop shared by the moment estimators: draws n_mc
// configurations of N background samples and maps the scaled triple sum
// S = (eta / N^2) sum_{i,j,k} phi2 through `transform`.
template <typename F>
MomentEstimate mc_scaled_sums(const PhiField& field, double eta, int n_particles, int n_mc,
                              std::uint64_t seed, F&& transform) {
    if (n_particles < 1) throw ConfigError("moment estimate: n_particles must be positive");
    if (n_mc < 2) throw ConfigError("moment estimate: n_mc must be at least 2");
    const int d = field.dim();
    Spectral spectral(d, field.background().n);
    DensitySampler sampler(field.background(), spectral);

    std::vector<double> xs(static_cast<std::size_t>(n_particles) * static_cast<std::size_t>(d));
    std::vector<double> values(static_cast<std::size_t>(n_mc));
    const double inv_n2 = 1.0 / (static_cast<double>(n_particles) * n_particles);
    double max_abs_s = 0.0;
    for (int c = 0; c < n_mc; ++c) {
        for (int i = 0; i < n_particles; ++i) {
            const std::uint64_t stream = rng::stream_id(rng::Domain::mc_config,
                                                        static_cast<std::uint32_t>(c),
                                                        static_cast<std::uint32_t>(i));
            std::uint64_t index = 0;
            const TorusPoint pt = sampler.draw(seed, stream, index);
            for (int a = 0; a < d; ++a) xs[static_cast<std::size_t>(i) * d + a] = pt[a];
        }
        const double s = eta * inv_n2 * grouped_triple_sum(field, xs.data(), n_particles);
        max_abs_s = std::max(max_abs_s, std::abs(s));
        values[static_cast<std::size_t>(c)] = transform(s);
    }

    MomentEstimate est;
    est.n_mc = n_mc;
    est.max_exponent = max_abs_s;
    for (double v : values) est.mean += v;
    est.mean /= static_cast<double>(n_mc);
    est.sigma = bootstrap_sigma(values, seed, 200);
    return est;
}

} // namespace

BoundConstants constants_from_mpsup(double m_p_sup) {
    const double limit = 1.0 / (6.0 * kE2);
    if (!(m_p_sup > 0.0) || !(m_p_sup < limit)) {
        const double alpha = 32.0 * kE3 * m_p_sup * m_p_sup;
        const double beta = std::pow(3.0 * kE2 * m_p_sup, 2);
        std::string which;
        if (alpha >= 1.0) which += " alpha = " + std::to_string(alpha) + " >= 1;";
        if (beta >= 1.0) which += " beta = " + std::to_string(beta) + " >= 1;";
        throw ConfigError("m_p_sup = " + std::to_string(m_p_sup) +
                          " is outside the admissible range (0, 1/(6 e^2) = " +
                          std::to_string(limit) + ");" + which);
    }
    BoundConstants c;
    c.m_p_sup = m_p_sup;
    c.alpha = 32.0 * kE3 * m_p_sup * m_p_sup;
    c.beta = std::pow(3.0 * kE2 * m_p_sup, 2);
    const double om = 1.0 - c.alpha;
    c.c_bound = 2.0 * (1.0 + 4.0 * c.alpha / (om * om * om) + 1.0 / (1.0 - c.beta));
    return c;
}

BoundConstants constants(const PhiField& field, double eta_given, int probe_n) {
    const double b = field.amplitude_bound();
    const double eta = (eta_given > 0.0) ? eta_given : 1.0 / (12.0 * kE2 * b);
    BoundConstants c = constants_from_mpsup(eta * b);
    c.b_amplitude = b;
    c.eta = eta;

    // Diagnostic table: grid estimates of || eta * sup_{z,z'} |phi2| ||_p.
    const int d = field.dim();
    const int nx = (probe_n > 0) ? probe_n : (d == 1 ? 128 : 16);
    const int nz = (d == 1) ? 48 : 8;
    const std::size_t xn = (d == 1) ? static_cast<std::size_t>(nx)
                                    : static_cast<std::size_t>(nx) * nx;
    const std::size_t zn = (d == 1) ? static_cast<std::size_t>(nz)
                                    : static_cast<std::size_t>(nz) * nz;
    c.table.p = {1.0, 2.0, 4.0, 8.0, 16.0};
    c.table.norm_p.assign(c.table.p.size(), 0.0);
    double x[kMaxDim] = {0.0, 0.0};
    double z[kMaxDim] = {0.0, 0.0};
    double zp[kMaxDim] = {0.0, 0.0};
    double mass = 0.0;
    for (std::size_t ix = 0; ix < xn; ++ix) {
        x[0] = static_cast<double>(ix % static_cast<std::size_t>(nx)) / nx;
        if (d == 2) x[1] = static_cast<double>(ix / static_cast<std::size_t>(nx)) / nx;
        double envelope = 0.0;
        for (std::size_t iz = 0; iz < zn; ++iz) {
            z[0] = static_cast<double>(iz % static_cast<std::size_t>(nz)) / nz;
            if (d == 2) z[1] = static_cast<double>(iz / static_cast<std::size_t>(nz)) / nz;
            for (std::size_t izp = 0; izp < zn; ++izp) {
                zp[0] = static_cast<double>(izp % static_cast<std::size_t>(nz)) / nz;
                if (d == 2) zp[1] = static_cast<double>(izp / static_cast<std::size_t>(nz)) / nz;
                envelope = std::max(envelope, std::abs(field.phi2(x, z, zp)));
            }
        }
        envelope *= eta;
        c.table.grid_linf = std::max(c.table.grid_linf, envelope);
        const double w = field.rho(x);
        mass += w;
        for (std::size_t ip = 0; ip < c.table.p.size(); ++ip) {
            c.table.norm_p[ip] += std::pow(envelope, c.table.p[ip]) * w;
        }
    }
    for (std::size_t ip = 0; ip < c.table.p.size(); ++ip) {
        c.table.norm_p[ip] = std::pow(c.table.norm_p[ip] / mass, 1.0 / c.table.p[ip]);
        c.table.sup_ratio = std::max(c.table.sup_ratio, c.table.norm_p[ip] / c.table.p[ip]);
    }
    return c;
}

double grouped_triple_sum(const PhiField& field, const double* xs, int n_particles) {
    const int d = field.dim();
    const KernelSpec& kernel = field.kernel();
    const double n2 = static_cast<double>(n_particles) * n_particles;
    double total = 0.0;
    double y[kMaxDim] = {0.0, 0.0};
    for (int a = 0; a < d; ++a) {
        for (int i = 0; i < n_particles; ++i) {
            const double* xi = xs + static_cast<std::size_t>(i) * d;
            double a0 = 0.0;
            double a1 = 0.0;
            double a2 = 0.0;
            for (int j = 0; j < n_particles; ++j) {
                const double* xj = xs + static_cast<std::size_t>(j) * d;
                for (int b = 0; b < d; ++b) y[b] = TorusPoint::wrap_diff(xi[b] - xj[b]);
                a0 += kernel.sigma(a, y);
                a1 += kernel.sigma_d(a, a, y);
                a2 += kernel.sigma_dd(a, a, y);
            }
            const double s0 = field.conv_sigma(a, 0, xi);
            const double s1 = field.conv_sigma(a, 1, xi);
            const double s2 = field.conv_sigma(a, 2, xi);
            const double l1 = field.log_rho_d(a, xi);
            const double l2 = field.rho_dd_over_rho(a, xi);
            total += (2.0 * a2 * a0 + 2.0 * a1 * a1 - 2.0 * n2 * (s1 * s1 + s0 * s2)) +
                     2.0 * (2.0 * a1 * a0 - 2.0 * n2 * s0 * s1) * l1 +
                     (a0 * a0 - n2 * s0 * s0) * l2;
        }
    }
    return total;
}

double naive_triple_sum(const PhiField& field, const double* xs, int n_particles) {
    const int d = field.dim();
    double total = 0.0;
    for (int i = 0; i < n_particles; ++i) {
        for (int j = 0; j < n_particles; ++j) {
            for (int k = 0; k < n_particles; ++k) {
                total += field.phi2(xs + static_cast<std::size_t>(i) * d,
                                    xs + static_cast<std::size_t>(j) * d,
                                    xs + static_cast<std::size_t>(k) * d);
            }
        }
    }
    return total;
}

MomentEstimate exp_moment_mc(const PhiField& field, double eta, int n_particles, int n_mc,
                             std::uint64_t seed) {
    const double guard = eta * static_cast<double>(n_particles) * field.amplitude_bound();
    if (guard > 700.0) {
        throw NumericalError("exp_moment_mc: worst-case exponent eta * N * B = " +
                             std::to_string(guard) + " would overflow exp");
    }
    return mc_scaled_sums(field, eta, n_particles, n_mc, seed,
                          [](double s) { return std::exp(s); });
}

MomentEstimate moment_power_mc(const PhiField& field, double eta, int n_particles, int m,
                               int n_mc, std::uint64_t seed) {
    if (m < 1) throw ConfigError("moment_power_mc: m must be at least 1");
    const double scale = 2.0 / factorial(2 * m);
    return mc_scaled_sums(field, eta, n_particles, n_mc, seed, [m, scale](double s) {
        double p = 1.0;
        for (int r = 0; r < 2 * m; ++r) p *= s;
        return scale * p;
    });
}

double series_term_bound(double m_p_sup, int m, int n_particles) {
    if (m < 0) throw ConfigError("series_term_bound: m must be nonnegative");
    if (m == 0) return 2.0;
    if (4 * m > n_particles) {
        return 2.0 * std::pow(3.0 * kE2 * m_p_sup, 2 * m);
    }
    return 2.0 * 2.0 * static_cast<double>(m) * m *
           std::pow(std::sqrt(32.0 * kE3) * m_p_sup, 2 * m);
}

} // namespace mfl
