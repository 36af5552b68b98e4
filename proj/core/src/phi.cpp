#include "mfl/phi.hpp"

#include <cmath>
#include <cstdio>
#include <cstring>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {

namespace {

// Uniform probe point in [0,1)^dim from the dedicated counter-RNG domain.
void draw_probe(std::uint64_t seed, std::uint32_t probe, std::uint32_t family, int count,
                double* out) {
    std::uint64_t index = 0;
    for (int i = 0; i < count; i += 2) {
        const auto u = rng::u01_pair(seed, rng::stream_id(rng::Domain::probes, probe, family),
                                     index++);
        out[i] = u[0] == 1.0 ? 0.0 : u[0];
        if (i + 1 < count) out[i + 1] = u[1] == 1.0 ? 0.0 : u[1];
    }
}

} // namespace

PhiField::PhiField(const KernelSpec& kernel, const DensityGrid& background)
    : kernel_(kernel), background_(background), dim_(kernel.dim()) {
    if (background_.dim != dim_) {
        throw ConfigError("phi field: background dimension " + std::to_string(background_.dim) +
                          " does not match kernel dimension " + std::to_string(dim_));
    }
    background_.check_invariants(true);
    const int n = background_.n;
    Spectral spectral(dim_, n);
    const std::size_t total = background_.values.size();

    std::vector<double> nodes(total);
    std::vector<double> work(total);
    std::vector<double> conv(total);

    rho_f_ = SparseField(background_.values, dim_, n, spectral);
    for (int a = 0; a < dim_; ++a) {
        spectral.derivative(background_.values, a, 1, work);
        rho_d_[a] = SparseField(work, dim_, n, spectral);
        spectral.derivative(background_.values, a, 2, work);
        rho_dd_[a] = SparseField(work, dim_, n, spectral);
    }

    // Convolutions of the kernel components against the background.
    for (int a = 0; a < dim_; ++a) {
        nodes = sample_field(dim_, n, kernel_.sigma_component(a)).values;
        spectral.convolve(nodes, background_.values, conv);
        conv_s_[a] = SparseField(conv, dim_, n, spectral);
        spectral.derivative(conv, a, 1, work);
        conv_s_d_[a] = SparseField(work, dim_, n, spectral);
        spectral.derivative(conv, a, 2, work);
        conv_s_dd_[a] = SparseField(work, dim_, n, spectral);
    }
    for (int b = 0; b < dim_; ++b) {
        nodes = sample_field(dim_, n, kernel_.drift_component(b)).values;
        spectral.convolve(nodes, background_.values, conv);
        conv_k_[b] = SparseField(conv, dim_, n, spectral);
    }
    {
        double y[kMaxDim] = {0.0, 0.0};
        for (std::size_t i = 0; i < total; ++i) {
            for (int a = 0; a < dim_; ++a) y[a] = background_.coord(i, a);
            nodes[i] = kernel_.drift_div(y);
        }
        spectral.convolve(nodes, background_.values, conv);
        conv_divk_ = SparseField(conv, dim_, n, spectral);
    }

    // Certified background norms from the coefficient sums: the mean minus the
    // non-constant coefficient mass lower-bounds the infimum, and the full
    // coefficient mass upper-bounds each sup norm.
    inf_rho_ = 2.0 * rho_f_.mean() - rho_f_.coeff_l1();
    if (!(inf_rho_ > 0.0)) {
        throw NumericalError("phi field: cannot certify a positive lower bound for the "
                             "background density (coefficient mass too large)");
    }
    grad_sup_ = 0.0;
    hess_sup_ = 0.0;
    for (int a = 0; a < dim_; ++a) {
        grad_sup_ = std::max(grad_sup_, rho_d_[a].coeff_l1());
        hess_sup_ = std::max(hess_sup_, rho_dd_[a].coeff_l1());
    }
    const double s2 = kernel_.norms().sigma_w2inf * kernel_.norms().sigma_w2inf;
    const double d = static_cast<double>(dim_);
    amplitude_ = 8.0 * d * s2 + 8.0 * d * s2 * grad_sup_ / inf_rho_ +
                 2.0 * d * s2 * hess_sup_ / inf_rho_;
}

double PhiField::conv_sigma(int alpha, int order, const double* x) const {
    switch (order) {
    case 0: return conv_s_[alpha].eval(x);
    case 1: return conv_s_d_[alpha].eval(x);
    case 2: return conv_s_dd_[alpha].eval(x);
    default:
        throw ConfigError("conv_sigma: derivative order must be 0, 1 or 2");
    }
}

double PhiField::log_rho_d(int alpha, const double* x) const {
    return rho_d_[alpha].eval(x) / rho_f_.eval(x);
}

double PhiField::rho_dd_over_rho(int alpha, const double* x) const {
    return rho_dd_[alpha].eval(x) / rho_f_.eval(x);
}

double PhiField::phi1(const double* x, const double* z) const {
    double y[kMaxDim] = {0.0, 0.0};
    for (int a = 0; a < dim_; ++a) y[a] = TorusPoint::wrap_diff(x[a] - z[a]);
    const double r = rho_f_.eval(x);
    double acc = -(kernel_.drift_div(y) - conv_divk_.eval(x));
    for (int b = 0; b < dim_; ++b) {
        acc -= (kernel_.drift(b, y) - conv_k_[b].eval(x)) * (rho_d_[b].eval(x) / r);
    }
    return acc;
}

double PhiField::phi2_group(int alpha, const double* x, const double* z, const double* zp,
                            double l1, double l2) const {
    double yj[kMaxDim] = {0.0, 0.0};
    double yk[kMaxDim] = {0.0, 0.0};
    for (int a = 0; a < dim_; ++a) {
        yj[a] = TorusPoint::wrap_diff(x[a] - z[a]);
        yk[a] = TorusPoint::wrap_diff(x[a] - zp[a]);
    }
    const double sj0 = kernel_.sigma(alpha, yj);
    const double sj1 = kernel_.sigma_d(alpha, alpha, yj);
    const double sj2 = kernel_.sigma_dd(alpha, alpha, yj);
    const double sk0 = kernel_.sigma(alpha, yk);
    const double sk1 = kernel_.sigma_d(alpha, alpha, yk);
    const double sk2 = kernel_.sigma_dd(alpha, alpha, yk);
    const double S0 = conv_s_[alpha].eval(x);
    const double S1 = conv_s_d_[alpha].eval(x);
    const double S2 = conv_s_dd_[alpha].eval(x);

    const double g0 = sj0 * sk0 - S0 * S0;
    const double g1 = sj1 * sk0 + sj0 * sk1 - 2.0 * S0 * S1;
    const double g2 = sj2 * sk0 + 2.0 * sj1 * sk1 + sj0 * sk2 - 2.0 * (S1 * S1 + S0 * S2);
    return g2 + 2.0 * g1 * l1 + g0 * l2;
}

double PhiField::phi2(const double* x, const double* z, const double* zp) const {
    const double r = rho_f_.eval(x);
    double acc = 0.0;
    for (int a = 0; a < dim_; ++a) {
        const double l1 = rho_d_[a].eval(x) / r;
        const double l2 = rho_dd_[a].eval(x) / r;
        acc += phi2_group(a, x, z, zp, l1, l2);
    }
    return acc;
}

PhiField::CancellationReport
PhiField::check_cancellations_phi1(int probe_count, std::uint64_t seed, int quad_n) const {
    if (probe_count <= 0) throw ConfigError("check_cancellations: probe_count must be positive");
    const int nq = (quad_n > 0) ? quad_n : background_.n;
    const std::size_t nodes = (dim_ == 1) ? static_cast<std::size_t>(nq)
                                          : static_cast<std::size_t>(nq) * nq;
    const double w = 1.0 / static_cast<double>(nodes);
    CancellationReport rep;
    rep.probes = probe_count;
    rep.quad_n = nq;

    double pt[kMaxDim] = {0.0, 0.0};
    double node[kMaxDim] = {0.0, 0.0};
    for (int p = 0; p < probe_count; ++p) {
        // int phi1(x, z) rho(x) dx for a random frozen z.
        draw_probe(seed, static_cast<std::uint32_t>(p), 0, dim_, pt);
        double acc = 0.0;
        for (std::size_t f = 0; f < nodes; ++f) {
            node[0] = static_cast<double>(f % static_cast<std::size_t>(nq)) / nq;
            if (dim_ == 2) node[1] = static_cast<double>(f / static_cast<std::size_t>(nq)) / nq;
            acc += phi1(node, pt) * rho_f_.eval(node) * w;
        }
        if (std::abs(acc) > rep.first_slot_max) {
            rep.first_slot_max = std::abs(acc);
            for (int a = 0; a < dim_; ++a) rep.first_slot_probe[a] = pt[a];
        }

        // int phi1(x, z) rho(z) dz for a random frozen x.
        draw_probe(seed, static_cast<std::uint32_t>(p), 1, dim_, pt);
        acc = 0.0;
        for (std::size_t f = 0; f < nodes; ++f) {
            node[0] = static_cast<double>(f % static_cast<std::size_t>(nq)) / nq;
            if (dim_ == 2) node[1] = static_cast<double>(f / static_cast<std::size_t>(nq)) / nq;
            acc += phi1(pt, node) * rho_f_.eval(node) * w;
        }
        if (std::abs(acc) > rep.other_slots_max) {
            rep.other_slots_max = std::abs(acc);
            for (int a = 0; a < dim_; ++a) rep.other_slots_probe[a] = pt[a];
        }
    }
    return rep;
}

PhiField::CancellationReport
PhiField::check_cancellations_phi2(int probe_count, std::uint64_t seed, int quad_n) const {
    if (probe_count <= 0) throw ConfigError("check_cancellations: probe_count must be positive");
    const int nq = (quad_n > 0) ? quad_n : background_.n;
    const std::size_t nodes = (dim_ == 1) ? static_cast<std::size_t>(nq)
                                          : static_cast<std::size_t>(nq) * nq;
    const double w = 1.0 / static_cast<double>(nodes);
    const double budget = static_cast<double>(probe_count) * static_cast<double>(nodes) *
                          static_cast<double>(nodes);
    if (budget > 4.0e8) {
        throw BudgetError("check_cancellations: probe_count * quad_n^(2 dim) = " +
                          std::to_string(budget) + " exceeds 4e8; lower quad_n or probe_count");
    }
    CancellationReport rep;
    rep.probes = probe_count;
    rep.quad_n = nq;

    double za[kMaxDim] = {0.0, 0.0};
    double zb[kMaxDim] = {0.0, 0.0};
    double node[kMaxDim] = {0.0, 0.0};
    double node2[kMaxDim] = {0.0, 0.0};
    for (int p = 0; p < probe_count; ++p) {
        // int phi2(x, z, z') rho(x) dx for random frozen (z, z').
        double pair[2 * kMaxDim] = {0.0, 0.0, 0.0, 0.0};
        draw_probe(seed, static_cast<std::uint32_t>(p), 2, 2 * dim_, pair);
        for (int a = 0; a < dim_; ++a) {
            za[a] = pair[a];
            zb[a] = pair[dim_ + a];
        }
        double acc = 0.0;
        for (std::size_t f = 0; f < nodes; ++f) {
            node[0] = static_cast<double>(f % static_cast<std::size_t>(nq)) / nq;
            if (dim_ == 2) node[1] = static_cast<double>(f / static_cast<std::size_t>(nq)) / nq;
            acc += phi2(node, za, zb) * rho_f_.eval(node) * w;
        }
        if (std::abs(acc) > rep.first_slot_max) {
            rep.first_slot_max = std::abs(acc);
            for (int a = 0; a < 2 * dim_; ++a) rep.first_slot_probe[a] = pair[a];
        }

        // int int phi2(x, z, z') rho(z) rho(z') dz dz' for a random frozen x.
        draw_probe(seed, static_cast<std::uint32_t>(p), 3, dim_, za);
        acc = 0.0;
        for (std::size_t f = 0; f < nodes; ++f) {
            node[0] = static_cast<double>(f % static_cast<std::size_t>(nq)) / nq;
            if (dim_ == 2) node[1] = static_cast<double>(f / static_cast<std::size_t>(nq)) / nq;
            const double rz = rho_f_.eval(node);
            for (std::size_t g = 0; g < nodes; ++g) {
                node2[0] = static_cast<double>(g % static_cast<std::size_t>(nq)) / nq;
                if (dim_ == 2)
                    node2[1] = static_cast<double>(g / static_cast<std::size_t>(nq)) / nq;
                acc += phi2(za, node, node2) * rz * rho_f_.eval(node2) * w * w;
            }
        }
        if (std::abs(acc) > rep.other_slots_max) {
            rep.other_slots_max = std::abs(acc);
            for (int a = 0; a < dim_; ++a) rep.other_slots_probe[a] = za[a];
        }
    }
    return rep;
}

} // namespace mfl
