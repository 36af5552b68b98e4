#include "mfl/sampling.hpp"

#include <cmath>

#include "mfl/errors.hpp"
#include "mfl/rng.hpp"

namespace mfl {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kModeThreshold = 1e-14;
constexpr int kMaxNewton = 64;

} // namespace

DensitySampler::DensitySampler(const DensityGrid& rho, Spectral& spectral) {
    rho.check_invariants(/*require_positive=*/true, /*mass_tol=*/1e-8);
    if (spectral.dim() != rho.dim || spectral.n() != rho.n)
        throw ConfigError("DensitySampler: spectral engine does not match grid shape");
    dim_ = rho.dim;
    const int n = rho.n;
    const auto coef = spectral.coefficients(rho.values);
    mean_ = coef[0].real();
    sup_bound_ = std::abs(mean_);
    // Keep one representative per conjugate pair: k0 > 0, or (k0 == 0, k1 > 0).
    const int nyq = n / 2;
    auto signed_k = [&](int idx) { return idx <= nyq ? idx : idx - n; };
    const int rows = (dim_ == 1) ? 1 : n;
    for (int i1 = 0; i1 < rows; ++i1) {
        const int k1 = (dim_ == 1) ? 0 : signed_k(i1);
        for (int i0 = 0; i0 < n; ++i0) {
            const int k0 = signed_k(i0);
            if (!(k0 > 0 || (k0 == 0 && k1 > 0))) continue;
            const auto c = coef[static_cast<std::size_t>(i1) * static_cast<std::size_t>(n) +
                               static_cast<std::size_t>(i0)];
            if (std::abs(c) < kModeThreshold) continue;
            modes_.push_back({k0, k1, c.real(), c.imag()});
            sup_bound_ += 2.0 * std::abs(c);
        }
    }
}

double DensitySampler::pdf(const double* x) const {
    double v = mean_;
    for (const Mode& m : modes_) {
        const double th = kTwoPi * (m.k0 * x[0] + (dim_ == 2 ? m.k1 * x[1] : 0.0));
        v += 2.0 * (m.a * std::cos(th) - m.b * std::sin(th));
    }
    return v;
}

double DensitySampler::cdf(double x) const {
    if (dim_ != 1) throw ConfigError("DensitySampler::cdf is only defined in d=1");
    double v = mean_ * x;
    for (const Mode& m : modes_) {
        const double w = kTwoPi * m.k0;
        const double th = w * x;
        v += 2.0 * (m.a * std::sin(th) + m.b * (std::cos(th) - 1.0)) / w;
    }
    return v;
}

double DensitySampler::invert_cdf(double u) const {
    // F is strictly increasing with F' = rho >= inf rho > 0; Newton from x=u
    // (exact when rho is uniform) with a bisection safeguard.
    double lo = 0.0, hi = 1.0, x = u;
    for (int it = 0; it < kMaxNewton; ++it) {
        const double fx = cdf(x) - u;
        if (std::abs(fx) < 1e-14) return x;
        if (fx > 0.0) hi = x; else lo = x;
        const double dfx = pdf(&x);
        double next = x - fx / dfx;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        x = next;
    }
    return x;
}

TorusPoint DensitySampler::draw(std::uint64_t seed, std::uint64_t stream,
                                std::uint64_t& index) const {
    double raw[kMaxDim] = {0.0, 0.0};
    if (dim_ == 1) {
        const auto pair = rng::u01_pair(seed, stream, index++);
        raw[0] = invert_cdf(pair[0]);
        return TorusPoint::wrap(raw, 1);
    }
    // Rejection with the certified coefficient-l1 envelope.
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const auto xy = rng::u01_pair(seed, stream, index++);
        const auto uv = rng::u01_pair(seed, stream, index++);
        raw[0] = xy[0] == 1.0 ? 0.0 : xy[0];
        raw[1] = xy[1] == 1.0 ? 0.0 : xy[1];
        if (uv[0] * sup_bound_ <= pdf(raw)) return TorusPoint::wrap(raw, 2);
    }
    throw NumericalError("DensitySampler: rejection sampling failed to accept (bad envelope?)");
}

} // namespace mfl
