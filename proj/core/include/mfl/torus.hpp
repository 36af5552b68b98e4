#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <vector>

#include "mfl/errors.hpp"

namespace mfl {

/// Maximum spatial dimension supported by the grid-based solvers.
inline constexpr int kMaxDim = 2;

/// A point on the flat torus T^d = [0,1)^d. Coordinates are always stored
/// wrapped into [0,1); construction reduces inputs modulo 1.
class TorusPoint {
public:
    TorusPoint() : dim_(0), c_{0.0, 0.0} {}

    /// Wrap a raw coordinate vector onto the torus. Non-finite input throws.
    static TorusPoint wrap(const double* raw, int dim) {
        TorusPoint p;
        if (dim < 1 || dim > kMaxDim) throw ConfigError("TorusPoint: dim must be 1 or 2");
        p.dim_ = dim;
        for (int a = 0; a < dim; ++a) {
            if (!std::isfinite(raw[a])) throw ConfigError("TorusPoint: non-finite coordinate");
            p.c_[a] = wrap_coord(raw[a]);
        }
        return p;
    }

    static TorusPoint wrap(std::initializer_list<double> raw) {
        std::vector<double> v(raw);
        return wrap(v.data(), static_cast<int>(v.size()));
    }

    int dim() const { return dim_; }
    double operator[](int a) const { return c_[a]; }
    const double* data() const { return c_.data(); }

    /// Reduce a scalar modulo 1 into [0,1).
    static double wrap_coord(double x) {
        double y = x - std::floor(x);
        // floor rounding can land exactly on 1.0 for tiny negatives
        if (y >= 1.0) y -= 1.0;
        return y;
    }

    /// Minimal-image representative of a scalar difference, in [-1/2, 1/2).
    static double wrap_diff(double x) {
        double y = x - std::floor(x + 0.5);
        if (y >= 0.5) y -= 1.0;
        if (y < -0.5) y += 1.0;
        return y;
    }

private:
    int dim_;
    std::array<double, kMaxDim> c_;
};

/// Periodic displacement a - b with every component reduced to [-1/2, 1/2).
/// displacement(a, a) == 0 and displacement(a, b) == -displacement(b, a)
/// away from the +-1/2 boundary.
inline std::array<double, kMaxDim> displacement(const TorusPoint& a, const TorusPoint& b) {
    if (a.dim() != b.dim()) throw ConfigError("displacement: dimension mismatch");
    std::array<double, kMaxDim> d{0.0, 0.0};
    for (int i = 0; i < a.dim(); ++i) d[i] = TorusPoint::wrap_diff(a[i] - b[i]);
    return d;
}

} // namespace mfl
