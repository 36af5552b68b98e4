#pragma once

#include <cstdint>
#include <vector>

#include "mfl/grid.hpp"
#include "mfl/torus.hpp"

namespace mfl {

/// Draws i.i.d. samples from a strictly positive band-limited density given on
/// a DensityGrid. The grid is reduced to its (sparse) Fourier modes once;
/// evaluation afterwards costs O(#active modes).
///
/// d=1 uses inverse-CDF with a Newton iteration safeguarded by bisection
/// (the CDF has a closed antiderivative mode by mode); d=2 uses rejection
/// with the certified envelope sup rho <= sum_k |c_k|.
class DensitySampler {
public:
    DensitySampler(const DensityGrid& rho, Spectral& spectral);

    int dim() const { return dim_; }

    /// Certified upper bound for sup rho (coefficient l1 norm).
    double sup_bound() const { return sup_bound_; }

    /// Band-limited density value at an arbitrary point.
    double pdf(const double* x) const;

    /// d=1 only: cumulative distribution on [0,1].
    double cdf(double x) const;

    /// Draw one sample. `index` is the per-stream counter cursor and is
    /// advanced by however many uniforms the draw consumes, so repeated calls
    /// with the same (seed, stream) walk a deterministic sequence.
    TorusPoint draw(std::uint64_t seed, std::uint64_t stream, std::uint64_t& index) const;

private:
    struct Mode {
        int k0 = 0;
        int k1 = 0;
        double a = 0.0; ///< Re c_k
        double b = 0.0; ///< Im c_k
    };

    int dim_ = 1;
    double mean_ = 1.0;        ///< c_0 (unit for a probability density)
    std::vector<Mode> modes_;  ///< half-spectrum, k != 0, |c_k| above threshold
    double sup_bound_ = 1.0;

    double invert_cdf(double u) const;
};

} // namespace mfl
