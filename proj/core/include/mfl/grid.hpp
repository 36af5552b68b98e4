#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "mfl/kernel.hpp"
#include "mfl/torus.hpp"

namespace mfl {

/// Uniform periodic grid representation of a density on T^d (d = 1 or 2),
/// node j at position j/n per axis, values stored row-major with axis 0
/// contiguous. Mass is measured by the periodic rectangle rule (spectrally
/// exact for band-limited integrands): integral = mean(values).
struct DensityGrid {
    int dim = 1;
    int n = 0;                 ///< nodes per axis (power of two)
    double time = 0.0;
    std::vector<double> values; ///< size n^dim

    std::size_t size() const { return values.size(); }
    double integral() const;
    double min_value() const;
    double max_value() const;

    /// Node coordinate along an axis for a flat index.
    double coord(std::size_t flat, int axis) const;

    /// Throws unless values are finite, strictly positive (if require_positive)
    /// and unit-mass within tol.
    void check_invariants(bool require_positive, double mass_tol = 1e-10) const;
};

/// Builtin initial data rho0(x) = 1 + sum_m amps[m-1] * sum_beta cos(2 pi m x^beta).
/// Requires dim * sum |amps| < 1 so inf rho0 > 0.
DensityGrid cosine_density(int dim, int n, const std::vector<double>& amps);

/// Sample a closed-form scalar field on the grid of (dim, n).
DensityGrid sample_field(int dim, int n, const TrigScalar& f);

/// FFT-backed spectral operations for one grid shape. Construction plans the
/// transforms (thread-safe); each instance owns its scratch buffers, so use
/// one instance per thread. All methods are exact up to roundoff for
/// band-limited inputs.
class Spectral {
public:
    Spectral(int dim, int n);
    ~Spectral();
    Spectral(const Spectral&) = delete;
    Spectral& operator=(const Spectral&) = delete;

    int dim() const;
    int n() const;

    /// out = periodic convolution (f * g)(x) = int f(x-y) g(y) dy.
    void convolve(const std::vector<double>& f, const std::vector<double>& g,
                  std::vector<double>& out);

    /// out = d^order f / d x_axis^order  (order 1 or 2).
    void derivative(const std::vector<double>& f, int axis, int order,
                    std::vector<double>& out);

    /// Zero all modes with |k| > n/3 on any axis (2/3-rule dealiasing).
    void dealias(std::vector<double>& f);

    /// f <- (1 + dt * sum_a c[a] (2 pi k_a)^2)^{-1} f in Fourier space, the
    /// implicit half of an IMEX step with constant diffusion coefficients
    /// c[a] >= 0.
    void helmholtz_solve(std::vector<double>& f, const double* c, double dt);

    /// Forward transform to the full set of complex coefficients of f
    /// normalized so f(x) = sum_k c_k exp(2 pi i k.x); used for off-grid
    /// evaluation. Layout: dim==1: k = 0..n-1 (signed via k>n/2 -> k-n).
    std::vector<std::complex<double>> coefficients(const std::vector<double>& f);

    /// Evaluate the band-limited interpolant (and optional derivative of
    /// given order along axis) at an arbitrary point.
    static double eval_interp(const std::vector<std::complex<double>>& coef, int dim, int n,
                              const double* x, int axis = 0, int order = 0);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Compact trigonometric form of a band-limited real field: only the modes
/// with |c_k| above threshold are kept, so off-grid evaluation costs
/// O(#active modes) instead of O(n^d).
class SparseField {
public:
    SparseField() = default;
    SparseField(const std::vector<double>& values, int dim, int n, Spectral& spectral,
                double threshold = 1e-14);

    double eval(const double* x) const;

    /// Certified bound for the sup norm: sum_k |c_k|.
    double coeff_l1() const { return l1_; }

    /// Zero-mode coefficient (the field average).
    double mean() const { return mean_; }

private:
    struct Mode {
        int k0 = 0;
        int k1 = 0;
        double a = 0.0;
        double b = 0.0;
    };
    int dim_ = 1;
    double mean_ = 0.0;
    double l1_ = 0.0;
    std::vector<Mode> modes_;
};

} // namespace mfl
