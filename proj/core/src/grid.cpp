#include "mfl/grid.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>

#include "mfl/errors.hpp"

namespace mfl {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::mutex& plan_mutex() {
    static std::mutex m;
    return m;
}

bool is_pow2(int n) { return n > 0 && (n & (n - 1)) == 0; }

std::size_t pow_dim(int n, int dim) {
    std::size_t s = static_cast<std::size_t>(n);
    return dim == 2 ? s * s : s;
}

} // namespace

double DensityGrid::integral() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s / static_cast<double>(values.size());
}

double DensityGrid::min_value() const {
    return *std::min_element(values.begin(), values.end());
}

double DensityGrid::max_value() const {
    return *std::max_element(values.begin(), values.end());
}

double DensityGrid::coord(std::size_t flat, int axis) const {
    const std::size_t nn = static_cast<std::size_t>(n);
    const std::size_t j = (axis == 0) ? (flat % nn) : (flat / nn);
    return static_cast<double>(j) / static_cast<double>(n);
}

void DensityGrid::check_invariants(bool require_positive, double mass_tol) const {
    if ((dim != 1 && dim != 2) || !is_pow2(n) || values.size() != pow_dim(n, dim))
        throw ConfigError("DensityGrid: inconsistent shape (dim=" + std::to_string(dim) +
                          ", n=" + std::to_string(n) + ", size=" + std::to_string(values.size()) + ")");
    for (double v : values)
        if (!std::isfinite(v))
            throw NumericalError("DensityGrid: non-finite value at t=" + std::to_string(time));
    if (require_positive && min_value() <= 0.0)
        throw NumericalError("DensityGrid: density lost positivity (min=" +
                             std::to_string(min_value()) + ") at t=" + std::to_string(time));
    const double drift = std::abs(integral() - 1.0);
    if (drift > mass_tol)
        throw NumericalError("DensityGrid: mass drift " + std::to_string(drift) +
                             " exceeds tol at t=" + std::to_string(time));
}

DensityGrid cosine_density(int dim, int n, const std::vector<double>& amps) {
    if (dim != 1 && dim != 2) throw ConfigError("cosine_density: dim must be 1 or 2");
    if (!is_pow2(n)) throw ConfigError("cosine_density: n must be a power of two");
    double total = 0.0;
    for (double a : amps) total += std::abs(a);
    if (dim * total >= 1.0)
        throw ConfigError("cosine_density: dim * sum|amps| = " + std::to_string(dim * total) +
                          " >= 1 would allow a nonpositive density");
    DensityGrid g;
    g.dim = dim;
    g.n = n;
    g.values.assign(pow_dim(n, dim), 1.0);
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        double v = 1.0;
        for (int beta = 0; beta < dim; ++beta) {
            const double x = g.coord(flat, beta);
            for (std::size_t m = 0; m < amps.size(); ++m)
                v += amps[m] * std::cos(kTwoPi * static_cast<double>(m + 1) * x);
        }
        g.values[flat] = v;
    }
    return g;
}

DensityGrid sample_field(int dim, int n, const TrigScalar& f) {
    if (dim != 1 && dim != 2) throw ConfigError("sample_field: dim must be 1 or 2");
    DensityGrid g;
    g.dim = dim;
    g.n = n;
    g.values.resize(pow_dim(n, dim));
    double y[kMaxDim] = {0.0, 0.0};
    for (std::size_t flat = 0; flat < g.values.size(); ++flat) {
        for (int beta = 0; beta < dim; ++beta) y[beta] = g.coord(flat, beta);
        g.values[flat] = f.eval(y);
    }
    return g;
}

// ---------------------------------------------------------------------------
// Spectral engine
// ---------------------------------------------------------------------------

struct Spectral::Impl {
    int dim = 1;
    int n = 0;
    std::size_t nreal = 0;  // n^dim
    std::size_t ncplx = 0;  // r2c size
    double* real = nullptr;
    fftw_complex* cplx = nullptr;
    fftw_complex* cplx2 = nullptr; // second operand scratch
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;

    Impl(int dim_, int n_) : dim(dim_), n(n_) {
        nreal = pow_dim(n, dim);
        ncplx = (dim == 1) ? static_cast<std::size_t>(n / 2 + 1)
                           : static_cast<std::size_t>(n) * static_cast<std::size_t>(n / 2 + 1);
        real = fftw_alloc_real(nreal);
        cplx = fftw_alloc_complex(ncplx);
        cplx2 = fftw_alloc_complex(ncplx);
        if (!real || !cplx || !cplx2) throw NumericalError("Spectral: allocation failed");
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (dim == 1) {
            fwd = fftw_plan_dft_r2c_1d(n, real, cplx, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_1d(n, cplx, real, FFTW_ESTIMATE);
        } else {
            // Storage is row-major with axis 0 contiguous, so FFTW's last
            // (halved) dimension corresponds to axis 0 and its first
            // dimension to axis 1.
            fwd = fftw_plan_dft_r2c_2d(n, n, real, cplx, FFTW_ESTIMATE);
            bwd = fftw_plan_dft_c2r_2d(n, n, cplx, real, FFTW_ESTIMATE);
        }
        if (!fwd || !bwd) throw NumericalError("Spectral: FFT planning failed");
    }

    ~Impl() {
        std::lock_guard<std::mutex> lock(plan_mutex());
        if (fwd) fftw_destroy_plan(fwd);
        if (bwd) fftw_destroy_plan(bwd);
        fftw_free(real);
        fftw_free(cplx);
        fftw_free(cplx2);
    }

    void check_input(const std::vector<double>& f) const {
        if (f.size() != nreal)
            throw ConfigError("Spectral: field size " + std::to_string(f.size()) +
                              " does not match grid size " + std::to_string(nreal));
    }

    void forward(const std::vector<double>& f, fftw_complex* dst) {
        std::memcpy(real, f.data(), nreal * sizeof(double));
        fftw_execute_dft_r2c(fwd, real, dst);
    }

    void backward_into(std::vector<double>& out) {
        fftw_execute(bwd); // consumes cplx, fills real
        out.resize(nreal);
        const double scale = 1.0 / static_cast<double>(nreal);
        for (std::size_t i = 0; i < nreal; ++i) out[i] = real[i] * scale;
    }

    // Signed integer frequencies of the r2c bin at flat index c.
    void freqs(std::size_t c, int& k0, int& k1) const {
        if (dim == 1) {
            k0 = static_cast<int>(c);
            k1 = 0;
        } else {
            const int half = n / 2 + 1;
            k0 = static_cast<int>(c % static_cast<std::size_t>(half));
            int row = static_cast<int>(c / static_cast<std::size_t>(half));
            k1 = (row <= n / 2) ? row : row - n;
        }
    }
};

Spectral::Spectral(int dim, int n) {
    if (dim != 1 && dim != 2) throw ConfigError("Spectral: dim must be 1 or 2");
    if (!is_pow2(n)) throw ConfigError("Spectral: n must be a power of two");
    impl_ = std::make_unique<Impl>(dim, n);
}

Spectral::~Spectral() = default;

int Spectral::dim() const { return impl_->dim; }
int Spectral::n() const { return impl_->n; }

void Spectral::convolve(const std::vector<double>& f, const std::vector<double>& g,
                        std::vector<double>& out) {
    impl_->check_input(f);
    impl_->check_input(g);
    impl_->forward(f, impl_->cplx2);
    impl_->forward(g, impl_->cplx);
    // Convolution theorem: hat(f*g) = hat(f) hat(g) with the continuous
    // convolution picking up one more 1/n^d from the quadrature weight.
    const double scale = 1.0 / static_cast<double>(impl_->nreal);
    for (std::size_t c = 0; c < impl_->ncplx; ++c) {
        const double ar = impl_->cplx2[c][0], ai = impl_->cplx2[c][1];
        const double br = impl_->cplx[c][0], bi = impl_->cplx[c][1];
        impl_->cplx[c][0] = (ar * br - ai * bi) * scale;
        impl_->cplx[c][1] = (ar * bi + ai * br) * scale;
    }
    impl_->backward_into(out);
}

void Spectral::derivative(const std::vector<double>& f, int axis, int order,
                          std::vector<double>& out) {
    impl_->check_input(f);
    if (axis < 0 || axis >= impl_->dim) throw ConfigError("Spectral::derivative: bad axis");
    if (order != 1 && order != 2) throw ConfigError("Spectral::derivative: order must be 1 or 2");
    impl_->forward(f, impl_->cplx);
    const int nyq = impl_->n / 2;
    for (std::size_t c = 0; c < impl_->ncplx; ++c) {
        int k0, k1;
        impl_->freqs(c, k0, k1);
        const int k = (axis == 0) ? k0 : k1;
        const double w = kTwoPi * static_cast<double>(k);
        double re = impl_->cplx[c][0], im = impl_->cplx[c][1];
        if (order == 1) {
            // Multiply by i w; the Nyquist mode has no well-defined odd
            // derivative on the real grid, so it is dropped.
            if (k == nyq || k == -nyq) {
                re = im = 0.0;
            } else {
                const double t = re;
                re = -w * im;
                im = w * t;
            }
        } else {
            re *= -w * w;
            im *= -w * w;
        }
        impl_->cplx[c][0] = re;
        impl_->cplx[c][1] = im;
    }
    impl_->backward_into(out);
}

void Spectral::dealias(std::vector<double>& f) {
    impl_->check_input(f);
    impl_->forward(f, impl_->cplx);
    const int cut = impl_->n / 3;
    for (std::size_t c = 0; c < impl_->ncplx; ++c) {
        int k0, k1;
        impl_->freqs(c, k0, k1);
        if (std::abs(k0) > cut || std::abs(k1) > cut) impl_->cplx[c][0] = impl_->cplx[c][1] = 0.0;
    }
    impl_->backward_into(f);
}

void Spectral::helmholtz_solve(std::vector<double>& f, const double* c, double dt) {
    impl_->check_input(f);
    impl_->forward(f, impl_->cplx);
    for (std::size_t i = 0; i < impl_->ncplx; ++i) {
        int k0, k1;
        impl_->freqs(i, k0, k1);
        const double w0 = kTwoPi * static_cast<double>(k0);
        const double w1 = kTwoPi * static_cast<double>(k1);
        const double denom = 1.0 + dt * (c[0] * w0 * w0 + (impl_->dim == 2 ? c[1] * w1 * w1 : 0.0));
        impl_->cplx[i][0] /= denom;
        impl_->cplx[i][1] /= denom;
    }
    impl_->backward_into(f);
}

std::vector<std::complex<double>> Spectral::coefficients(const std::vector<double>& f) {
    impl_->check_input(f);
    impl_->forward(f, impl_->cplx);
    const int n = impl_->n;
    const double scale = 1.0 / static_cast<double>(impl_->nreal);
    std::vector<std::complex<double>> full(impl_->nreal);
    if (impl_->dim == 1) {
        for (int k = 0; k <= n / 2; ++k) {
            const std::complex<double> v(impl_->cplx[k][0] * scale, impl_->cplx[k][1] * scale);
            full[static_cast<std::size_t>(k)] = v;
            if (k > 0 && k < n / 2) full[static_cast<std::size_t>(n - k)] = std::conj(v);
        }
    } else {
        const int half = n / 2 + 1;
        for (int row = 0; row < n; ++row) {
            for (int k0 = 0; k0 < half; ++k0) {
                const std::size_t c =
                    static_cast<std::size_t>(row) * static_cast<std::size_t>(half) +
                    static_cast<std::size_t>(k0);
                const std::complex<double> v(impl_->cplx[c][0] * scale,
                                             impl_->cplx[c][1] * scale);
                full[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                     static_cast<std::size_t>(k0)] = v;
                if (k0 > 0 && k0 < n / 2) {
                    const int mrow = (n - row) % n;
                    full[static_cast<std::size_t>(mrow) * static_cast<std::size_t>(n) +
                         static_cast<std::size_t>(n - k0)] = std::conj(v);
                }
            }
        }
    }
    return full;
}

double Spectral::eval_interp(const std::vector<std::complex<double>>& coef, int dim, int n,
                             const double* x, int axis, int order) {
    const int nyq = n / 2;
    std::complex<double> acc(0.0, 0.0);
    if (dim == 1) {
        for (int idx = 0; idx < n; ++idx) {
            const int k = (idx <= nyq) ? idx : idx - n;
            if ((order % 2 == 1) && (k == nyq || k == -nyq)) continue;
            const double w = kTwoPi * static_cast<double>(k);
            std::complex<double> factor(1.0, 0.0);
            for (int r = 0; r < order; ++r) factor *= std::complex<double>(0.0, w);
            acc += coef[static_cast<std::size_t>(idx)] * factor * std::polar(1.0, w * x[0]);
        }
    } else {
        for (int i1 = 0; i1 < n; ++i1) {
            const int k1 = (i1 <= nyq) ? i1 : i1 - n;
            for (int i0 = 0; i0 < n; ++i0) {
                const int k0 = (i0 <= nyq) ? i0 : i0 - n;
                const int ka = (axis == 0) ? k0 : k1;
                if ((order % 2 == 1) && (ka == nyq || ka == -nyq)) continue;
                const double w = kTwoPi * static_cast<double>(ka);
                std::complex<double> factor(1.0, 0.0);
                for (int r = 0; r < order; ++r) factor *= std::complex<double>(0.0, w);
                const double phase = kTwoPi * (k0 * x[0] + k1 * x[1]);
                acc += coef[static_cast<std::size_t>(i1) * static_cast<std::size_t>(n) +
                            static_cast<std::size_t>(i0)] *
                       factor * std::polar(1.0, phase);
            }
        }
    }
    return acc.real();
}

SparseField::SparseField(const std::vector<double>& values, int dim, int n, Spectral& spectral,
                         double threshold)
    : dim_(dim) {
    const auto full = spectral.coefficients(values);
    const int nyq = n / 2;
    const int rows = (dim == 1) ? 1 : n;
    for (int row = 0; row < rows; ++row) {
        const int k1 = (row <= nyq) ? row : row - n;
        for (int col = 0; col < n; ++col) {
            const int k0 = (col <= nyq) ? col : col - n;
            const std::complex<double> c =
                full[static_cast<std::size_t>(row) * static_cast<std::size_t>(n) +
                     static_cast<std::size_t>(col)];
            l1_ += std::abs(c);
            if (k0 == 0 && k1 == 0) {
                mean_ = c.real();
                continue;
            }
            if (std::abs(c) <= threshold) continue;
            modes_.push_back(Mode{k0, k1, c.real(), c.imag()});
        }
    }
}

double SparseField::eval(const double* x) const {
    double acc = mean_;
    for (const Mode& m : modes_) {
        double theta = kTwoPi * static_cast<double>(m.k0) * x[0];
        if (dim_ == 2) theta += kTwoPi * static_cast<double>(m.k1) * x[1];
        acc += m.a * std::cos(theta) - m.b * std::sin(theta);
    }
    return acc;
}

} // namespace mfl
