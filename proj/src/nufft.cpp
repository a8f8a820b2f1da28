#include "sbd/nufft.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sbd/bessel.hpp"

namespace sbd {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSigma = 2.0; // grid oversampling, both sides

std::mutex& fftw_mutex() {
    static std::mutex m;
    return m;
}

// Kaiser-Bessel window on [-1, 1] and its analytic Fourier transform
// phi_hat(w) = int_{-1}^{1} I0(beta sqrt(1-z^2)) e^{iwz} dz.
double kb_window(double beta, double z) {
    const double s = 1.0 - z * z;
    if (s <= 0.0) return s == 0.0 ? 1.0 : 0.0;
    return bessel_i0(beta * std::sqrt(s));
}

double kb_window_hat(double beta, double w) {
    const double s2 = beta * beta - w * w;
    if (s2 > 1e-12) {
        const double s = std::sqrt(s2);
        return 2.0 * std::sinh(s) / s;
    }
    if (s2 < -1e-12) {
        const double s = std::sqrt(-s2);
        return 2.0 * std::sin(s) / s;
    }
    return 2.0 * (1.0 + s2 / 6.0);
}

int width_for_tol(double tol) {
    // Kaiser-Bessel at sigma = 2 buys slightly under one digit per cell of
    // width; one extra cell of margin (calibrated against the direct oracle).
    const double digits = -std::log10(std::max(tol, 1e-15));
    return std::clamp((int)std::ceil(digits) + 2, 4, 17);
}

// Next even size with no prime factor beyond 5 (keeps FFTW fast).
int next_fast_even(int n) {
    n += n & 1;
    for (;; n += 2) {
        int m = n;
        for (int f : {2, 3, 5})
            while (m % f == 0) m /= f;
        if (m == 1) return n;
    }
}

struct Axis {
    double center = 0.0;  // point-space center
    double fcenter = 0.0; // frequency-space center (sign-folded)
    double gamma = 1.0;   // point rescale: u = (x - center) / gamma
    int n = 0;            // grid size
    double alpha1 = 0.0;  // point-side kernel half-width (u units)
    double alpha2 = 0.0;  // frequency-side kernel half-width (physical units)
};

} // namespace

std::vector<cplx> ndft_direct(const std::vector<Vec2>& points, const std::vector<Vec2>& freqs,
                              const std::vector<cplx>& coeffs, NufftSign sign) {
    if (points.size() != coeffs.size())
        throw std::invalid_argument("ndft_direct: points/coeffs size mismatch");
    const double s = (double)(int)sign;
    std::vector<cplx> out(freqs.size());
    for (std::size_t v = 0; v < freqs.size(); ++v) {
        const double fx = s * freqs[v].x;
        const double fy = s * freqs[v].y;
        cplx acc(0.0, 0.0);
        for (std::size_t k = 0; k < points.size(); ++k) {
            const double phase = points[k].x * fx + points[k].y * fy;
            acc += coeffs[k] * cplx(std::cos(phase), std::sin(phase));
        }
        out[v] = acc;
    }
    return out;
}

struct NufftPlan::Impl {
    NufftOptions opts;
    NufftSign sign = NufftSign::Plus;
    bool fast = false;

    // Direct path keeps its inputs.
    std::vector<Vec2> points;
    std::vector<Vec2> freqs;

    // Fast path state.
    int w = 0;
    double beta = 0.0;
    Axis ax, ay;
    std::vector<double> tx, ty;      // point positions in grid cells
    std::vector<cplx> prephase;      // e^{i x'.xi_c} / psi2_hat(x')
    std::vector<double> sx, sy;      // target frequencies in mode units
    std::vector<cplx> postphase;     // e^{i x_c.xi} * grid constants
    std::vector<double> deconv_x, deconv_y; // per-FFT-index mode factors
    fftw_plan fft = nullptr;
    fftw_complex* scratch = nullptr;

    ~Impl() {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        if (fft) fftw_destroy_plan(fft);
        if (scratch) fftw_free(scratch);
    }

    void build_fast();
    std::vector<cplx> apply_fast(const std::vector<cplx>& coeffs) const;
    std::vector<cplx> apply_transpose_fast(const std::vector<cplx>& values) const;
};

void NufftPlan::Impl::build_fast() {
    w = width_for_tol(opts.tol);
    beta = 2.3562 * w;
    const double s = (double)(int)sign;

    auto span = [](auto get, const auto& v, double& lo, double& hi) {
        lo = 1e300;
        hi = -1e300;
        for (const auto& p : v) {
            lo = std::min(lo, get(p));
            hi = std::max(hi, get(p));
        }
        if (v.empty()) lo = hi = 0.0;
    };

    auto setup_axis = [&](Axis& a, bool is_x) {
        double plo, phi, flo, fhi;
        span([&](const Vec2& p) { return is_x ? p.x : p.y; }, points, plo, phi);
        span([&](const Vec2& p) { return s * (is_x ? p.x : p.y); }, freqs, flo, fhi);
        a.center = 0.5 * (plo + phi);
        a.fcenter = 0.5 * (flo + fhi);
        const double X = std::max(0.5 * (phi - plo), 1e-8 * (1.0 + std::fabs(a.center)));
        const double S = std::max(0.5 * (fhi - flo), 1e-8 * (1.0 + std::fabs(a.fcenter)));
        a.gamma = kSigma * X / kPi;
        a.n = next_fast_even((int)std::ceil(2.0 * kSigma * (a.gamma * S + 0.5 * w + 1.0)));
        a.alpha1 = kPi * w / a.n;       // (w/2) * h with h = 2 pi / n
        a.alpha2 = 0.5 * w / a.gamma;   // (w/2) * (1 / gamma)
    };
    setup_axis(ax, true);
    setup_axis(ay, false);

    const std::uint64_t cells = (std::uint64_t)ax.n * (std::uint64_t)ay.n;
    if (cells * sizeof(fftw_complex) > opts.max_grid_bytes)
        throw std::runtime_error("nufft: oversampled grid exceeds the memory limit");

    const std::size_t nz = points.size();
    tx.resize(nz);
    ty.resize(nz);
    prephase.resize(nz);
    for (std::size_t k = 0; k < nz; ++k) {
        const double px = points[k].x - ax.center;
        const double py = points[k].y - ay.center;
        const double ux = px / ax.gamma;
        const double uy = py / ay.gamma;
        tx[k] = (ux + kPi) * ax.n / (2.0 * kPi);
        ty[k] = (uy + kPi) * ay.n / (2.0 * kPi);
        const double phase = px * ax.fcenter + py * ay.fcenter;
        const double dec = (ax.alpha2 * kb_window_hat(beta, ax.alpha2 * px)) *
                           (ay.alpha2 * kb_window_hat(beta, ay.alpha2 * py));
        prephase[k] = cplx(std::cos(phase), std::sin(phase)) / dec;
    }

    const std::size_t nf = freqs.size();
    sx.resize(nf);
    sy.resize(nf);
    postphase.resize(nf);
    const double cx = 2.0 * kPi / (ax.n * ax.gamma);
    const double cy = 2.0 * kPi / (ay.n * ay.gamma);
    for (std::size_t v = 0; v < nf; ++v) {
        const double fx = s * freqs[v].x;
        const double fy = s * freqs[v].y;
        sx[v] = ax.gamma * (fx - ax.fcenter);
        sy[v] = ay.gamma * (fy - ay.fcenter);
        const double phase = ax.center * fx + ay.center * fy;
        postphase[v] = cplx(std::cos(phase), std::sin(phase)) * (cx * cy);
    }

    auto make_deconv = [&](const Axis& a, std::vector<double>& d) {
        d.assign(a.n, 0.0);
        const int band = a.n / (int)(2.0 * kSigma); // modes used by interpolation
        for (int m = 0; m < a.n; ++m) {
            const int j = m <= a.n / 2 ? m : m - a.n;
            if (std::abs(j) > band) continue;
            const double psi1 = a.alpha1 * kb_window_hat(beta, a.alpha1 * j);
            d[m] = ((j & 1) ? -1.0 : 1.0) / psi1;
        }
    };
    make_deconv(ax, deconv_x);
    make_deconv(ay, deconv_y);

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        scratch = fftw_alloc_complex(cells);
        // Backward transform realizes e^{+2 pi i j m / n}; the sign of the
        // overall exponent is already folded into the frequencies.
        fft = fftw_plan_dft_2d(ax.n, ay.n, scratch, scratch, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    if (!fft) throw std::runtime_error("nufft: FFTW plan creation failed");
    fast = true;
}

std::vector<cplx> NufftPlan::Impl::apply_fast(const std::vector<cplx>& coeffs) const {
    const int n1 = ax.n, n2 = ay.n;
    const std::uint64_t cells = (std::uint64_t)n1 * n2;
    fftw_complex* grid;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        grid = fftw_alloc_complex(cells);
    }
    std::memset(grid, 0, cells * sizeof(fftw_complex));
    cplx* g = reinterpret_cast<cplx*>(grid);

    // Spread: separable Kaiser-Bessel accumulation, w x w cells per point.
    std::vector<double> wx(w), wy(w);
    const double half = 0.5 * w;
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
        const cplx b = coeffs[k] * prephase[k];
        if (b == cplx(0.0, 0.0)) continue;
        const int ix0 = (int)std::ceil(tx[k] - half);
        const int iy0 = (int)std::ceil(ty[k] - half);
        for (int i = 0; i < w; ++i) {
            wx[i] = kb_window(beta, (ix0 + i - tx[k]) / half);
            wy[i] = kb_window(beta, (iy0 + i - ty[k]) / half);
        }
        for (int i = 0; i < w; ++i) {
            const int mx = ((ix0 + i) % n1 + n1) % n1;
            const cplx bx = b * wx[i];
            cplx* row = g + (std::size_t)mx * n2;
            for (int j = 0; j < w; ++j) {
                const int my = ((iy0 + j) % n2 + n2) % n2;
                row[my] += bx * wy[j];
            }
        }
    }

    fftw_execute_dft(fft, grid, grid);

    // Deconvolve only within the used band (outside is zeroed anyway).
    for (int mx = 0; mx < n1; ++mx) {
        const double dx = deconv_x[mx];
        cplx* row = g + (std::size_t)mx * n2;
        if (dx == 0.0) continue;
        for (int my = 0; my < n2; ++my) row[my] *= dx * deconv_y[my];
    }

    // Interpolate at the target frequencies.
    std::vector<cplx> out(sx.size());
    for (std::size_t v = 0; v < sx.size(); ++v) {
        const int jx0 = (int)std::ceil(sx[v] - half);
        const int jy0 = (int)std::ceil(sy[v] - half);
        for (int i = 0; i < w; ++i) {
            wx[i] = kb_window(beta, (jx0 + i - sx[v]) / half);
            wy[i] = kb_window(beta, (jy0 + i - sy[v]) / half);
        }
        cplx acc(0.0, 0.0);
        for (int i = 0; i < w; ++i) {
            const int mx = ((jx0 + i) % n1 + n1) % n1;
            const cplx* row = g + (std::size_t)mx * n2;
            cplx rowacc(0.0, 0.0);
            for (int j = 0; j < w; ++j) {
                const int my = ((jy0 + j) % n2 + n2) % n2;
                rowacc += row[my] * wy[j];
            }
            acc += rowacc * wx[i];
        }
        out[v] = acc * postphase[v];
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_free(grid);
    }
    return out;
}

// Transposed stage order: postphase multiply, spread at the frequency
// stencils, deconvolve, FFT (the DFT matrix is symmetric), gather at the
// point stencils, prephase multiply.
std::vector<cplx> NufftPlan::Impl::apply_transpose_fast(const std::vector<cplx>& values) const {
    const int n1 = ax.n, n2 = ay.n;
    const std::uint64_t cells = (std::uint64_t)n1 * n2;
    fftw_complex* grid;
    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        grid = fftw_alloc_complex(cells);
    }
    std::memset(grid, 0, cells * sizeof(fftw_complex));
    cplx* g = reinterpret_cast<cplx*>(grid);

    std::vector<double> wx(w), wy(w);
    const double half = 0.5 * w;
    for (std::size_t v = 0; v < values.size(); ++v) {
        const cplx b = values[v] * postphase[v];
        if (b == cplx(0.0, 0.0)) continue;
        const int jx0 = (int)std::ceil(sx[v] - half);
        const int jy0 = (int)std::ceil(sy[v] - half);
        for (int i = 0; i < w; ++i) {
            wx[i] = kb_window(beta, (jx0 + i - sx[v]) / half);
            wy[i] = kb_window(beta, (jy0 + i - sy[v]) / half);
        }
        for (int i = 0; i < w; ++i) {
            const int mx = ((jx0 + i) % n1 + n1) % n1;
            const cplx bx = b * wx[i];
            cplx* row = g + (std::size_t)mx * n2;
            for (int j = 0; j < w; ++j) {
                const int my = ((jy0 + j) % n2 + n2) % n2;
                row[my] += bx * wy[j];
            }
        }
    }

    for (int mx = 0; mx < n1; ++mx) {
        const double dx = deconv_x[mx];
        cplx* row = g + (std::size_t)mx * n2;
        if (dx == 0.0) {
            std::fill(row, row + n2, cplx(0.0, 0.0));
            continue;
        }
        for (int my = 0; my < n2; ++my) row[my] *= dx * deconv_y[my];
    }

    fftw_execute_dft(fft, grid, grid);

    std::vector<cplx> out(tx.size());
    for (std::size_t k = 0; k < tx.size(); ++k) {
        const int ix0 = (int)std::ceil(tx[k] - half);
        const int iy0 = (int)std::ceil(ty[k] - half);
        for (int i = 0; i < w; ++i) {
            wx[i] = kb_window(beta, (ix0 + i - tx[k]) / half);
            wy[i] = kb_window(beta, (iy0 + i - ty[k]) / half);
        }
        cplx acc(0.0, 0.0);
        for (int i = 0; i < w; ++i) {
            const int mx = ((ix0 + i) % n1 + n1) % n1;
            const cplx* row = g + (std::size_t)mx * n2;
            cplx rowacc(0.0, 0.0);
            for (int j = 0; j < w; ++j) {
                const int my = ((iy0 + j) % n2 + n2) % n2;
                rowacc += row[my] * wy[j];
            }
            acc += rowacc * wx[i];
        }
        out[k] = acc * prephase[k];
    }

    {
        std::lock_guard<std::mutex> lock(fftw_mutex());
        fftw_free(grid);
    }
    return out;
}

NufftPlan::NufftPlan(std::vector<Vec2> points, std::vector<Vec2> freqs, NufftSign sign,
                     NufftOptions options)
    : impl_(std::make_unique<Impl>()) {
    impl_->opts = options;
    impl_->sign = sign;
    impl_->points = std::move(points);
    impl_->freqs = std::move(freqs);
    const std::uint64_t work = (std::uint64_t)impl_->points.size() * impl_->freqs.size();
    const bool direct = options.mode == NufftOptions::Mode::Direct ||
                        (options.mode == NufftOptions::Mode::Auto && work <= options.direct_threshold);
    if (!direct) impl_->build_fast();
}

NufftPlan::~NufftPlan() = default;
NufftPlan::NufftPlan(NufftPlan&&) noexcept = default;
NufftPlan& NufftPlan::operator=(NufftPlan&&) noexcept = default;

std::vector<cplx> NufftPlan::apply(const std::vector<cplx>& coeffs) const {
    if (coeffs.size() != impl_->points.size())
        throw std::invalid_argument("nufft apply: coefficient count mismatch");
    if (!impl_->fast) return ndft_direct(impl_->points, impl_->freqs, coeffs, impl_->sign);
    return impl_->apply_fast(coeffs);
}

std::vector<cplx> NufftPlan::apply_transpose(const std::vector<cplx>& values) const {
    if (values.size() != impl_->freqs.size())
        throw std::invalid_argument("nufft apply_transpose: value count mismatch");
    if (!impl_->fast) return ndft_direct(impl_->freqs, impl_->points, values, impl_->sign);
    return impl_->apply_transpose_fast(values);
}

bool NufftPlan::fast_path() const { return impl_->fast; }
int NufftPlan::kernel_width() const { return impl_->w; }
std::uint64_t NufftPlan::grid_cells() const {
    return impl_->fast ? (std::uint64_t)impl_->ax.n * impl_->ay.n : 0;
}

std::vector<cplx> nufft(const std::vector<Vec2>& points, const std::vector<Vec2>& freqs,
                        const std::vector<cplx>& coeffs, NufftSign sign, double tol) {
    NufftOptions opts;
    opts.tol = tol;
    NufftPlan plan(points, freqs, sign, opts);
    return plan.apply(coeffs);
}

} // namespace sbd
