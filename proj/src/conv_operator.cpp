#include "sbd/conv_operator.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "sbd/bessel.hpp"

namespace sbd {

namespace {

constexpr double kSbdToleranceShare = 0.375; // 0.75 safety x eps/2
constexpr std::uint64_t kPairChunk = 1 << 22;

struct SpectralModel {
    SBDecomposition sbd;              // fit of the real radial profile (unit annulus)
    std::vector<RingSpec> extra_rings; // exact components (Helmholtz J0 ring)
};

RadialKernel unit_laplace(double delta_max) {
    RadialKernel k;
    k.eval = [delta_max](double r) { return std::log(delta_max * r); };
    k.deriv = [](double r) { return 1.0 / r; };
    k.singular_at_origin = true;
    k.name = "laplace-unit";
    return k;
}

RadialKernel unit_user(const RadialKernel& user, double delta_max) {
    RadialKernel k;
    auto eval = user.eval;
    auto deriv = user.deriv;
    k.eval = [eval, delta_max](double r) { return eval(delta_max * r); };
    k.deriv = [deriv, delta_max](double r) { return delta_max * deriv(delta_max * r); };
    k.singular_at_origin = user.singular_at_origin;
    k.oscillation_freq = user.oscillation_freq * delta_max;
    k.name = user.name + "-unit";
    return k;
}

RadialKernel quarter_y0(double kappa) {
    RadialKernel k;
    k.eval = [kappa](double r) { return 0.25 * bessel_y0(kappa * r); };
    k.deriv = [kappa](double r) { return -0.25 * kappa * bessel_y1(kappa * r); };
    k.singular_at_origin = true;
    k.oscillation_freq = kappa;
    k.name = "y0-part";
    return k;
}

// An oscillatory kernel only starts converging once rho_P clears its
// frequency, so the fit runs at gamma ~ a*kappa/pi + gamma(tol). Past
// gamma ~ 6 the Gram is numerically singular; cap the inner radius so the
// total stays inside the conditioning budget.
double oscillation_a_cap(double kappa_unit, double eps) {
    if (kappa_unit <= 0.0) return 1.0;
    const double gamma_tol =
        std::min(4.5, std::log(1.0 / std::max(kSbdToleranceShare * eps, 1e-14)) / 3.7 + 0.8);
    const double budget = 6.2 - gamma_tol;
    return std::clamp(budget * std::numbers::pi / kappa_unit, 0.005, 1.0);
}

double kernel_a_cap(const KernelSpec& kernel, double delta_max, double eps) {
    switch (kernel.kind) {
        case KernelSpec::Kind::Laplace:
            return 1.0;
        case KernelSpec::Kind::Helmholtz:
            return oscillation_a_cap(kernel.k * delta_max, eps);
        case KernelSpec::Kind::User:
            return oscillation_a_cap(kernel.user.oscillation_freq * delta_max, eps);
    }
    return 1.0;
}

SpectralModel build_spectral_model(const KernelSpec& kernel, double delta_max, double a,
                                   const AssembleOptions& opts) {
    SpectralModel model;
    const double tol = kSbdToleranceShare * opts.eps;
    switch (kernel.kind) {
        case KernelSpec::Kind::Laplace: {
            model.sbd = solve_sbd(unit_laplace(delta_max), a, tol);
            break;
        }
        case KernelSpec::Kind::User: {
            model.sbd = solve_sbd(unit_user(kernel.user, delta_max), a, tol);
            break;
        }
        case KernelSpec::Kind::Helmholtz: {
            const double kappa = kernel.k * delta_max;
            const HelmholtzPlan plan = helmholtz_plan(kappa, opts.small_k_factor);
            if (std::holds_alternative<RootOfY0>(plan.regime)) {
                model.sbd = solve_sbd(quarter_y0(kappa), a, tol);
            } else if (std::holds_alternative<RescaledToRoot>(plan.regime)) {
                // Fit Y0(k' r) on the shrunken annulus; dilating by k/k' then
                // covers [a, 1] for Y0(kappa r).
                const double kp = std::get<RescaledToRoot>(plan.regime).k_prime;
                const double scale = kappa / kp;
                model.sbd = solve_sbd(quarter_y0(kp), a * scale, tol);
                model.sbd.radial_scale = scale;
                model.sbd.a = a;
            } else {
                const double H = std::get<RobinRegime>(plan.regime).H;
                SolveOptions so;
                so.boundary = Robin{H};
                so.subtract_offset = false; // Y0(kappa r) satisfies the Robin condition as-is
                model.sbd = solve_sbd_opts(quarter_y0(kappa), a, tol, so);
            }
            model.extra_rings.push_back({kappa, cplx(0.0, -0.25)});
            break;
        }
    }
    return model;
}

} // namespace

ChosenParameters choose_parameters(std::uint64_t N_z, double eps, double alpha) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::domain_error("choose_parameters: eps must lie in (0, 1)");
    if (alpha < 0.0 || alpha > 1.0 / 6.0 + 1e-12)
        throw std::domain_error("choose_parameters: alpha must lie in [0, 1/6]");
    const double log_eps = std::fabs(std::log(eps));
    if (!((double)N_z > log_eps))
        throw std::domain_error("choose_parameters: requires N_z > |log eps|");
    ChosenParameters p;
    p.a = std::pow(log_eps, 2.0 / 3.0) / std::pow((double)N_z, 2.0 / 3.0 - alpha);
    p.a = std::min(p.a, 0.5);
    p.P_hint = (int)std::ceil(0.30 * log_eps / p.a);
    return p;
}

struct CompressedOperator::Impl {
    KernelSpec kernel;
    PointCloud src, tgt;
    bool single = false;
    double eps = 0.0;
    double alpha = 0.0;
    double a = 0.0;
    double dmin = 0.0;
    double dmax = 0.0;
    double nufft_tol = 0.0;
    SBDecomposition sbd;
    FrequencyQuadrature quad; // physical frequencies
    SparsePairMatrix D;

    std::unique_ptr<NufftPlan> fwd_in;  // source -> spectrum (sign -)
    std::unique_ptr<NufftPlan> fwd_out; // spectrum -> target (sign +)

    NufftOptions nufft_options() const {
        NufftOptions o;
        o.tol = nufft_tol;
        o.direct_threshold = direct_threshold;
        o.max_grid_bytes = max_grid_bytes;
        return o;
    }
    std::uint64_t direct_threshold = std::uint64_t(1) << 20;
    std::uint64_t max_grid_bytes = std::uint64_t(4) << 30;

    void build_forward_plans() {
        fwd_in = std::make_unique<NufftPlan>(src.points, quad.freqs, NufftSign::Minus,
                                             nufft_options());
        fwd_out = std::make_unique<NufftPlan>(quad.freqs, tgt.points, NufftSign::Plus,
                                              nufft_options());
    }

    void assemble_close_matrix();
};

void CompressedOperator::Impl::assemble_close_matrix() {
    const NeighborPairs pairs = neighbor_pairs(tgt, src, dmin, single);
    const std::uint64_t nnz = pairs.count();

    D.row_offsets = pairs.row_offsets;
    D.cols = pairs.cols;
    D.values.resize(nnz);

    cplx weight_sum(0.0, 0.0);
    for (const cplx& w : quad.weights) weight_sum += w;

    // Far-field values at the pair difference vectors, NUFFT-evaluated in
    // chunks (the spectrum is the "point" side, the differences the output).
    std::vector<Vec2> diffs;
    for (std::uint64_t base = 0; base < nnz; base += kPairChunk) {
        const std::uint64_t end = std::min(nnz, base + kPairChunk);
        diffs.clear();
        diffs.reserve(end - base);
        // Locate rows covering [base, end): row_offsets is monotone.
        std::size_t k = 0;
        while (pairs.row_offsets[k + 1] <= base) ++k;
        std::uint64_t i = base;
        for (std::size_t row = k; i < end; ++row) {
            for (; i < std::min(end, pairs.row_offsets[row + 1]); ++i)
                diffs.push_back(tgt.points[row] - src.points[pairs.cols[i]]);
        }
        NufftPlan plan(quad.freqs, diffs, NufftSign::Plus, nufft_options());
        const std::vector<cplx> far = plan.apply(quad.weights);
        for (std::uint64_t j = base; j < end; ++j) {
            const double r = norm2(diffs[j - base]);
            if (!(r > 0.0))
                throw std::runtime_error("assemble: coincident source/target points");
            D.values[j] = kernel.value(r) - far[j - base];
        }
    }

    if (single) {
        // Insert diagonal entries -G_approx(0) so the far field's self
        // contribution cancels; each row keeps sorted column order.
        const std::size_t n = tgt.size();
        std::vector<std::uint64_t> new_offsets(n + 1, 0);
        std::vector<std::uint32_t> new_cols(nnz + n);
        std::vector<cplx> new_vals(nnz + n);
        std::uint64_t out = 0;
        for (std::size_t k = 0; k < n; ++k) {
            bool placed = false;
            for (std::uint64_t i = D.row_offsets[k]; i < D.row_offsets[k + 1]; ++i) {
                if (!placed && D.cols[i] > k) {
                    new_cols[out] = (std::uint32_t)k;
                    new_vals[out++] = -weight_sum;
                    placed = true;
                }
                new_cols[out] = D.cols[i];
                new_vals[out++] = D.values[i];
            }
            if (!placed) {
                new_cols[out] = (std::uint32_t)k;
                new_vals[out++] = -weight_sum;
            }
            new_offsets[k + 1] = out;
        }
        D.row_offsets = std::move(new_offsets);
        D.cols = std::move(new_cols);
        D.values = std::move(new_vals);
    }
}

CompressedOperator::CompressedOperator() : impl_(std::make_unique<Impl>()) {}
CompressedOperator::~CompressedOperator() = default;
CompressedOperator::CompressedOperator(CompressedOperator&&) noexcept = default;
CompressedOperator& CompressedOperator::operator=(CompressedOperator&&) noexcept = default;

CompressedOperator CompressedOperator::assemble(const KernelSpec& kernel, PointCloud source,
                                                PointCloud target, const AssembleOptions& opts) {
    if (source.size() == 0 || target.size() == 0)
        throw std::invalid_argument("assemble: clouds must be nonempty");

    CompressedOperator op;
    Impl& im = *op.impl_;
    im.kernel = kernel;
    im.single = source.points == target.points;
    im.src = std::move(source);
    im.tgt = im.single ? im.src : std::move(target);
    im.eps = opts.eps;
    im.alpha = opts.alpha;
    im.direct_threshold = opts.nufft_direct_threshold;
    im.max_grid_bytes = opts.max_grid_bytes;

    im.dmax = im.single ? im.src.diameter : union_diameter(im.src, im.tgt);
    if (!(im.dmax > 0.0)) throw std::invalid_argument("assemble: degenerate cloud (zero diameter)");

    if (opts.a_override > 0.0) {
        im.a = opts.a_override;
        if (!(im.a < 1.0)) throw std::domain_error("assemble: a must lie in (0, 1)");
    } else {
        const std::uint64_t n = std::max(im.src.size(), im.tgt.size());
        im.a = choose_parameters(n, opts.eps, opts.alpha).a;
    }
    im.a = std::min(im.a, kernel_a_cap(kernel, im.dmax, opts.eps));
    im.dmin = im.a * im.dmax;

    SpectralModel model = build_spectral_model(kernel, im.dmax, im.a, opts);
    im.sbd = std::move(model.sbd);

    std::vector<RingSpec> rings = std::move(model.extra_rings);
    rings.reserve(rings.size() + im.sbd.P);
    for (int p = 0; p < im.sbd.P; ++p) {
        const double amp = im.sbd.coeffs[p] * im.sbd.basis.norm_constants[p];
        rings.push_back({im.sbd.basis.roots[p] * im.sbd.radial_scale, cplx(amp, 0.0)});
    }
    im.quad = build_ring_quadrature(rings, im.sbd.constant_offset, opts.eps);

    // Rescale the unit-ball spectrum to physical coordinates.
    for (Vec2& xi : im.quad.freqs) xi = xi / im.dmax;

    double weight_abs_sum = 0.0;
    for (const cplx& w : im.quad.weights) weight_abs_sum += std::abs(w);
    im.nufft_tol = opts.eps / (20.0 * std::max(1.0, weight_abs_sum));

    im.assemble_close_matrix();
    im.build_forward_plans();
    return op;
}

CompressedOperator CompressedOperator::assemble(const KernelSpec& kernel, PointCloud cloud,
                                                const AssembleOptions& opts) {
    return assemble(kernel, cloud, cloud, opts);
}

std::vector<cplx> CompressedOperator::apply(const std::vector<cplx>& f) const {
    const Impl& im = *impl_;
    if (f.size() != im.src.size()) throw std::invalid_argument("apply: input size mismatch");
    std::vector<cplx> spectrum = im.fwd_in->apply(f);
    for (int v = 0; v < im.quad.size(); ++v) spectrum[v] *= im.quad.weights[v];
    std::vector<cplx> q = im.fwd_out->apply(spectrum);
    im.D.accumulate_apply(f, q);
    return q;
}

std::vector<cplx> CompressedOperator::apply_adjoint(const std::vector<cplx>& u) const {
    const Impl& im = *impl_;
    if (u.size() != im.tgt.size()) throw std::invalid_argument("apply_adjoint: input size mismatch");
    // A^H = conj . A^T . conj with the transposes of the forward plans, so
    // the adjoint is consistent with apply() to roundoff.
    std::vector<cplx> ubar(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) ubar[i] = std::conj(u[i]);
    std::vector<cplx> spectrum = im.fwd_out->apply_transpose(ubar);
    for (int v = 0; v < im.quad.size(); ++v) spectrum[v] *= im.quad.weights[v];
    std::vector<cplx> q = im.fwd_in->apply_transpose(spectrum);
    for (auto& v : q) v = std::conj(v);
    im.D.accumulate_apply_adjoint(u, q);
    return q;
}

const PointCloud& CompressedOperator::source() const { return impl_->src; }
const PointCloud& CompressedOperator::target() const { return impl_->tgt; }
bool CompressedOperator::single_cloud() const { return impl_->single; }
const FrequencyQuadrature& CompressedOperator::quadrature() const { return impl_->quad; }
const SparsePairMatrix& CompressedOperator::close_matrix() const { return impl_->D; }
const KernelSpec& CompressedOperator::kernel() const { return impl_->kernel; }
double CompressedOperator::eps() const { return impl_->eps; }
double CompressedOperator::delta_min() const { return impl_->dmin; }
double CompressedOperator::delta_max() const { return impl_->dmax; }
double CompressedOperator::annulus_a() const { return impl_->a; }
const SBDecomposition& CompressedOperator::decomposition() const { return impl_->sbd; }

std::uint64_t CompressedOperator::bytes() const {
    const Impl& im = *impl_;
    std::uint64_t b = 0;
    b += (im.src.size() + (im.single ? 0 : im.tgt.size())) * sizeof(Vec2);
    b += im.quad.freqs.size() * sizeof(Vec2) + im.quad.weights.size() * sizeof(cplx);
    b += im.quad.ring_offsets.size() * sizeof(int);
    b += im.D.row_offsets.size() * sizeof(std::uint64_t) + im.D.cols.size() * sizeof(std::uint32_t) +
         im.D.values.size() * sizeof(cplx);
    // Forward NUFFT tables: per-point cells + prephase and per-target modes +
    // postphase (2 doubles + 1 complex each side).
    const std::uint64_t per_entry = 2 * sizeof(double) + sizeof(cplx);
    const std::uint64_t nsrc = im.src.size(), ntgt = im.tgt.size(), nq = im.quad.freqs.size();
    if (im.fwd_in && im.fwd_in->fast_path()) b += (nsrc + nq) * per_entry;
    if (im.fwd_out && im.fwd_out->fast_path()) b += (nq + ntgt) * per_entry;
    return b;
}

namespace {

constexpr char kOperatorMagic[8] = {'S', 'B', 'D', 'O', 'P', 'v', '1', '\0'};

template <typename T>
void write_pod(std::ostream& os, const T& v) {
    os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <typename T>
void read_pod(std::istream& is, T& v) {
    is.read(reinterpret_cast<char*>(&v), sizeof(T));
}

template <typename T>
void write_vec(std::ostream& os, const std::vector<T>& v) {
    write_pod(os, (std::uint64_t)v.size());
    os.write(reinterpret_cast<const char*>(v.data()), (std::streamsize)(v.size() * sizeof(T)));
}

template <typename T>
void read_vec(std::istream& is, std::vector<T>& v) {
    std::uint64_t n = 0;
    read_pod(is, n);
    v.resize(n);
    is.read(reinterpret_cast<char*>(v.data()), (std::streamsize)(n * sizeof(T)));
}

void write_sbd(std::ostream& os, const SBDecomposition& s) {
    write_pod(os, s.a);
    write_pod(os, (std::int32_t)s.P);
    write_pod(os, s.constant_offset);
    write_pod(os, s.achieved_error);
    write_pod(os, s.radial_scale);
    const std::int32_t bc = s.basis.is_dirichlet() ? 0 : 1;
    write_pod(os, bc);
    write_pod(os, bc == 1 ? s.basis.robin_h() : 0.0);
    write_vec(os, s.coeffs);
    write_vec(os, s.basis.roots);
    write_vec(os, s.basis.norm_constants);
}

void read_sbd(std::istream& is, SBDecomposition& s) {
    std::int32_t P = 0, bc = 0;
    double H = 0.0;
    read_pod(is, s.a);
    read_pod(is, P);
    read_pod(is, s.constant_offset);
    read_pod(is, s.achieved_error);
    read_pod(is, s.radial_scale);
    read_pod(is, bc);
    read_pod(is, H);
    s.P = P;
    s.basis.boundary = bc == 1 ? BoundaryCondition(Robin{H}) : BoundaryCondition(Dirichlet{});
    read_vec(is, s.coeffs);
    read_vec(is, s.basis.roots);
    read_vec(is, s.basis.norm_constants);
}

} // namespace

void CompressedOperator::save(const std::string& path) const {
    const Impl& im = *impl_;
    if (im.kernel.kind == KernelSpec::Kind::User)
        throw std::runtime_error("save: user-defined kernels are not serializable");
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("save: cannot open " + path);
    os.write(kOperatorMagic, sizeof(kOperatorMagic));
    write_pod(os, (std::int32_t)im.kernel.kind);
    write_pod(os, im.kernel.k);
    write_pod(os, (std::uint8_t)(im.single ? 1 : 0));
    write_pod(os, im.eps);
    write_pod(os, im.alpha);
    write_pod(os, im.a);
    write_pod(os, im.dmin);
    write_pod(os, im.dmax);
    write_pod(os, im.nufft_tol);
    write_vec(os, im.src.points);
    write_pod(os, im.src.diameter);
    if (!im.single) {
        write_vec(os, im.tgt.points);
        write_pod(os, im.tgt.diameter);
    }
    write_vec(os, im.quad.freqs);
    write_vec(os, im.quad.weights);
    write_vec(os, im.quad.ring_offsets);
    write_pod(os, im.quad.total_error_budget);
    write_vec(os, im.D.row_offsets);
    write_vec(os, im.D.cols);
    write_vec(os, im.D.values);
    write_sbd(os, im.sbd);
    if (!os) throw std::runtime_error("save: write failed for " + path);
}

CompressedOperator CompressedOperator::load(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw std::runtime_error("load: cannot open " + path);
    char magic[8];
    is.read(magic, sizeof(magic));
    if (std::memcmp(magic, kOperatorMagic, sizeof(magic)) != 0)
        throw std::runtime_error("load: not an operator file (bad magic)");
    CompressedOperator op;
    Impl& im = *op.impl_;
    std::int32_t kind = 0;
    std::uint8_t single = 0;
    read_pod(is, kind);
    read_pod(is, im.kernel.k);
    im.kernel.kind = (KernelSpec::Kind)kind;
    read_pod(is, single);
    im.single = single != 0;
    read_pod(is, im.eps);
    read_pod(is, im.alpha);
    read_pod(is, im.a);
    read_pod(is, im.dmin);
    read_pod(is, im.dmax);
    read_pod(is, im.nufft_tol);
    read_vec(is, im.src.points);
    read_pod(is, im.src.diameter);
    if (!im.single) {
        read_vec(is, im.tgt.points);
        read_pod(is, im.tgt.diameter);
    } else {
        im.tgt = im.src;
    }
    read_vec(is, im.quad.freqs);
    read_vec(is, im.quad.weights);
    read_vec(is, im.quad.ring_offsets);
    read_pod(is, im.quad.total_error_budget);
    read_vec(is, im.D.row_offsets);
    read_vec(is, im.D.cols);
    read_vec(is, im.D.values);
    read_sbd(is, im.sbd);
    if (!is) throw std::runtime_error("load: truncated operator file " + path);
    im.build_forward_plans();
    return op;
}

} // namespace sbd
