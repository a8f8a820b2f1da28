#include "sbd/sbd.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <limits>
#include <numbers>

#include "sbd/bessel.hpp"
#include "sbd/bessel_roots.hpp"
#include "sbd/gram.hpp"

namespace sbd {

namespace {

BesselBasis make_basis(const BoundaryCondition& bc, int P) {
    if (std::holds_alternative<Dirichlet>(bc)) return make_dirichlet_basis(P);
    return make_robin_basis(std::get<Robin>(bc).H, P);
}

BesselBasis basis_head(const BesselBasis& b, int P) {
    BesselBasis h;
    h.boundary = b.boundary;
    h.roots.assign(b.roots.begin(), b.roots.begin() + P);
    h.norm_constants.assign(b.norm_constants.begin(), b.norm_constants.begin() + P);
    return h;
}

// Shared state across the dichotomy probes: the right-hand side entries, the
// validation-grid basis samples and the Cholesky factor all extend or embed
// as leading blocks when P grows, so nothing is recomputed per probe.
class Workspace {
  public:
    Workspace(const RadialKernel& kernel, double a, const SolveOptions& opts)
        : kernel_(kernel), a_(a), opts_(opts) {
        offset_ = opts.subtract_offset ? kernel.eval(1.0) : 0.0;
        const int n = opts.validation_points;
        grid_.resize(n);
        target_.resize(n);
        for (int i = 0; i < n; ++i) {
            grid_[i] = a * std::pow(1.0 / a, (double)i / (n - 1));
            target_(i) = kernel.eval(grid_[i]) - offset_;
        }
    }

    void ensure(int P) {
        if (P <= cap_) return;
        cap_ = P;
        basis_ = make_basis(opts_.boundary, cap_);
        const int n = opts_.validation_points;
        const int old_cols = (int)samples_.cols();
        samples_.conservativeResize(n, cap_);
        for (int p = old_cols; p < cap_; ++p)
            for (int i = 0; i < n; ++i)
                samples_(i, p) = basis_.eval(p + 1, grid_[i]);
        rhs_ = assemble_rhs(kernel_, basis_, a_);
        if (!basis_.is_dirichlet()) {
            // a_H pairing adds H * oint (G - offset) e_p over the unit circle.
            const double H = basis_.robin_h();
            const double boundary_value = kernel_.eval(1.0) - offset_;
            if (boundary_value != 0.0)
                for (int p = 1; p <= cap_; ++p)
                    rhs_(p - 1) += 2.0 * std::numbers::pi * H * boundary_value * basis_.eval(p, 1.0);
        }
        gram_ = assemble_gram(basis_, a_);
        llt_.compute(gram_.entries);
        llt_ok_ = llt_.info() == Eigen::Success;
    }

    // Solves the leading P x P system and returns the validation error.
    double solve_at(int P, Eigen::VectorXd& alpha) const {
        const auto A = llt_.matrixLLT().topLeftCorner(P, P);
        if (llt_ok_) {
            alpha = A.template triangularView<Eigen::Lower>().solve(rhs_.head(P));
            alpha = A.template triangularView<Eigen::Lower>().adjoint().solve(alpha);
        } else {
            // Loss of positive definiteness at extreme gamma: fall back to a
            // symmetric indefinite factorization of the block.
            Eigen::LDLT<Eigen::MatrixXd> ldlt(gram_.entries.topLeftCorner(P, P));
            if (ldlt.info() != Eigen::Success)
                throw std::runtime_error("solve_sbd: Gram factorization failed (conditioning)");
            alpha = ldlt.solve(rhs_.head(P));
        }
        if (!alpha.allFinite())
            throw std::runtime_error("solve_sbd: Gram factorization failed (conditioning)");
        return (target_ - samples_.leftCols(P) * alpha).cwiseAbs().maxCoeff();
    }

    SBDecomposition pack(int P, const Eigen::VectorXd& alpha, double err) const {
        SBDecomposition s;
        s.a = a_;
        s.P = P;
        s.coeffs.assign(alpha.data(), alpha.data() + P);
        s.basis = basis_head(basis_, P);
        s.constant_offset = offset_;
        s.achieved_error = err;
        return s;
    }

  private:
    const RadialKernel& kernel_;
    double a_;
    SolveOptions opts_;
    double offset_ = 0.0;
    int cap_ = 0;
    std::vector<double> grid_;
    Eigen::VectorXd target_;
    Eigen::MatrixXd samples_;
    Eigen::VectorXd rhs_;
    GramMatrix gram_;
    BesselBasis basis_;
    Eigen::LLT<Eigen::MatrixXd> llt_;
    bool llt_ok_ = false;
};

int default_p_max(double a, const RadialKernel& kernel) {
    // gamma = 8 covers the error floor; oscillatory kernels only start
    // converging once rho_P clears the oscillation frequency.
    return (int)std::ceil(8.0 / a) + (int)std::ceil(kernel.oscillation_freq / std::numbers::pi);
}

} // namespace

double eval_sbd(const SBDecomposition& sbd, double r) {
    double v = sbd.constant_offset;
    for (int p = 0; p < sbd.P; ++p)
        v += sbd.coeffs[p] * sbd.basis.norm_constants[p] *
             bessel_j0(sbd.basis.roots[p] * sbd.radial_scale * r);
    return v;
}

SBDecomposition fit_sbd(const RadialKernel& kernel, double a, int P, const SolveOptions& opts) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("fit_sbd: a must lie in (0, 1)");
    if (P < 1) throw std::domain_error("fit_sbd: P must be positive");
    Workspace ws(kernel, a, opts);
    ws.ensure(P);
    Eigen::VectorXd alpha;
    const double err = ws.solve_at(P, alpha);
    return ws.pack(P, alpha, err);
}

SBDecomposition solve_sbd(const RadialKernel& kernel, double a, double tol, int P_max) {
    SolveOptions opts;
    opts.P_max = P_max;
    return solve_sbd_opts(kernel, a, tol, opts);
}

SBDecomposition solve_sbd_opts(const RadialKernel& kernel, double a, double tol,
                               const SolveOptions& opts) {
    if (!(a > 0.0 && a < 1.0)) throw std::domain_error("solve_sbd: a must lie in (0, 1)");
    if (!(tol > 0.0)) throw std::domain_error("solve_sbd: tol must be positive");
    const int P_max = opts.P_max > 0 ? opts.P_max : default_p_max(a, kernel);

    Workspace ws(kernel, a, opts);
    Eigen::VectorXd alpha;

    const int P_lo = std::min((int)std::ceil(1.0 / a), P_max);
    ws.ensure(P_lo);
    double err_lo = ws.solve_at(P_lo, alpha);

    int lo, hi;            // invariant: err(hi) <= tol < err(lo), lo < hi
    double err_hi;
    if (err_lo <= tol) {
        // Already below tolerance at the bracket's lower end: extend the
        // search down to P = 1 so exactly-representable kernels come back
        // with their true order.
        if (P_lo == 1) return ws.pack(1, alpha, err_lo);
        lo = 0;
        hi = P_lo;
        err_hi = err_lo;
    } else {
        // Grow geometrically toward P_max until the tolerance is met.
        lo = P_lo;
        hi = P_lo;
        err_hi = err_lo;
        double best_err = err_lo;
        int best_P = P_lo;
        while (err_hi > tol) {
            if (hi >= P_max) throw SbdConvergenceError(best_err, best_P);
            lo = hi;
            hi = std::min(P_max, std::max(hi * 2, hi + 8));
            ws.ensure(hi);
            err_hi = ws.solve_at(hi, alpha);
            if (err_hi < best_err) {
                best_err = err_hi;
                best_P = hi;
            }
        }
    }

    // Dichotomy for the smallest P in (lo, hi] with err(P) <= tol.
    while (hi - lo > 1) {
        const int mid = lo + (hi - lo) / 2;
        const double err_mid = ws.solve_at(mid, alpha);
        if (err_mid <= tol) {
            hi = mid;
            err_hi = err_mid;
        } else {
            lo = mid;
        }
    }
    err_hi = ws.solve_at(hi, alpha);
    return ws.pack(hi, alpha, err_hi);
}

double sbd_gram_condition(const SBDecomposition& sbd) {
    const GramMatrix g = assemble_gram(sbd.basis, sbd.a);
    const auto [lo, hi] = symmetric_eigen_range(g.entries);
    if (!(lo > 0.0)) return std::numeric_limits<double>::infinity();
    return hi / lo;
}

MultiDirichletResult enforce_multi_dirichlet(const RadialKernel& kernel, int n) {
    if (n < 0) throw std::domain_error("enforce_multi_dirichlet: n must be nonnegative");
    MultiDirichletResult out;
    if (n == 0) {
        out.kernel = kernel;
        return out;
    }
    const auto& lam = kernel.laplacian_iterates_at_one;
    if ((int)lam.size() < n)
        throw std::invalid_argument("enforce_multi_dirichlet: kernel lacks Laplacian iterates");

    bool all_zero = true;
    for (int t = 0; t < n; ++t) all_zero = all_zero && lam[t] == 0.0;
    if (all_zero) {
        out.kernel = kernel;
        return out;
    }

    // omega' = sqrt of the geometric-mean ratio of successive iterates; the
    // iterates of a J0(w r) component scale by w^2 each.
    double omega_prime = 0.0;
    if (n >= 2) {
        double log_sum = 0.0;
        int used = 0;
        for (int t = 0; t + 1 < n; ++t) {
            if (lam[t] != 0.0 && lam[t + 1] != 0.0) {
                log_sum += std::log(std::fabs(lam[t + 1] / lam[t]));
                ++used;
            }
        }
        if (used > 0) omega_prime = std::sqrt(std::exp(log_sum / used));
    }
    if (omega_prime == 0.0) omega_prime = std::sqrt(std::fabs(lam[0]));
    omega_prime = std::max(omega_prime, 1.0);

    const std::vector<double> omega = j1_roots_near(omega_prime, n);

    Eigen::MatrixXd M(n, n);
    Eigen::VectorXd rhs(n);
    for (int t = 1; t <= n; ++t) {
        rhs(t - 1) = lam[t - 1];
        for (int s = 0; s < n; ++s)
            M(t - 1, s) = std::pow(omega[s] * omega[s], t) * bessel_j0(omega[s]);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
    if (!lu.isInvertible()) throw std::runtime_error("enforce_multi_dirichlet: singular system");
    const Eigen::VectorXd mu = lu.solve(rhs);

    std::vector<double> om(omega), m(mu.data(), mu.data() + n);
    auto base_eval = kernel.eval;
    auto base_deriv = kernel.deriv;
    RadialKernel mod;
    mod.eval = [base_eval, om, m](double r) {
        double v = base_eval(r);
        for (size_t s = 0; s < om.size(); ++s) v -= m[s] * bessel_j0(om[s] * r);
        return v;
    };
    mod.deriv = [base_deriv, om, m](double r) {
        double v = base_deriv(r);
        for (size_t s = 0; s < om.size(); ++s) v += m[s] * om[s] * bessel_j1(om[s] * r);
        return v;
    };
    mod.laplacian_iterates_at_one.assign(lam.size(), 0.0);
    for (int t = n + 1; t <= (int)lam.size(); ++t) {
        double k_it = 0.0;
        for (int s = 0; s < n; ++s) k_it += std::pow(om[s] * om[s], t) * bessel_j0(om[s]) * m[s];
        mod.laplacian_iterates_at_one[t - 1] = lam[t - 1] - k_it;
    }
    mod.singular_at_origin = kernel.singular_at_origin;
    double max_omega = kernel.oscillation_freq;
    for (double w : om) max_omega = std::max(max_omega, w);
    mod.oscillation_freq = max_omega;
    mod.name = kernel.name + "+md" + std::to_string(n);

    out.kernel = std::move(mod);
    out.correction.reserve(n);
    for (int s = 0; s < n; ++s) out.correction.emplace_back(om[s], m[s]);
    return out;
}

} // namespace sbd
