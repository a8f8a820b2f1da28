// Acceptance suite: one self-contained check per numbered criterion, each
// printing a PASS/FAIL line with its measured quantities. Exit code is the
// number of failed criteria. Run a single criterion with --criterion <n>.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "oracles.hpp"
#include "sbd/basis.hpp"
#include "sbd/bessel.hpp"
#include "sbd/bessel_roots.hpp"
#include "sbd/conv_operator.hpp"
#include "sbd/gram.hpp"
#include "sbd/kernels.hpp"
#include "sbd/ring_quadrature.hpp"
#include "sbd/sbd.hpp"
#include "soundcancel_core.hpp"

using namespace sbd;

namespace {

constexpr double kPi = std::numbers::pi;

double wall() {
    return std::chrono::duration<double>(std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

struct Line {
    bool ok = true;
    std::string detail;

    Line& also(bool cond, const std::string& msg) {
        ok = ok && cond;
        if (!detail.empty()) detail += "; ";
        detail += (cond ? "" : "FAILED: ") + msg;
        return *this;
    }
};

double fit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = (double)x.size();
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

char buf[512];

// --------------------------------------------------------------------------
// 1. End-to-end accuracy: N = 5000 on a circle and in a square, Laplace,
//    eps in {1e-3, 1e-6}, 10 random f; <= 60 s per case.
Line criterion1() {
    Line line;
    std::mt19937_64 rng(20260809);
    const int n = 5000;
    for (int shape = 0; shape < 2; ++shape) {
        const auto cloud = make_cloud(shape == 0 ? sbd_test::random_cloud_circle(n, rng)
                                                 : sbd_test::random_cloud_square(n, rng));
        for (double eps : {1e-3, 1e-6}) {
            const double t0 = wall();
            AssembleOptions opts;
            opts.eps = eps;
            const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);

            // Dense oracle, tiled: accumulate all 10 right-hand sides at once.
            std::vector<std::vector<cplx>> fs;
            for (int t = 0; t < 10; ++t) fs.push_back(sbd_test::random_coeffs(n, rng));
            std::vector<std::vector<cplx>> want(10, std::vector<cplx>(n, {0.0, 0.0}));
            for (int k = 0; k < n; ++k) {
                for (int l = 0; l < n; ++l) {
                    if (k == l) continue;
                    const double g = std::log(norm2(cloud.points[k] - cloud.points[l]));
                    for (int t = 0; t < 10; ++t) want[t][k] += g * fs[t][l];
                }
            }
            double worst_ratio = 0.0;
            for (int t = 0; t < 10; ++t) {
                const auto got = op.apply(fs[t]);
                worst_ratio = std::max(worst_ratio, sbd_test::max_abs_diff(got, want[t]) /
                                                        sbd_test::sum_abs(fs[t]));
            }
            const double elapsed = wall() - t0;
            std::snprintf(buf, sizeof(buf), "%s eps=%.0e: max err/sum|f| = %.2e, %.1f s",
                          shape == 0 ? "circle" : "square", eps, worst_ratio, elapsed);
            line.also(worst_ratio <= eps, buf);
            std::snprintf(buf, sizeof(buf), "runtime %.1f s <= 60 s", elapsed);
            line.also(elapsed <= 60.0, buf);
        }
    }
    return line;
}

// --------------------------------------------------------------------------
// 2. SBD exponential decay: a = 0.05, gamma in [1.5, 7]; slope in [3.0, 4.5]
//    before flooring; floor <= 1e-8 reached by gamma <= 7.
Line criterion2() {
    Line line;
    const double a = 0.05;
    std::vector<double> gammas, errs;
    for (int P = 30; P <= 140; P += 10) {
        const auto fit = fit_sbd(laplace_kernel(), a, P);
        gammas.push_back(fit.gamma());
        errs.push_back(fit.achieved_error);
    }
    const double floor_err = *std::min_element(errs.begin(), errs.end());
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < gammas.size(); ++i)
        if (errs[i] > 100.0 * floor_err) {
            xs.push_back(gammas[i]);
            ys.push_back(std::log(errs[i]));
        }
    const double rate = -fit_slope(xs, ys);
    std::snprintf(buf, sizeof(buf), "fitted rate %.3f in [3.0, 4.5] over %zu points", rate,
                  xs.size());
    line.also(rate >= 3.0 && rate <= 4.5, buf);
    std::snprintf(buf, sizeof(buf), "floor %.2e <= 1e-8 by gamma <= 7", floor_err);
    line.also(floor_err <= 1e-8, buf);
    return line;
}

// --------------------------------------------------------------------------
// 3. Conditioning at working tolerance: gamma in [1.4, 2.4] and
//    cond(A) in [100, 400].
Line criterion3() {
    Line line;
    const auto sbd = solve_sbd(laplace_kernel(), 0.05, 1e-3);
    std::snprintf(buf, sizeof(buf), "gamma = %.2f in [1.4, 2.4] (err %.2e)", sbd.gamma(),
                  sbd.achieved_error);
    line.also(sbd.gamma() >= 1.4 && sbd.gamma() <= 2.4, buf);
    const double cond = sbd_gram_condition(sbd);
    std::snprintf(buf, sizeof(buf),
                  "cond(A) = %.1f in [100, 400] (note: the quadrature-verified Gram at this "
                  "working point measures ~27-85 in either basis normalization; the interval "
                  "matches 1/(180 e^{-5.8 gamma}) ~ 188 at gamma 1.8, a lower-bound formula "
                  "rather than a measured ratio)",
                  cond);
    line.also(cond >= 100.0 && cond <= 400.0, buf);
    return line;
}

// --------------------------------------------------------------------------
// 4. Eigenvalue sandwich for 20 gamma values in (0, 1.4), P in {50, 500};
//    F's first root at 1.471 +- 0.01.
Line criterion4() {
    Line line;
    for (int P : {50, 500}) {
        const auto basis = make_dirichlet_basis(P);
        double worst_violation = 0.0;
        double worst_gamma = 0.0;
        bool upper_ok = true;
        for (int i = 1; i <= 20; ++i) {
            const double g = 1.4 * i / 20.0 - 0.035; // even grid over (0, 1.4)
            const auto [lo, hi] = symmetric_eigen_range(assemble_gram(basis, g / P).entries);
            const double bound = lambda_min_bound(g, P).theorem_bound;
            if (bound - lo > worst_violation) {
                worst_violation = bound - lo;
                worst_gamma = g;
            }
            upper_ok = upper_ok && hi <= 1.0 + 1e-12;
        }
        std::snprintf(buf, sizeof(buf),
                      "P=%d: lower bound exceeds lambda_min by up to %.1e (at gamma %.2f; the "
                      "bound's sum-to-integral step is approximate below gamma ~ 0.7)",
                      P, worst_violation, worst_gamma);
        line.also(worst_violation <= 0.0, buf);
        std::snprintf(buf, sizeof(buf), "P=%d: lambda_max <= 1 + 1e-12", P);
        line.also(upper_ok, buf);
    }
    const double root = conditioning_F_root();
    std::snprintf(buf, sizeof(buf), "first root of F at %.4f (1.471 +- 0.01)", root);
    line.also(std::fabs(root - 1.471) <= 0.01, buf);
    return line;
}

// --------------------------------------------------------------------------
// 5. Conjectured eigenvalue floor for P in {10, 50, 150}, gamma in [1.4, 6].
Line criterion5() {
    Line line;
    for (int P : {10, 50, 150}) {
        const auto basis = make_dirichlet_basis(P);
        bool ok = true;
        double min_margin = 1e300;
        for (double g = 1.4; g <= 6.0 + 1e-9; g += 0.2) {
            const double floor = 180.0 * std::exp(-5.8 * g);
            if (floor < 1e-13) break; // numerical floor
            const double a = g / P;
            if (!(a < 1.0)) continue; // gamma unreachable at small P
            const auto [lo, hi] = symmetric_eigen_range(assemble_gram(basis, a).entries);
            ok = ok && lo >= floor;
            min_margin = std::min(min_margin, lo / floor);
        }
        std::snprintf(buf, sizeof(buf), "P=%d: lambda_min >= 180 e^{-5.8 gamma} (min ratio %.2f)",
                      P, min_margin);
        line.also(ok, buf);
    }
    return line;
}

// --------------------------------------------------------------------------
// 6. Normalization-constant bounds for p = 1..1000.
Line criterion6() {
    Line line;
    const auto basis = make_dirichlet_basis(1000);
    double min_v = 1e300, min_w = 1e300;
    for (int p = 1; p <= 1000; ++p) {
        const double c = basis.norm_constants[p - 1];
        min_v = std::min(min_v, std::sqrt(2.0 * kPi * p) * c - 1.0);
        min_w = std::min(min_w, 1.0 - std::sqrt(2.0 * kPi * (p - 0.25)) * c);
    }
    std::snprintf(buf, sizeof(buf), "min v_p = %.2e > 0, min w_p = %.2e > 0 for p <= 1000", min_v,
                  min_w);
    line.also(min_v > 0.0 && min_w > 0.0, buf);
    return line;
}

// --------------------------------------------------------------------------
// 7. Circular quadrature bound: 1000 random (r, M >= ring_size(r, tol)) meet
//    tol; raw error <= K_safe (er/2M)^M for r <= 200 (above the roundoff
//    floor).
Line criterion7() {
    Line line;
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ur(0.05, 200.0);
    std::uniform_real_distribution<double> ut(-12.0, -2.0);
    std::uniform_int_distribution<int> extra(0, 8);

    const auto max_err = [](double r, int M) {
        double worst = 0.0;
        for (int it = 0; it <= 128; ++it) {
            const double t = it / 128.0;
            for (int ib = 0; ib < 8; ++ib) {
                const double beta = (2.0 * kPi / M) * ib / 8.0;
                cplx acc(0.0, 0.0);
                for (int m = 0; m < M; ++m) {
                    const double phase = r * t * std::cos(2.0 * kPi * m / M - beta);
                    acc += cplx(std::cos(phase), std::sin(phase));
                }
                worst = std::max(worst, std::abs(acc / (double)M - cplx(bessel_j0(r * t), 0.0)));
            }
        }
        return worst;
    };

    int tol_fail = 0, env_fail = 0, env_checked = 0;
    for (int i = 0; i < 1000; ++i) {
        const double r = ur(rng);
        const double tol = std::pow(10.0, ut(rng));
        const int M = ring_size(r, tol) + 2 * extra(rng);
        const double err = max_err(r, M);
        if (err > tol) ++tol_fail;
        const double envelope =
            kRingQuadratureKSafe * std::exp(M * std::log(std::numbers::e * r / (2.0 * M)));
        if (envelope >= 1e-13) {
            ++env_checked;
            if (err > envelope) ++env_fail;
        }
    }
    std::snprintf(buf, sizeof(buf), "0 of 1000 samples exceed tol (got %d)", tol_fail);
    line.also(tol_fail == 0, buf);
    std::snprintf(buf, sizeof(buf), "0 of %d samples exceed K_safe (er/2M)^M (got %d)",
                  env_checked, env_fail);
    line.also(env_fail == 0, buf);
    return line;
}

// --------------------------------------------------------------------------
// 8. NUFFT oracle equivalence: 100 instances per N in {64, 512, 4096},
//    tol in {1e-4, 1e-8, 1e-12}.
Line criterion8() {
    Line line;
    std::mt19937_64 rng(88);
    std::uniform_real_distribution<double> up(-1.0, 1.0), uf(-60.0, 60.0), uc(-1.0, 1.0);
    for (int n : {64, 512, 4096}) {
        double worst[3] = {0.0, 0.0, 0.0};
        const double tols[3] = {1e-4, 1e-8, 1e-12};
        for (int inst = 0; inst < 100; ++inst) {
            std::vector<Vec2> pts(n), frq(n);
            std::vector<cplx> c(n);
            for (auto& p : pts) p = {up(rng), up(rng)};
            for (auto& f : frq) f = {uf(rng), uf(rng)};
            for (auto& v : c) v = {uc(rng), uc(rng)};
            const auto sign = inst % 2 ? NufftSign::Plus : NufftSign::Minus;
            const auto want = ndft_direct(pts, frq, c, sign);
            const double csum = sbd_test::sum_abs(c);
            for (int t = 0; t < 3; ++t) {
                NufftOptions o;
                o.tol = tols[t];
                o.mode = NufftOptions::Mode::Fast;
                NufftPlan plan(pts, frq, sign, o);
                const auto got = plan.apply(c);
                worst[t] = std::max(worst[t], sbd_test::max_abs_diff(got, want) / (tols[t] * csum));
            }
        }
        for (int t = 0; t < 3; ++t) {
            std::snprintf(buf, sizeof(buf), "N=%d tol=%.0e: worst err / (tol sum|c|) = %.3f", n,
                          tols[t], worst[t]);
            line.also(worst[t] <= 1.0, buf);
        }
    }
    return line;
}

// --------------------------------------------------------------------------
// 9. Compression ratios at N in {1e3, 1e4, 1e5} (alpha = 0) and on-line
//    growth factor <= 2.8 per doubling for N in [1e5, 1e6] (alpha = 1/6).
Line criterion9() {
    Line line;
    const double eps = 1e-3;
    std::mt19937_64 rng(99);

    const double limits[3] = {0.20, 0.02, 0.01};
    const std::uint64_t sizes[3] = {1000, 10000, 100000};
    for (int i = 0; i < 3; ++i) {
        const int n = (int)sizes[i];
        auto xs = make_cloud(sbd_test::random_cloud_square(n, rng));
        auto ys = make_cloud(sbd_test::random_cloud_square(n, rng));
        AssembleOptions opts;
        opts.eps = eps;
        opts.alpha = 0.0;
        const auto op = CompressedOperator::assemble(kernel_laplace(), ys, xs, opts);
        const double ratio = (double)op.bytes() / (16.0 * (double)n * (double)n);
        std::snprintf(buf, sizeof(buf), "N=%d: bytes ratio %.4f%% <= %.0f%%", n, 100.0 * ratio,
                      100.0 * limits[i]);
        line.also(ratio <= limits[i], buf);
    }

    // On-line scaling at alpha = 1/6.
    std::vector<double> times;
    for (std::uint64_t n : {125000ull, 250000ull, 500000ull, 1000000ull}) {
        auto xs = make_cloud(sbd_test::random_cloud_square((int)n, rng));
        auto ys = make_cloud(sbd_test::random_cloud_square((int)n, rng));
        AssembleOptions opts;
        opts.eps = eps;
        opts.alpha = 1.0 / 6.0;
        const auto op = CompressedOperator::assemble(kernel_laplace(), ys, xs, opts);
        std::vector<cplx> f = sbd_test::random_coeffs((int)n, rng);
        double best = 1e300;
        for (int rep = 0; rep < 3; ++rep) {
            const double t0 = wall();
            auto q = op.apply(f);
            best = std::min(best, wall() - t0);
        }
        times.push_back(best);
        std::printf("  [criterion 9] N=%llu online %.3f s (bytes %.1f MB)\n",
                    (unsigned long long)n, best, op.bytes() / 1048576.0);
        std::fflush(stdout);
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
        const double growth = times[i + 1] / times[i];
        std::snprintf(buf, sizeof(buf), "online growth per doubling %.2f <= 2.8", growth);
        line.also(growth <= 2.8, buf);
    }
    return line;
}

// --------------------------------------------------------------------------
// 10. Helmholtz: monotone error decay for k at the Y0 root near 7.086 with
//     P = 10..40, a = 0.05; Robin pipeline passes the end-to-end contract at
//     eps = 1e-3 on N = 2000.
Line criterion10() {
    Line line;
    const double kroot = y0_root_above(7.0);
    RadialKernel y0k;
    y0k.eval = [kroot](double r) { return 0.25 * bessel_y0(kroot * r); };
    y0k.deriv = [kroot](double r) { return -0.25 * kroot * bessel_y1(kroot * r); };
    y0k.oscillation_freq = kroot;
    y0k.name = "y0-root";
    double prev = 1e300;
    bool monotone = true;
    std::string curve;
    for (int P = 10; P <= 40; P += 5) {
        const double err = fit_sbd(y0k, 0.05, P).achieved_error;
        monotone = monotone && err <= prev;
        prev = err;
        char cell[32];
        std::snprintf(cell, sizeof(cell), "%.1e", err);
        curve += (curve.empty() ? "" : " > ") + std::string(cell);
    }
    std::snprintf(buf, sizeof(buf), "Y0-root fit error decreases monotonically P=10..40 (%s)",
                  curve.c_str());
    line.also(monotone, buf);

    std::mt19937_64 rng(1010);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(2000, rng)); // diameter 1
    const double k_small = 0.3;
    AssembleOptions opts;
    opts.eps = 1e-3;
    const auto op = CompressedOperator::assemble(kernel_helmholtz(k_small), cloud, opts);
    const auto plan = helmholtz_plan(k_small * op.delta_max());
    line.also(std::holds_alternative<RobinRegime>(plan.regime),
              "k=0.3 resolves to the Robin regime");
    const auto spec = kernel_helmholtz(k_small);
    double worst = 0.0;
    for (int t = 0; t < 5; ++t) {
        const auto f = sbd_test::random_coeffs(2000, rng);
        const auto got = op.apply(f);
        const auto want = sbd_test::direct_convolution(
            cloud.points, cloud.points, [&](double r) { return spec.value(r); }, f, true);
        worst = std::max(worst, sbd_test::max_abs_diff(got, want) / sbd_test::sum_abs(f));
    }
    std::snprintf(buf, sizeof(buf), "Robin pipeline end-to-end err/sum|f| = %.2e <= 1e-3", worst);
    line.also(worst <= 1e-3, buf);
    return line;
}

// --------------------------------------------------------------------------
// 11. Sound canceling: gradient matches finite differences to 1e-6 relative;
//     non-increasing trace; 500-evaluation run within 5 minutes and a
//     strictly positive dB reduction.
Line criterion11() {
    Line line;
    sbdcli::SoundCancelConfig cfg; // the desk-scale defaults: N=100, k=90, Q=1e4
    const double t0 = wall();
    const auto prob = sbdcli::build_problem(cfg);
    line.also(prob.op.close_matrix().nnz() == 0, "zone far from sources: D empty");

    std::mt19937_64 rng(111);
    std::uniform_real_distribution<double> uph(0.0, 2.0 * kPi);
    std::uniform_int_distribution<int> upick(0, cfg.n_sources - 1);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 10; ++trial) {
        std::vector<double> phases(cfg.n_sources);
        for (auto& p : phases) p = uph(rng);
        const auto ev = sbdcli::evaluate(prob, phases);
        for (int probe = 0; probe < 3; ++probe) {
            const int l = upick(rng);
            const double h = 1e-5;
            auto plus = phases, minus = phases;
            plus[l] += h;
            minus[l] -= h;
            const double fd =
                (sbdcli::objective_only(prob, plus) - sbdcli::objective_only(prob, minus)) /
                (2.0 * h);
            const double scale = std::max({std::fabs(fd), std::fabs(ev.gradient[l]), 1e-8});
            worst_rel = std::max(worst_rel, std::fabs(fd - ev.gradient[l]) / scale);
        }
    }
    std::snprintf(buf, sizeof(buf), "gradient vs central differences: worst rel dev %.2e <= 1e-6",
                  worst_rel);
    line.also(worst_rel <= 1e-6, buf);

    std::vector<double> phases(cfg.n_sources);
    for (auto& p : phases) p = uph(rng);
    const auto res = sbdcli::optimize_phases(prob, phases, cfg.eval_budget);
    bool monotone = true;
    for (std::size_t i = 0; i + 1 < res.trace.size(); ++i)
        monotone = monotone && res.trace[i + 1].second <= res.trace[i].second + 1e-12;
    line.also(monotone, "accepted-objective trace is non-increasing");
    const double db = 10.0 * std::log10(res.initial_objective / res.final_objective);
    const double elapsed = wall() - t0;
    std::snprintf(buf, sizeof(buf), "%.2f dB reduction > 0 after %d evaluations", db,
                  res.evaluations);
    line.also(db > 0.0, buf);
    std::snprintf(buf, sizeof(buf), "total %.0f s <= 300 s", elapsed);
    line.also(elapsed <= 300.0, buf);
    return line;
}

// --------------------------------------------------------------------------
// 12. Multi-Dirichlet enforcement: log r + sin(250 r) at gamma = 4, error
//     improves by >= 10x from n = 0 to n = 3.
Line criterion12() {
    Line line;
    RadialKernel k;
    k.eval = [](double r) { return std::log(r) + std::sin(250.0 * r); };
    k.deriv = [](double r) { return 1.0 / r + 250.0 * std::cos(250.0 * r); };
    k.laplacian_iterates_at_one = sbd_test::log_sin_iterates(250.0, 4);
    k.oscillation_freq = 250.0;
    k.name = "log+sin250";

    const int P = 100;
    const double a = 0.04; // gamma = 4
    std::vector<double> errs;
    for (int n = 0; n <= 3; ++n) {
        const auto fixed = enforce_multi_dirichlet(k, n);
        errs.push_back(fit_sbd(fixed.kernel, a, P).achieved_error);
    }
    std::snprintf(buf, sizeof(buf), "errors n=0..3: %.2e, %.2e, %.2e, %.2e (ratio %.0fx)", errs[0],
                  errs[1], errs[2], errs[3], errs[0] / errs[3]);
    line.also(errs[0] / errs[3] >= 10.0, buf);
    return line;
}

using CriterionFn = Line (*)();

} // namespace

int main(int argc, char** argv) {
    const CriterionFn fns[12] = {criterion1, criterion2, criterion3,  criterion4,
                                 criterion5, criterion6, criterion7,  criterion8,
                                 criterion9, criterion10, criterion11, criterion12};
    int only = 0;
    for (int i = 1; i + 1 < argc; ++i)
        if (std::strcmp(argv[i], "--criterion") == 0) only = std::atoi(argv[i + 1]);

    int failed = 0;
    for (int c = 1; c <= 12; ++c) {
        if (only != 0 && c != only) continue;
        const Line line = fns[c - 1]();
        std::printf("criterion %2d [%s] %s\n", c, line.ok ? "PASS" : "FAIL", line.detail.c_str());
        std::fflush(stdout);
        if (!line.ok) ++failed;
    }
    return failed;
}
