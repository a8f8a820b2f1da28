#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <random>

#include "oracles.hpp"
#include "sbd/bessel_roots.hpp"
#include "sbd/conv_operator.hpp"
#include "sbd/ring_quadrature.hpp"

using namespace sbd;

TEST_CASE("choose_parameters formula and guards") {
    const auto p = choose_parameters(1'000'000, 1e-6, 0.0);
    CHECK(p.a == doctest::Approx(5.7689e-4).epsilon(1e-4));
    CHECK(p.P_hint > 0);

    // Monotone decreasing in N at fixed eps, alpha.
    double prev = 1.0;
    for (std::uint64_t n : {100, 1000, 10000, 100000}) {
        const double a = choose_parameters(n, 1e-6, 0.0).a;
        CHECK(a < prev);
        prev = a;
    }
    // alpha = 1/6 gives a larger a (cheaper on-line side).
    CHECK(choose_parameters(10000, 1e-6, 1.0 / 6.0).a > choose_parameters(10000, 1e-6, 0.0).a);
    // Clamped into (0, 0.5].
    CHECK(choose_parameters(20, 1e-3, 0.0).a <= 0.5);
    CHECK_THROWS_AS(choose_parameters(5, 1e-3, 0.0), std::domain_error);
    CHECK_THROWS_AS(choose_parameters(100, 1e-3, 0.4), std::domain_error);
}

TEST_CASE("cloud diameter is exact (brute-force oracle)") {
    std::mt19937_64 rng(71);
    for (int trial = 0; trial < 8; ++trial) {
        const auto pts = trial % 2 ? sbd_test::random_cloud_square(300, rng)
                                   : sbd_test::random_cloud_circle(300, rng);
        double brute = 0.0;
        for (std::size_t i = 0; i < pts.size(); ++i)
            for (std::size_t j = i + 1; j < pts.size(); ++j)
                brute = std::max(brute, norm2(pts[i] - pts[j]));
        CHECK(cloud_diameter(pts) == doctest::Approx(brute).epsilon(1e-14));
    }
    // Degenerate shapes.
    CHECK(cloud_diameter({{1.0, 2.0}}) == 0.0);
    CHECK(cloud_diameter({{0.0, 0.0}, {3.0, 4.0}}) == 5.0);
    CHECK(cloud_diameter({{0.0, 0.0}, {1.0, 1.0}, {2.0, 2.0}}) == doctest::Approx(std::sqrt(8.0)));
}

TEST_CASE("neighbor pairs match the brute-force oracle") {
    std::mt19937_64 rng(73);
    const auto pts = sbd_test::random_cloud_square(1000, rng);
    const auto cloud = make_cloud(pts);
    const double radius = 0.05;
    const auto pairs = neighbor_pairs(cloud, cloud, radius, true);

    std::uint64_t brute = 0;
    for (std::size_t k = 0; k < pts.size(); ++k)
        for (std::size_t l = 0; l < pts.size(); ++l)
            if (k != l && norm2(pts[k] - pts[l]) <= radius) ++brute;
    CHECK(pairs.count() == brute);
    for (std::size_t k = 0; k < pts.size(); ++k)
        for (auto i = pairs.row_offsets[k]; i < pairs.row_offsets[k + 1]; ++i)
            REQUIRE(norm2(pts[k] - pts[pairs.cols[i]]) <= radius);

    // Radius below the minimal pairwise distance: empty.
    const auto none = neighbor_pairs(cloud, cloud, 1e-9, true);
    CHECK(none.count() == 0);
}

TEST_CASE("close-pair count scales linearly with radius on a circle") {
    std::mt19937_64 rng(79);
    const int n = 2000;
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(n, rng));
    // #pairs ~ delta * N^2 / (pi * diameter): doubling the radius should
    // roughly double the count.
    std::vector<double> counts;
    for (double delta : {2.0 / n, 4.0 / n, 8.0 / n, 16.0 / n, 20.0 / n}) {
        counts.push_back((double)neighbor_pairs(cloud, cloud, delta, true).count());
    }
    for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
        const double growth = counts[i + 1] / counts[i];
        const double expected = (i + 1 < 4 ? 2.0 : 1.25);
        CHECK(growth > expected / 2.0);
        CHECK(growth < expected * 2.0);
    }
}

namespace {

void check_apply_contract(const KernelSpec& kernel, const PointCloud& cloud, double eps,
                          int n_rhs, std::mt19937_64& rng) {
    AssembleOptions opts;
    opts.eps = eps;
    const auto op = CompressedOperator::assemble(kernel, cloud, opts);
    const auto oracle_kernel = [&](double r) { return kernel.value(r); };
    for (int t = 0; t < n_rhs; ++t) {
        const auto f = sbd_test::random_coeffs((int)cloud.size(), rng);
        const auto got = op.apply(f);
        const auto want =
            sbd_test::direct_convolution(cloud.points, cloud.points, oracle_kernel, f, true);
        const double err = sbd_test::max_abs_diff(got, want);
        REQUIRE(err <= eps * sbd_test::sum_abs(f));
    }
}

} // namespace

TEST_CASE("apply meets the error contract (laplace, single cloud)") {
    std::mt19937_64 rng(83);
    const auto circle = make_cloud(sbd_test::random_cloud_circle(500, rng));
    check_apply_contract(kernel_laplace(), circle, 1e-3, 3, rng);
    check_apply_contract(kernel_laplace(), circle, 1e-6, 3, rng);
    const auto square = make_cloud(sbd_test::random_cloud_square(500, rng));
    check_apply_contract(kernel_laplace(), square, 1e-6, 3, rng);
}

TEST_CASE("apply meets the error contract (helmholtz regimes)") {
    std::mt19937_64 rng(89);
    // Radius 0.5 circle: diameter 1, so kappa = k.
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(300, rng));
    check_apply_contract(kernel_helmholtz(y0_root_above(7.0)), cloud, 1e-3, 2, rng); // Y0 root
    check_apply_contract(kernel_helmholtz(0.3), cloud, 1e-3, 2, rng);                // Robin
    check_apply_contract(kernel_helmholtz(5.0), cloud, 1e-3, 2, rng);                // rescaled
}

TEST_CASE("unit column check: apply reproduces kernel columns") {
    std::mt19937_64 rng(97);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(400, rng));
    AssembleOptions opts;
    opts.eps = 1e-6;
    const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);
    std::vector<cplx> f(cloud.size(), {0.0, 0.0});
    const int l = 137;
    f[l] = {1.0, 0.0};
    const auto q = op.apply(f);
    for (std::size_t k = 0; k < cloud.size(); ++k) {
        if (k == (std::size_t)l) continue;
        const double g = std::log(norm2(cloud.points[k] - cloud.points[l]));
        REQUIRE(std::abs(q[k] - cplx(g, 0.0)) <= 1e-6);
    }
    // Self-interaction is excluded: the diagonal output is the far field plus
    // the -G_approx(0) correction, i.e. ~0.
    CHECK(std::abs(q[l]) <= 1e-6);
}

TEST_CASE("stored close-correction values equal kernel minus far approximation") {
    std::mt19937_64 rng(101);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(2000, rng));
    AssembleOptions opts;
    opts.eps = 1e-6;
    const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);
    const auto& D = op.close_matrix();
    const auto& q = op.quadrature();
    REQUIRE(D.nnz() > 0);
    std::uint64_t checked = 0;
    for (std::size_t k = 0; k < cloud.size() && checked < 400; k += 7) {
        for (auto i = D.row_offsets[k]; i < D.row_offsets[k + 1] && checked < 400; ++i, ++checked) {
            const auto l = D.cols[i];
            const Vec2 y = cloud.points[k] - cloud.points[l];
            if (k == l) continue;
            const cplx expect = cplx(std::log(norm2(y)), 0.0) - eval_gapprox(q, y);
            REQUIRE(std::abs(D.values[i] - expect) <= 0.25 * 1e-6);
        }
    }
}

TEST_CASE("two distant clouds produce a pure far-field operator") {
    std::mt19937_64 rng(103);
    auto src = sbd_test::random_cloud_square(200, rng, 0.8);
    auto tgt = sbd_test::random_cloud_square(150, rng, 0.8);
    for (auto& p : tgt) p.x += 2.5; // far apart
    const auto source = make_cloud(src), target = make_cloud(tgt);
    AssembleOptions opts;
    opts.eps = 1e-4;
    const auto op = CompressedOperator::assemble(kernel_laplace(), source, target, opts);
    CHECK(op.close_matrix().nnz() == 0);
    CHECK_FALSE(op.single_cloud());
    const auto f = sbd_test::random_coeffs(200, rng);
    const auto got = op.apply(f);
    const auto want = sbd_test::direct_convolution(
        tgt, src, [](double r) { return cplx(std::log(r), 0.0); }, f, false);
    CHECK(sbd_test::max_abs_diff(got, want) <= 1e-4 * sbd_test::sum_abs(f));
}

TEST_CASE("apply is linear and symmetric for the laplace kernel") {
    std::mt19937_64 rng(107);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(350, rng));
    AssembleOptions opts;
    opts.eps = 1e-6;
    const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);

    const auto f = sbd_test::random_coeffs(350, rng);
    const auto g = sbd_test::random_coeffs(350, rng);
    const cplx alpha(0.3, 0.7), beta(-0.5, 0.1);
    std::vector<cplx> combo(350);
    for (int i = 0; i < 350; ++i) combo[i] = alpha * f[i] + beta * g[i];
    const auto qc = op.apply(combo);
    const auto qf = op.apply(f);
    const auto qg = op.apply(g);
    double scale = 1.0;
    for (const auto& v : qc) scale = std::max(scale, std::abs(v));
    for (int i = 0; i < 350; ++i)
        REQUIRE(std::abs(qc[i] - (alpha * qf[i] + beta * qg[i])) <= 1e-12 * scale);

    // <A f, g> == <f, A g> (bilinear pairing, radial kernel).
    cplx lhs(0.0, 0.0), rhs(0.0, 0.0);
    for (int i = 0; i < 350; ++i) {
        lhs += qf[i] * g[i];
        rhs += f[i] * qg[i];
    }
    CHECK(std::abs(lhs - rhs) <= 2e-6 * sbd_test::sum_abs(f) * sbd_test::sum_abs(g));
}

TEST_CASE("adjoint application matches the conjugate-transpose oracle") {
    std::mt19937_64 rng(109);
    auto src = sbd_test::random_cloud_square(220, rng);
    auto tgt = sbd_test::random_cloud_square(260, rng);
    for (auto& p : tgt) p.x += 0.4;
    const auto source = make_cloud(src), target = make_cloud(tgt);
    AssembleOptions opts;
    opts.eps = 1e-5;
    const auto op =
        CompressedOperator::assemble(kernel_helmholtz(3.0), source, target, opts);
    const auto u = sbd_test::random_coeffs(260, rng);
    const auto got = op.apply_adjoint(u);
    // (A^H u)_l = sum_q conj(G(|x_q - z_l|)) u_q
    std::vector<cplx> want(src.size(), {0.0, 0.0});
    const auto spec = kernel_helmholtz(3.0);
    for (std::size_t l = 0; l < src.size(); ++l)
        for (std::size_t q = 0; q < tgt.size(); ++q)
            want[l] += std::conj(spec.value(norm2(tgt[q] - src[l]))) * u[q];
    CHECK(sbd_test::max_abs_diff(got, want) <= 1e-5 * sbd_test::sum_abs(u));
}

TEST_CASE("operator serialization round-trips") {
    std::mt19937_64 rng(113);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(250, rng));
    AssembleOptions opts;
    opts.eps = 1e-4;
    const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);
    const std::string path = "/tmp/sbd_test_operator.bin";
    op.save(path);
    const auto back = CompressedOperator::load(path);
    CHECK(back.eps() == op.eps());
    CHECK(back.delta_min() == op.delta_min());
    CHECK(back.delta_max() == op.delta_max());
    CHECK(back.single_cloud() == op.single_cloud());
    CHECK(back.quadrature().freqs.size() == op.quadrature().freqs.size());
    CHECK(back.close_matrix().nnz() == op.close_matrix().nnz());
    const auto f = sbd_test::random_coeffs(250, rng);
    const auto a = op.apply(f), b = back.apply(f);
    CHECK(sbd_test::max_abs_diff(a, b) == 0.0);
    std::remove(path.c_str());
}

TEST_CASE("assembly input validation") {
    std::mt19937_64 rng(127);
    AssembleOptions opts;
    opts.eps = 1e-3;
    CHECK_THROWS_AS(CompressedOperator::assemble(kernel_laplace(), make_cloud({}), opts),
                    std::invalid_argument);
    CHECK_THROWS_AS(
        CompressedOperator::assemble(kernel_laplace(), make_cloud({{0.5, 0.5}}), opts),
        std::invalid_argument);
    const auto cloud = make_cloud(sbd_test::random_cloud_circle(100, rng));
    const auto op = CompressedOperator::assemble(kernel_laplace(), cloud, opts);
    CHECK_THROWS_AS(op.apply(std::vector<cplx>(7)), std::invalid_argument);
    CHECK(op.bytes() > 0);
}
