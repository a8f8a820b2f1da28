#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <numbers>
#include <random>

#include "cli_common.hpp"
#include "sbd/basis.hpp"
#include "sbd/bessel.hpp"
#include "sbd/bessel_roots.hpp"
#include "sbd/gram.hpp"
#include "sbd/kernels.hpp"
#include "sbd/ring_quadrature.hpp"
#include "sbd/sbd.hpp"
#include "sbd/serialize.hpp"
#include "soundcancel_core.hpp"

using namespace sbd;
using namespace sbdcli;

namespace {

constexpr double kPi = std::numbers::pi;

double get_or(const std::map<std::string, std::string>& kv, const std::string& key, double v) {
    const auto it = kv.find(key);
    return it == kv.end() ? v : std::stod(it->second);
}

std::uint64_t get_or(const std::map<std::string, std::string>& kv, const std::string& key,
                     std::uint64_t v) {
    const auto it = kv.find(key);
    return it == kv.end() ? v : std::stoull(it->second);
}

std::string get_or(const std::map<std::string, std::string>& kv, const std::string& key,
                   const std::string& v) {
    const auto it = kv.find(key);
    return it == kv.end() ? v : it->second;
}

// ---------------------------------------------------------------------------

int cmd_bench(std::vector<std::uint64_t> n_list, double eps, double alpha, std::uint64_t seed,
              const std::string& out, std::uint64_t mem_limit) {
    ensure_directory(out);
    CsvWriter csv(out + "/bench.csv",
                  {"N", "offline_seconds", "online_seconds", "operator_bytes", "dense_ratio",
                   "max_error_vs_direct", "eps", "alpha", "seed"});
    for (std::uint64_t n : n_list) {
        std::mt19937_64 rng(seed ^ n);
        auto xs = make_cloud(uniform_square_cloud((int)n, rng));
        auto ys = make_cloud(uniform_square_cloud((int)n, rng));

        AssembleOptions opts;
        opts.eps = eps;
        opts.alpha = alpha;
        opts.max_grid_bytes = mem_limit;

        const double t0 = now_seconds();
        const auto op = CompressedOperator::assemble(kernel_laplace(), ys, xs, opts);
        const double offline = now_seconds() - t0;

        std::uniform_real_distribution<double> u(-1.0, 1.0);
        std::vector<cplx> f(n);
        for (auto& v : f) v = {u(rng), u(rng)};

        double online = 1e300;
        std::vector<cplx> q;
        for (int rep = 0; rep < 3; ++rep) {
            const double t1 = now_seconds();
            q = op.apply(f);
            online = std::min(online, now_seconds() - t1);
        }

        std::string err_cell;
        if (n <= 20000) {
            double fsum = 0.0;
            for (const auto& v : f) fsum += std::abs(v);
            double worst = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                cplx acc(0.0, 0.0);
                for (std::size_t l = 0; l < n; ++l)
                    acc += std::log(norm2(xs.points[k] - ys.points[l])) * f[l];
                worst = std::max(worst, std::abs(q[k] - acc));
            }
            err_cell = CsvWriter::num(worst / fsum);
        }

        const double dense = 16.0 * (double)n * (double)n;
        csv.row({CsvWriter::num(n), CsvWriter::num(offline), CsvWriter::num(online),
                 CsvWriter::num(op.bytes()), CsvWriter::num((double)op.bytes() / dense), err_cell,
                 CsvWriter::num(eps), CsvWriter::num(alpha), CsvWriter::num(seed)});
        std::printf("N=%llu offline=%.3fs online=%.4fs bytes=%llu ratio=%.3g%s%s\n",
                    (unsigned long long)n, offline, online, (unsigned long long)op.bytes(),
                    (double)op.bytes() / dense, err_cell.empty() ? "" : " err=",
                    err_cell.c_str());
    }
    std::printf("wrote %s/bench.csv\n", out.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

RadialKernel radial_profile(const KernelSpec& spec) {
    switch (spec.kind) {
        case KernelSpec::Kind::Laplace:
            return laplace_kernel();
        case KernelSpec::Kind::Helmholtz: {
            const double k = spec.k;
            RadialKernel r;
            r.eval = [k](double x) { return 0.25 * bessel_y0(k * x); };
            r.deriv = [k](double x) { return -0.25 * k * bessel_y1(k * x); };
            r.singular_at_origin = true;
            r.oscillation_freq = k;
            r.name = "helmholtz-y0";
            return r;
        }
        case KernelSpec::Kind::User:
            return spec.user;
    }
    throw std::logic_error("radial_profile: bad kind");
}

int cmd_sbd_error(const std::string& kernel_name, double a, std::vector<int> p_list,
                  const std::string& out) {
    ensure_directory(out);
    const auto profile = radial_profile(parse_kernel(kernel_name));
    CsvWriter csv(out + "/sbd_error.csv", {"gamma", "P", "a", "linf_error"});
    std::vector<double> gs, ls;
    double floor_err = 1e300;
    for (int P : p_list) {
        const auto fit = fit_sbd(profile, a, P);
        csv.row({CsvWriter::num(fit.gamma()), CsvWriter::num(P), CsvWriter::num(a),
                 CsvWriter::num(fit.achieved_error)});
        floor_err = std::min(floor_err, fit.achieved_error);
        gs.push_back(fit.gamma());
        ls.push_back(std::log(fit.achieved_error));
    }
    // Fitted exponential rate on the pre-floor section.
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    int used = 0;
    for (std::size_t i = 0; i < gs.size(); ++i) {
        if (std::exp(ls[i]) <= 100.0 * floor_err) continue;
        sx += gs[i];
        sy += ls[i];
        sxx += gs[i] * gs[i];
        sxy += gs[i] * ls[i];
        ++used;
    }
    if (used >= 2) {
        const double slope = (used * sxy - sx * sy) / (used * sxx - sx * sx);
        std::printf("fitted decay rate: %.3f (error ~ exp(-%.3f gamma)); floor %.3g\n", -slope,
                    -slope, floor_err);
    }
    std::printf("wrote %s/sbd_error.csv\n", out.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_conditioning(std::vector<int> p_list, double gamma_min, double gamma_max, int gamma_steps,
                     const std::string& out) {
    ensure_directory(out);
    CsvWriter csv(out + "/conditioning.csv",
                  {"gamma", "P", "lambda_min", "lambda_max", "theorem_bound", "conjecture_bound"});
    for (int P : p_list) {
        const auto basis = make_dirichlet_basis(P);
        for (int i = 0; i < gamma_steps; ++i) {
            const double g = gamma_min + (gamma_max - gamma_min) * i / std::max(1, gamma_steps - 1);
            const double a = g / P;
            if (!(a > 0.0 && a < 1.0)) continue;
            const auto [lo, hi] = symmetric_eigen_range(assemble_gram(basis, a).entries);
            const auto b = lambda_min_bound(g, P);
            csv.row({CsvWriter::num(g), CsvWriter::num(P), CsvWriter::num(lo), CsvWriter::num(hi),
                     CsvWriter::num(b.theorem_bound), CsvWriter::num(b.conjecture_bound)});
        }
    }
    std::printf("wrote %s/conditioning.csv\n", out.c_str());
    return 0;
}

// ---------------------------------------------------------------------------

int cmd_cp_conjecture(int count, const std::string& out) {
    ensure_directory(out);
    CsvWriter csv(out + "/cp_conjecture.csv", {"p", "C_p", "v_p", "w_p"});
    const auto basis = make_dirichlet_basis(count);
    bool all_positive = true;
    for (int p = 1; p <= count; ++p) {
        const double c = basis.norm_constants[p - 1];
        const double vp = std::sqrt(2.0 * kPi * p) * c - 1.0;
        const double wp = 1.0 - std::sqrt(2.0 * kPi * (p - 0.25)) * c;
        all_positive = all_positive && vp > 0.0 && wp > 0.0;
        csv.row({CsvWriter::num(p), CsvWriter::num(c), CsvWriter::num(vp), CsvWriter::num(wp)});
    }
    std::printf("wrote %s/cp_conjecture.csv (both gap sequences positive: %s)\n", out.c_str(),
                all_positive ? "yes" : "NO");
    return all_positive ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_quad_check(int count, std::uint64_t seed, const std::string& out) {
    ensure_directory(out);
    CsvWriter csv(out + "/quad_check.csv",
                  {"r", "tol", "M", "measured_error", "tol_ok", "envelope", "envelope_ok"});
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> ur(0.1, 200.0);
    std::uniform_real_distribution<double> ut(-12.0, -2.0);
    bool all_ok = true;
    for (int i = 0; i < count; ++i) {
        const double r = ur(rng);
        const double tol = std::pow(10.0, ut(rng));
        const int M = ring_size(r, tol);
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
        const double envelope =
            kRingQuadratureKSafe * std::exp(M * std::log(std::numbers::e * r / (2.0 * M)));
        const bool tol_ok = worst <= tol;
        const bool env_ok = worst <= std::max(envelope, 1e-13);
        all_ok = all_ok && tol_ok && env_ok;
        csv.row({CsvWriter::num(r), CsvWriter::num(tol), CsvWriter::num(M), CsvWriter::num(worst),
                 tol_ok ? "1" : "0", CsvWriter::num(envelope), env_ok ? "1" : "0"});
    }
    std::printf("wrote %s/quad_check.csv (all within bounds: %s)\n", out.c_str(),
                all_ok ? "yes" : "NO");
    return all_ok ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_soundcancel(SoundCancelConfig cfg, const std::string& out) {
    ensure_directory(out);
    std::printf("assembling source->zone operator (N=%d, Q=%d, k=%.3g, eps=%.1e)...\n",
                cfg.n_sources, cfg.quad_points, cfg.wavenumber, cfg.eps);
    const auto prob = build_problem(cfg);
    std::printf("close pairs: %llu (zone gap %.3g, delta_min %.3g)\n",
                (unsigned long long)prob.op.close_matrix().nnz(), prob.zone_gap, prob.delta_min);

    std::mt19937_64 rng(cfg.seed + 1);
    std::uniform_real_distribution<double> uph(0.0, 2.0 * kPi);
    std::vector<double> phases(cfg.n_sources);
    for (auto& p : phases) p = uph(rng);

    const auto before = render_field(cfg, prob.sources, phases);
    write_field(before, out + "/field_before");

    const auto res = optimize_phases(prob, phases, cfg.eval_budget);

    CsvWriter trace(out + "/objective_trace.csv", {"evaluation", "objective"});
    for (const auto& [ev, obj] : res.trace) trace.row({CsvWriter::num(ev), CsvWriter::num(obj)});
    CsvWriter pcsv(out + "/phases.csv", {"source", "x", "y", "phase"});
    for (int l = 0; l < cfg.n_sources; ++l)
        pcsv.row({CsvWriter::num(l), CsvWriter::num(prob.sources.points[l].x),
                  CsvWriter::num(prob.sources.points[l].y), CsvWriter::num(res.phases[l])});

    const auto after = render_field(cfg, prob.sources, res.phases);
    write_field(after, out + "/field_after");

    const double db = 10.0 * std::log10(res.initial_objective / res.final_objective);
    std::printf("objective: %.6g -> %.6g after %d evaluations (%.2f dB reduction in the zone)\n",
                res.initial_objective, res.final_objective, res.evaluations, db);
    std::printf("wrote %s/{objective_trace.csv, phases.csv, field_before.*, field_after.*}\n",
                out.c_str());
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"sbdconv: fast 2D radial-kernel discrete convolutions"};
    app.require_subcommand(1);

    std::string out = "out";
    std::string config_path;
    double eps = 1e-6;
    double alpha = 0.0;
    std::uint64_t seed = 1;
    std::string kernel_name = "laplace";
    app.add_option("--out", out, "output directory");
    app.add_option("--config", config_path, "key=value file overriding flags");
    app.add_option("--eps", eps, "target accuracy");
    app.add_option("--alpha", alpha, "parameter-selection exponent in [0, 1/6]");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--kernel", kernel_name, "laplace | helmholtz:<k>");

    auto* bench = app.add_subcommand("bench", "two-cloud benchmark: timings, memory, error");
    std::vector<std::uint64_t> n_list = {1000, 10000};
    std::uint64_t mem_limit = std::uint64_t(4) << 30;
    bench->add_option("--n", n_list, "cloud sizes");
    bench->add_option("--mem-limit", mem_limit, "NUFFT grid memory limit in bytes");

    auto* sbderr = app.add_subcommand("sbd-error", "decomposition error vs gamma");
    double a = 0.05;
    std::vector<int> p_list = {30, 40, 50, 60, 70, 80, 90, 100, 110, 120, 130, 140};
    sbderr->add_option("--a", a, "inner annulus radius");
    sbderr->add_option("--p", p_list, "orders to fit");

    auto* cond = app.add_subcommand("conditioning", "minimal eigenvalue vs gamma with bounds");
    std::vector<int> cond_p = {10, 50, 150};
    double gamma_min = 0.1, gamma_max = 6.0;
    int gamma_steps = 30;
    cond->add_option("--p", cond_p, "basis orders");
    cond->add_option("--gamma-min", gamma_min);
    cond->add_option("--gamma-max", gamma_max);
    cond->add_option("--gamma-steps", gamma_steps);

    auto* cp = app.add_subcommand("cp-conjecture", "normalization-constant bounds sweep");
    int cp_count = 1000;
    cp->add_option("--n-terms", cp_count, "number of terms");

    auto* quad = app.add_subcommand("quad-check", "circular quadrature bound verification");
    int quad_count = 1000;
    quad->add_option("--count", quad_count, "number of (r, tol) samples");

    auto* sc = app.add_subcommand("soundcancel", "phase optimization demo");
    SoundCancelConfig scfg;
    sc->add_option("--sources", scfg.n_sources, "number of sources");
    sc->add_option("--k", scfg.wavenumber, "wavenumber");
    sc->add_option("--zone-x", scfg.zone_center_x);
    sc->add_option("--zone-y", scfg.zone_center_y);
    sc->add_option("--zone-radius", scfg.zone_radius);
    sc->add_option("--quad-points", scfg.quad_points, "silence-zone quadrature size");
    sc->add_option("--evals", scfg.eval_budget, "objective evaluation budget");
    sc->add_option("--grid-nx", scfg.grid_nx);
    sc->add_option("--grid-ny", scfg.grid_ny);

    CLI11_PARSE(app, argc, argv);

    try {
        if (!config_path.empty()) {
            const auto kv = read_config(config_path);
            eps = get_or(kv, "eps", eps);
            alpha = get_or(kv, "alpha", alpha);
            seed = get_or(kv, "seed", seed);
            out = get_or(kv, "out", out);
            kernel_name = get_or(kv, "kernel", kernel_name);
            a = get_or(kv, "a", a);
            mem_limit = get_or(kv, "mem-limit", mem_limit);
            scfg.n_sources = (int)get_or(kv, "sources", (std::uint64_t)scfg.n_sources);
            scfg.wavenumber = get_or(kv, "k", scfg.wavenumber);
            scfg.zone_center_x = get_or(kv, "zone-x", scfg.zone_center_x);
            scfg.zone_center_y = get_or(kv, "zone-y", scfg.zone_center_y);
            scfg.zone_radius = get_or(kv, "zone-radius", scfg.zone_radius);
            scfg.quad_points = (int)get_or(kv, "quad-points", (std::uint64_t)scfg.quad_points);
            scfg.eval_budget = (int)get_or(kv, "evals", (std::uint64_t)scfg.eval_budget);
            scfg.grid_nx = (int)get_or(kv, "grid-nx", (std::uint64_t)scfg.grid_nx);
            scfg.grid_ny = (int)get_or(kv, "grid-ny", (std::uint64_t)scfg.grid_ny);
        }
        scfg.eps = eps;
        scfg.seed = seed;

        if (bench->parsed()) return cmd_bench(n_list, eps, alpha, seed, out, mem_limit);
        if (sbderr->parsed()) return cmd_sbd_error(kernel_name, a, p_list, out);
        if (cond->parsed()) return cmd_conditioning(cond_p, gamma_min, gamma_max, gamma_steps, out);
        if (cp->parsed()) return cmd_cp_conjecture(cp_count, out);
        if (quad->parsed()) return cmd_quad_check(quad_count, seed, out);
        if (sc->parsed()) return cmd_soundcancel(scfg, out);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}
