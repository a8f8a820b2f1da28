#include "soundcancel_core.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <random>
#include <stdexcept>

using namespace sbd;

namespace sbdcli {

namespace {
constexpr double kPi = std::numbers::pi;
}

SoundCancelProblem build_problem(const SoundCancelConfig& cfg) {
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> uang(0.5 * kPi, 1.5 * kPi);
    std::vector<Vec2> src(cfg.n_sources);
    for (auto& p : src)
        p = {cfg.source_radius * std::cos(uang(rng)), cfg.source_radius * std::sin(uang(rng))};

    std::uniform_real_distribution<double> uu(-1.0, 1.0);
    std::vector<Vec2> zone;
    zone.reserve(cfg.quad_points);
    while ((int)zone.size() < cfg.quad_points) {
        const double x = uu(rng), y = uu(rng);
        if (x * x + y * y <= 1.0)
            zone.push_back({cfg.zone_center_x + cfg.zone_radius * x,
                            cfg.zone_center_y + cfg.zone_radius * y});
    }

    PointCloud sources = make_cloud(std::move(src));
    PointCloud quad = make_cloud(std::move(zone));

    // The silence zone sits away from the sources; pick delta_min just under
    // the gap so the close-correction matrix is empty.
    double gap = 1e300;
    for (const auto& z : sources.points)
        for (const auto& x : quad.points) gap = std::min(gap, norm2(x - z));
    const double dmax = union_diameter(sources, quad);
    if (!(gap > 0.0)) throw std::invalid_argument("soundcancel: zone overlaps the sources");

    AssembleOptions opts;
    opts.eps = cfg.eps;
    opts.a_override = std::min(0.45, 0.9 * gap / dmax);

    auto op = CompressedOperator::assemble(kernel_helmholtz(cfg.wavenumber), sources, quad, opts);
    SoundCancelProblem prob{std::move(sources), std::move(quad), std::move(op), 0.0, gap};
    prob.delta_min = prob.op.delta_min();
    if (prob.delta_min > gap)
        throw std::invalid_argument("soundcancel: zone too close to the sources");
    return prob;
}

static std::vector<cplx> phase_vector(const std::vector<double>& phases) {
    std::vector<cplx> q(phases.size());
    for (std::size_t l = 0; l < phases.size(); ++l)
        q[l] = {std::cos(phases[l]), std::sin(phases[l])};
    return q;
}

Evaluation evaluate(const SoundCancelProblem& prob, const std::vector<double>& phases) {
    const auto q = phase_vector(phases);
    const auto u = prob.op.apply(q); // A q
    Evaluation ev;
    for (const auto& v : u) ev.objective += std::norm(v);
    const auto back = prob.op.apply_adjoint(u); // A^H A q
    ev.gradient.resize(phases.size());
    for (std::size_t l = 0; l < phases.size(); ++l)
        ev.gradient[l] = 2.0 * std::imag(std::conj(q[l]) * back[l]);
    return ev;
}

double objective_only(const SoundCancelProblem& prob, const std::vector<double>& phases) {
    const auto u = prob.op.apply(phase_vector(phases));
    double obj = 0.0;
    for (const auto& v : u) obj += std::norm(v);
    return obj;
}

OptimizeResult optimize_phases(const SoundCancelProblem& prob, std::vector<double> phases,
                               int eval_budget) {
    OptimizeResult res;
    int evals = 0;
    Evaluation cur = evaluate(prob, phases);
    ++evals;
    res.initial_objective = cur.objective;
    res.trace.push_back({evals, cur.objective});

    double step = 0.5 / std::max(1.0, std::sqrt(cur.objective));
    // Scale-free initial step: relate to the gradient magnitude.
    double gnorm2 = 0.0;
    for (double g : cur.gradient) gnorm2 += g * g;
    if (gnorm2 > 0.0) step = 0.1 * cur.objective / gnorm2;

    std::vector<double> trial(phases.size());
    while (evals < eval_budget) {
        gnorm2 = 0.0;
        for (double g : cur.gradient) gnorm2 += g * g;
        if (gnorm2 == 0.0) break;

        bool accepted = false;
        while (evals < eval_budget) {
            for (std::size_t l = 0; l < phases.size(); ++l)
                trial[l] = phases[l] - step * cur.gradient[l];
            const double ftrial = objective_only(prob, trial);
            ++evals;
            if (ftrial <= cur.objective - 1e-4 * step * gnorm2) {
                phases = trial;
                // One more matvec pair refreshes the gradient at the accepted
                // point.
                if (evals < eval_budget) {
                    cur = evaluate(prob, phases);
                    ++evals;
                    cur.objective = std::min(cur.objective, ftrial);
                } else {
                    cur.objective = ftrial;
                }
                res.trace.push_back({evals, cur.objective});
                step *= 1.4;
                accepted = true;
                break;
            }
            step *= 0.5;
            if (step * std::sqrt(gnorm2) < 1e-14) break;
        }
        if (!accepted) break;
    }

    res.phases = std::move(phases);
    res.final_objective = res.trace.back().second;
    res.evaluations = evals;
    return res;
}

FieldGrid render_field(const SoundCancelConfig& cfg, const PointCloud& sources,
                       const std::vector<double>& phases) {
    FieldGrid grid;
    grid.nx = cfg.grid_nx;
    grid.ny = cfg.grid_ny;
    grid.xmin = -1.0;
    grid.xmax = cfg.zone_center_x + 2.0 * cfg.zone_radius;
    grid.ymin = cfg.zone_center_y - 1.5;
    grid.ymax = cfg.zone_center_y + 1.5;

    std::vector<Vec2> pts;
    pts.reserve((std::size_t)grid.nx * grid.ny);
    for (int j = 0; j < grid.ny; ++j)
        for (int i = 0; i < grid.nx; ++i)
            pts.push_back({grid.xmin + (grid.xmax - grid.xmin) * (i + 0.5) / grid.nx,
                           grid.ymin + (grid.ymax - grid.ymin) * (j + 0.5) / grid.ny});

    AssembleOptions opts;
    opts.eps = cfg.eps;
    const auto op = CompressedOperator::assemble(kernel_helmholtz(cfg.wavenumber), sources,
                                                 make_cloud(std::move(pts)), opts);
    const auto field = op.apply(phase_vector(phases));
    grid.level_db.resize(field.size());
    for (std::size_t i = 0; i < field.size(); ++i)
        grid.level_db[i] = 20.0 * std::log10(std::max(std::abs(field[i]), 1e-300));
    return grid;
}

void write_field(const FieldGrid& grid, const std::string& base_path) {
    {
        std::ofstream os(base_path + ".f64", std::ios::binary);
        if (!os) throw std::runtime_error("write_field: cannot open " + base_path + ".f64");
        os.write(reinterpret_cast<const char*>(grid.level_db.data()),
                 (std::streamsize)(grid.level_db.size() * sizeof(double)));
    }
    std::ofstream js(base_path + ".json");
    if (!js) throw std::runtime_error("write_field: cannot open " + base_path + ".json");
    js << "{\n"
       << "  \"dtype\": \"float64-le\",\n"
       << "  \"layout\": \"row-major (ny rows, nx columns)\",\n"
       << "  \"quantity\": \"sound level [dB]\",\n"
       << "  \"nx\": " << grid.nx << ",\n"
       << "  \"ny\": " << grid.ny << ",\n"
       << "  \"xmin\": " << grid.xmin << ",\n"
       << "  \"xmax\": " << grid.xmax << ",\n"
       << "  \"ymin\": " << grid.ymin << ",\n"
       << "  \"ymax\": " << grid.ymax << "\n"
       << "}\n";
}

} // namespace sbdcli
