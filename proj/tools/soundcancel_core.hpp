#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "sbd/conv_operator.hpp"

namespace sbdcli {

struct SoundCancelConfig {
    int n_sources = 100;
    double wavenumber = 90.0;
    double source_radius = 0.5;   // sources sit on the left half of this circle
    double zone_center_x = 2.0;
    double zone_center_y = 0.0;
    double zone_radius = 0.5;
    int quad_points = 10000;      // silence-zone quadrature size
    int eval_budget = 500;        // objective/gradient evaluations
    double eps = 1e-3;
    std::uint64_t seed = 1;
    int grid_nx = 220;
    int grid_ny = 120;
};

struct SoundCancelProblem {
    sbd::PointCloud sources;
    sbd::PointCloud zone;   // quadrature points in the silence zone
    sbd::CompressedOperator op; // sources -> zone
    double delta_min = 0.0;
    double zone_gap = 0.0;  // min source-to-zone distance
};

SoundCancelProblem build_problem(const SoundCancelConfig& cfg);

// Objective Pi(phi) = || A q(phi) ||^2 with q_l = e^{i phi_l}, and its
// gradient dPi/dphi_l = 2 Im(conj(q_l) (A^H A q)_l). One evaluation costs two
// compressed matvecs.
struct Evaluation {
    double objective = 0.0;
    std::vector<double> gradient;
};

Evaluation evaluate(const SoundCancelProblem& prob, const std::vector<double>& phases);
double objective_only(const SoundCancelProblem& prob, const std::vector<double>& phases);

struct OptimizeResult {
    std::vector<double> phases;
    double initial_objective = 0.0;
    double final_objective = 0.0;
    int evaluations = 0;
    // (evaluation count, best accepted objective) after each accepted step.
    std::vector<std::pair<int, double>> trace;
};

// Gradient descent with backtracking line search, stopped at the evaluation
// budget. The accepted-objective trace is non-increasing by construction.
OptimizeResult optimize_phases(const SoundCancelProblem& prob, std::vector<double> phases,
                               int eval_budget);

// Sound level 20 log10 |p| on a regular grid covering the scene; the grid
// file is raw little-endian float64 with a JSON sidecar (dims + bounds).
struct FieldGrid {
    int nx = 0, ny = 0;
    double xmin = 0, xmax = 0, ymin = 0, ymax = 0;
    std::vector<double> level_db;
};

FieldGrid render_field(const SoundCancelConfig& cfg, const sbd::PointCloud& sources,
                       const std::vector<double>& phases);

void write_field(const FieldGrid& grid, const std::string& base_path);

} // namespace sbdcli
