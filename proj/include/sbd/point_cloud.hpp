#pragma once

#include <cstdint>
#include <vector>

#include "sbd/vec2.hpp"

namespace sbd {

struct PointCloud {
    std::vector<Vec2> points;
    double diameter = 0.0; // exact max pairwise distance

    std::size_t size() const { return points.size(); }
};

// Exact diameter via convex hull + rotating calipers.
double cloud_diameter(const std::vector<Vec2>& pts);

PointCloud make_cloud(std::vector<Vec2> pts);

// Diameter of the union of two clouds.
double union_diameter(const PointCloud& a, const PointCloud& b);

// All (k, l) with |target[k] - source[l]| <= radius, CSR-ordered by k, built
// with a uniform grid of cell size radius. When exclude_diagonal is set
// (single-cloud case) the k == l pairs are skipped.
struct NeighborPairs {
    std::vector<std::uint64_t> row_offsets; // size target.size() + 1
    std::vector<std::uint32_t> cols;        // source indices

    std::uint64_t count() const { return cols.size(); }
};

NeighborPairs neighbor_pairs(const PointCloud& target, const PointCloud& source, double radius,
                             bool exclude_diagonal = false);

// Close-correction matrix: the neighbor pattern plus one complex value per
// pair, CSR over target rows.
struct SparsePairMatrix {
    std::vector<std::uint64_t> row_offsets;
    std::vector<std::uint32_t> cols;
    std::vector<cplx> values;

    std::uint64_t nnz() const { return values.size(); }
    // q += D f
    void accumulate_apply(const std::vector<cplx>& f, std::vector<cplx>& q) const;
    // q += D^H u  (conjugate transpose)
    void accumulate_apply_adjoint(const std::vector<cplx>& u, std::vector<cplx>& q) const;
};

} // namespace sbd
