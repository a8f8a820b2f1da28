#include "sbd/point_cloud.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

namespace sbd {

namespace {

// Andrew monotone chain, returns hull in counterclockwise order.
std::vector<Vec2> convex_hull(std::vector<Vec2> p) {
    std::sort(p.begin(), p.end(), [](const Vec2& a, const Vec2& b) {
        return a.x < b.x || (a.x == b.x && a.y < b.y);
    });
    p.erase(std::unique(p.begin(), p.end(),
                        [](const Vec2& a, const Vec2& b) { return a.x == b.x && a.y == b.y; }),
            p.end());
    const int n = (int)p.size();
    if (n <= 2) return p;
    std::vector<Vec2> h(2 * n);
    int k = 0;
    for (int i = 0; i < n; ++i) {
        while (k >= 2 && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
        h[k++] = p[i];
    }
    const int lower = k + 1;
    for (int i = n - 2; i >= 0; --i) {
        while (k >= lower && cross(h[k - 1] - h[k - 2], p[i] - h[k - 2]) <= 0) --k;
        h[k++] = p[i];
    }
    h.resize(k - 1);
    return h;
}

} // namespace

double cloud_diameter(const std::vector<Vec2>& pts) {
    if (pts.size() < 2) return 0.0;
    const std::vector<Vec2> h = convex_hull(pts);
    const int m = (int)h.size();
    if (m == 1) return 0.0;
    if (m == 2) return norm2(h[1] - h[0]);
    // Rotating calipers over antipodal pairs.
    double best = 0.0;
    int j = 1;
    for (int i = 0; i < m; ++i) {
        const Vec2 edge = h[(i + 1) % m] - h[i];
        while (std::fabs(cross(edge, h[(j + 1) % m] - h[i])) >
               std::fabs(cross(edge, h[j] - h[i])))
            j = (j + 1) % m;
        best = std::max(best, norm2(h[j] - h[i]));
        best = std::max(best, norm2(h[j] - h[(i + 1) % m]));
    }
    return best;
}

PointCloud make_cloud(std::vector<Vec2> pts) {
    PointCloud c;
    c.diameter = cloud_diameter(pts);
    c.points = std::move(pts);
    return c;
}

double union_diameter(const PointCloud& a, const PointCloud& b) {
    std::vector<Vec2> all;
    all.reserve(a.size() + b.size());
    all.insert(all.end(), a.points.begin(), a.points.end());
    all.insert(all.end(), b.points.begin(), b.points.end());
    return cloud_diameter(all);
}

NeighborPairs neighbor_pairs(const PointCloud& target, const PointCloud& source, double radius,
                             bool exclude_diagonal) {
    if (radius < 0.0) throw std::domain_error("neighbor_pairs: radius must be nonnegative");
    NeighborPairs out;
    out.row_offsets.assign(target.size() + 1, 0);
    if (radius == 0.0 || source.size() == 0 || target.size() == 0) return out;

    const double cell = radius;
    const auto key = [cell](const Vec2& p) {
        const auto ix = (std::int64_t)std::floor(p.x / cell);
        const auto iy = (std::int64_t)std::floor(p.y / cell);
        return (std::uint64_t)(ix & 0xffffffffll) << 32 | (std::uint64_t)(iy & 0xffffffffll);
    };
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> buckets;
    buckets.reserve(source.size() * 2);
    for (std::uint32_t l = 0; l < source.size(); ++l) buckets[key(source.points[l])].push_back(l);

    const double r2 = radius * radius;
    for (std::size_t k = 0; k < target.size(); ++k) {
        const Vec2& zk = target.points[k];
        const auto ix = (std::int64_t)std::floor(zk.x / cell);
        const auto iy = (std::int64_t)std::floor(zk.y / cell);
        for (std::int64_t dx = -1; dx <= 1; ++dx) {
            for (std::int64_t dy = -1; dy <= 1; ++dy) {
                const std::uint64_t kk = (std::uint64_t)((ix + dx) & 0xffffffffll) << 32 |
                                         (std::uint64_t)((iy + dy) & 0xffffffffll);
                const auto it = buckets.find(kk);
                if (it == buckets.end()) continue;
                for (std::uint32_t l : it->second) {
                    if (exclude_diagonal && l == k) continue;
                    if (norm2_sq(zk - source.points[l]) <= r2) out.cols.push_back(l);
                }
            }
        }
        out.row_offsets[k + 1] = out.cols.size();
    }
    // Deterministic column order within each row.
    for (std::size_t k = 0; k < target.size(); ++k)
        std::sort(out.cols.begin() + out.row_offsets[k], out.cols.begin() + out.row_offsets[k + 1]);
    return out;
}

void SparsePairMatrix::accumulate_apply(const std::vector<cplx>& f, std::vector<cplx>& q) const {
    for (std::size_t k = 0; k + 1 < row_offsets.size(); ++k) {
        cplx acc(0.0, 0.0);
        for (std::uint64_t i = row_offsets[k]; i < row_offsets[k + 1]; ++i)
            acc += values[i] * f[cols[i]];
        q[k] += acc;
    }
}

void SparsePairMatrix::accumulate_apply_adjoint(const std::vector<cplx>& u,
                                                std::vector<cplx>& q) const {
    for (std::size_t k = 0; k + 1 < row_offsets.size(); ++k) {
        const cplx uk = u[k];
        for (std::uint64_t i = row_offsets[k]; i < row_offsets[k + 1]; ++i)
            q[cols[i]] += std::conj(values[i]) * uk;
    }
}

} // namespace sbd
