#include "diskuq/mesh.hpp"

#include <algorithm>
#include <cmath>

namespace diskuq {

namespace {
constexpr double kPi = 3.14159265358979323846;

double signed_area(const Vec2& a, const Vec2& b, const Vec2& c) {
    return 0.5 * ((b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x()));
}
}  // namespace

void TriMesh::finalize() {
    // Consistent orientation.
    for (auto& t : triangles) {
        if (signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]) < 0.0) {
            std::swap(t[1], t[2]);
        }
    }
    lumped_mass_ = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(vertices.size()));
    for (const auto& t : triangles) {
        const double a = signed_area(vertices[t[0]], vertices[t[1]], vertices[t[2]]);
        for (int v : t) lumped_mass_[v] += a / 3.0;
    }
    // Bucket grid over [-1,1]^2.
    grid_n_ = std::max(8, static_cast<int>(std::sqrt(static_cast<double>(triangles.size()))));
    cell_ = 2.0 / grid_n_;
    buckets_.assign(static_cast<std::size_t>(grid_n_) * grid_n_, {});
    for (std::size_t ti = 0; ti < triangles.size(); ++ti) {
        const auto& t = triangles[ti];
        double xmin = 1.0, xmax = -1.0, ymin = 1.0, ymax = -1.0;
        for (int v : t) {
            xmin = std::min(xmin, vertices[v].x());
            xmax = std::max(xmax, vertices[v].x());
            ymin = std::min(ymin, vertices[v].y());
            ymax = std::max(ymax, vertices[v].y());
        }
        const double pad = 1e-12;
        int i0 = std::clamp(static_cast<int>((xmin + 1.0 - pad) / cell_), 0, grid_n_ - 1);
        int i1 = std::clamp(static_cast<int>((xmax + 1.0 + pad) / cell_), 0, grid_n_ - 1);
        int j0 = std::clamp(static_cast<int>((ymin + 1.0 - pad) / cell_), 0, grid_n_ - 1);
        int j1 = std::clamp(static_cast<int>((ymax + 1.0 + pad) / cell_), 0, grid_n_ - 1);
        for (int i = i0; i <= i1; ++i)
            for (int j = j0; j <= j1; ++j)
                buckets_[static_cast<std::size_t>(i) * grid_n_ + j].push_back(
                    static_cast<int>(ti));
    }
}

MeshStencil TriMesh::stencil_raw(const Vec2& x) const {
    const int i = std::clamp(static_cast<int>((x.x() + 1.0) / cell_), 0, grid_n_ - 1);
    const int j = std::clamp(static_cast<int>((x.y() + 1.0) / cell_), 0, grid_n_ - 1);
    MeshStencil best;
    double best_min_bary = -1e30;
    for (int ti : buckets_[static_cast<std::size_t>(i) * grid_n_ + j]) {
        const auto& t = triangles[ti];
        const Vec2 &a = vertices[t[0]], &b = vertices[t[1]], &c = vertices[t[2]];
        const double area = signed_area(a, b, c);
        if (area <= 0.0) continue;
        const double w0 = signed_area(x, b, c) / area;
        const double w1 = signed_area(a, x, c) / area;
        const double w2 = 1.0 - w0 - w1;
        const double min_bary = std::min({w0, w1, w2});
        if (min_bary > best_min_bary) {
            best_min_bary = min_bary;
            best.vertex = {t[0], t[1], t[2]};
            best.weight = {w0, w1, w2};
        }
        if (min_bary >= 0.0) break;
    }
    if (best_min_bary < -1e-9) return MeshStencil{};
    for (double& w : best.weight) w = std::max(w, 0.0);
    const double s = best.weight[0] + best.weight[1] + best.weight[2];
    for (double& w : best.weight) w /= s;
    return best;
}

MeshStencil TriMesh::stencil(const Vec2& x) const {
    const double r = x.norm();
    if (r > 1.0 + 1e-12) return MeshStencil{};
    MeshStencil s = stencil_raw(x);
    if (s.valid() || r < 0.5) return s;
    // Slivers between the polygonal boundary and the circle: clamp inward by
    // successively larger margins (the sagitta depends on mesh resolution).
    for (double margin : {1e-6, 1e-3, 4e-3, 1.5e-2}) {
        s = stencil_raw(x * ((1.0 - margin) / r));
        if (s.valid()) return s;
    }
    return s;
}

double TriMesh::interpolate(const Eigen::VectorXd& nodal, const Vec2& x) const {
    MeshStencil s = stencil(x);
    if (!s.valid()) return 0.0;
    return s.weight[0] * nodal[s.vertex[0]] + s.weight[1] * nodal[s.vertex[1]] +
           s.weight[2] * nodal[s.vertex[2]];
}

std::shared_ptr<TriMesh> disk_mesh(int n_rings) {
    auto mesh = std::make_shared<TriMesh>();
    std::vector<int> ring_start(static_cast<std::size_t>(n_rings) + 1, 0);
    mesh->vertices.emplace_back(0.0, 0.0);
    for (int i = 1; i <= n_rings; ++i) {
        ring_start[i] = static_cast<int>(mesh->vertices.size());
        const double r = static_cast<double>(i) / n_rings;
        const int m = 6 * i;
        for (int j = 0; j < m; ++j) {
            const double a = 2.0 * kPi * j / m;
            mesh->vertices.emplace_back(r * std::cos(a), r * std::sin(a));
        }
    }
    // Innermost fan.
    for (int j = 0; j < 6; ++j) {
        mesh->triangles.push_back({0, ring_start[1] + j, ring_start[1] + (j + 1) % 6});
    }
    // Annulus strips: walk both rings by increasing angle.
    for (int i = 2; i <= n_rings; ++i) {
        const int n0 = 6 * (i - 1), n1 = 6 * i;
        const int s0 = ring_start[i - 1], s1 = ring_start[i];
        int a = 0, b = 0;
        while (a < n0 || b < n1) {
            bool advance_inner;
            if (a == n0) advance_inner = false;
            else if (b == n1) advance_inner = true;
            else advance_inner = (a + 1) * n1 <= (b + 1) * n0;
            if (advance_inner) {
                mesh->triangles.push_back({s0 + a % n0, s1 + b % n1, s0 + (a + 1) % n0});
                ++a;
            } else {
                mesh->triangles.push_back({s0 + a % n0, s1 + b % n1, s1 + (b + 1) % n1});
                ++b;
            }
        }
    }
    mesh->finalize();
    return mesh;
}

}  // namespace diskuq
