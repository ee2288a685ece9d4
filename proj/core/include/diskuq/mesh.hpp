#pragma once

#include <Eigen/Core>
#include <array>
#include <memory>
#include <vector>

#include "diskuq/geometry.hpp"

namespace diskuq {

/// Interpolation stencil: a point expressed as a convex combination of three
/// mesh vertices.
struct MeshStencil {
    std::array<int, 3> vertex = {-1, -1, -1};
    std::array<double, 3> weight = {0.0, 0.0, 0.0};
    bool valid() const { return vertex[0] >= 0; }
};

/// Unstructured triangular mesh of the closed unit disk with a uniform-grid
/// spatial index for point location.
class TriMesh {
  public:
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;

    /// Builds the spatial index and the lumped mass vector; call after
    /// filling vertices/triangles.
    void finalize();

    /// Vertex weights of the lumped mass matrix (one third of the area of
    /// the incident triangles); sums to the mesh area.
    const Eigen::VectorXd& lumped_mass() const { return lumped_mass_; }

    /// Barycentric stencil of the triangle containing x; points slightly
    /// outside the polygonal boundary are radially clamped. Returns an
    /// invalid stencil for points outside the disk.
    MeshStencil stencil(const Vec2& x) const;

    /// Piecewise-linear interpolation of nodal values; zero outside the mesh.
    double interpolate(const Eigen::VectorXd& nodal, const Vec2& x) const;

    double total_area() const { return lumped_mass_.sum(); }

  private:
    MeshStencil stencil_raw(const Vec2& x) const;

    Eigen::VectorXd lumped_mass_;
    int grid_n_ = 0;
    double cell_ = 0.0;
    std::vector<std::vector<int>> buckets_;
};

/// Concentric-ring triangulation of the unit disk: ring i of n_rings carries
/// 6i vertices at radius i/n_rings, plus the center (n_rings=17 gives 919
/// vertices, close to the ~900-vertex scale used throughout).
std::shared_ptr<TriMesh> disk_mesh(int n_rings = 17);

}  // namespace diskuq
