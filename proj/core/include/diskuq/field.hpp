#pragma once

#include <Eigen/Core>
#include <functional>
#include <memory>
#include <vector>

#include "diskuq/geometry.hpp"
#include "diskuq/lie.hpp"
#include "diskuq/mesh.hpp"

namespace diskuq {

/// Scalar function on the closed unit disk.
class ScalarField {
  public:
    virtual ~ScalarField() = default;
    virtual double eval(const Vec2& x) const = 0;
};

using ScalarFieldPtr = std::shared_ptr<const ScalarField>;

class AnalyticField final : public ScalarField {
  public:
    explicit AnalyticField(std::function<double(const Vec2&)> f) : f_(std::move(f)) {}
    double eval(const Vec2& x) const override { return f_(x); }

  private:
    std::function<double(const Vec2&)> f_;
};

ScalarFieldPtr make_analytic(std::function<double(const Vec2&)> f);
ScalarFieldPtr make_zero_field();

/// Piecewise-linear nodal function on a triangular mesh.
class MeshField final : public ScalarField {
  public:
    MeshField(std::shared_ptr<const TriMesh> mesh, Eigen::VectorXd values)
        : mesh_(std::move(mesh)), values_(std::move(values)) {}
    double eval(const Vec2& x) const override { return mesh_->interpolate(values_, x); }
    const Eigen::VectorXd& values() const { return values_; }
    const TriMesh& mesh() const { return *mesh_; }

  private:
    std::shared_ptr<const TriMesh> mesh_;
    Eigen::VectorXd values_;
};

/// Tensor polar-grid function, bilinear in (rho, omega), periodic in omega.
/// Radial nodes rho_i = (i + 1/2) / n_rho keep the grid off the pole.
class PolarGridField final : public ScalarField {
  public:
    PolarGridField(int n_rho, int n_omega, Eigen::MatrixXd values)
        : n_rho_(n_rho), n_omega_(n_omega), values_(std::move(values)) {}
    double eval(const Vec2& x) const override;
    static double rho_node(int i, int n_rho) { return (i + 0.5) / n_rho; }

  private:
    int n_rho_, n_omega_;
    Eigen::MatrixXd values_;  // (n_rho, n_omega)
};

/// Nodal restriction of an arbitrary scalar field to mesh vertices.
Eigen::VectorXd nodal_values(const TriMesh& mesh, const ScalarField& f);

/// Matrix-valued field sum_a components[a](x) * basis[a] on the disk, zero
/// outside support_radius.
struct MatrixField {
    std::vector<MatXc> basis;
    std::vector<ScalarFieldPtr> components;
    double support_radius = 1.0;

    int dim() const { return static_cast<int>(basis.size()); }
    int matrix_size() const { return basis.empty() ? 0 : static_cast<int>(basis[0].rows()); }
    MatXc eval(const Vec2& x) const;
    Eigen::VectorXd coeffs(const Vec2& x) const;
};

/// su(2)-valued field with components in the orthonormal basis
/// {i sigma_a / sqrt(2)}.
MatrixField su2_field(ScalarFieldPtr c1, ScalarFieldPtr c2, ScalarFieldPtr c3,
                      double support_radius = 1.0);
MatrixField zero_su2_field();

/// Scalar case n=1 with basis {i}: the classical X-ray transform embeds as
/// the abelian unitary group.
MatrixField scalar_unitary_field(ScalarFieldPtr f, double support_radius = 1.0);

/// L^2(disk) inner product of two matrix fields (real Frobenius pairing),
/// by Gauss-Legendre x trapezoid disk quadrature.
double l2_inner(const MatrixField& f, const MatrixField& g, int n_rho = 48,
                int n_omega = 96);

/// Disk quadrature rule: nodes and weights for integration over the unit disk.
struct DiskQuadrature {
    std::vector<Vec2> nodes;
    std::vector<double> weights;
};
DiskQuadrature disk_quadrature(int n_rho, int n_omega);

}  // namespace diskuq
