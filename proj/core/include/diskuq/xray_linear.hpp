#pragma once

#include <vector>

#include "diskuq/field.hpp"
#include "diskuq/geometry.hpp"
#include "diskuq/xray_forward.hpp"

namespace diskuq {

/// Tensor quadrature grid over the influx boundary: n_phi equispaced
/// periodic nodes in phi, n_vphi+1 closed trapezoid nodes in varphi over
/// [-pi/2, pi/2]. lambda-weights sum to 1.
struct BoundaryGrid {
    int n_phi = 128;
    int n_vphi = 64;

    double phi(int i) const;
    double vphi(int j) const;
    /// Weight of node (i,j) for the probability measure
    /// d(lambda) = dphi dvphi / (2 pi^2).
    double lambda_weight(int i, int j) const;
    int rows() const { return n_phi; }
    int cols() const { return n_vphi + 1; }
    std::size_t size() const { return static_cast<std::size_t>(n_phi) * (n_vphi + 1); }
    std::size_t index(int i, int j) const {
        return static_cast<std::size_t>(i) * (n_vphi + 1) + j;
    }
};

/// Matrix-valued function on the influx boundary, sampled on a BoundaryGrid.
struct BoundaryMatrixFunction {
    BoundaryGrid grid;
    std::vector<MatXc> values;

    /// Bilinear interpolation, periodic in phi.
    MatXc interpolate(double phi, double vphi) const;
};

/// sqrt of the lambda-weighted squared Frobenius norm.
double l2_lambda_norm(const BoundaryMatrixFunction& f);
/// lambda-weighted real Frobenius inner product.
double l2_lambda_inner(const BoundaryMatrixFunction& f, const BoundaryMatrixFunction& g);

/// Linearized forward map I_Phi(h) = I_{Theta(Phi,Phi)}(h) C_Phi, per beam.
std::vector<MatXc> linearized_forward(const MatrixField& phi0, const MatrixField& h,
                                      const std::vector<BeamSample>& beams,
                                      const OdeOptions& opts = {});
BoundaryMatrixFunction linearized_forward(const MatrixField& phi0, const MatrixField& h,
                                          const BoundaryGrid& grid,
                                          const OdeOptions& opts = {});

/// Adjoint of the attenuated transform with respect to the geometric pairing
/// <F,G>_{(mu/tau) dSigma} on the boundary and L^2(M, dx) in the interior:
///   I^* h(x) = int_{S^1} u(x,v) h(psi(x,v)) u(x,v)^{-1} / tau(psi(x,v)) dv
/// with u the influx-normalized integrating factor of phi0 and psi the
/// footpoint map; angular trapezoid over n_dirs directions.
MatXc adjoint_apply(const MatrixField& phi0, const BoundaryMatrixFunction& h,
                    const Vec2& x, int n_dirs = 256, const OdeOptions& opts = {});

/// Normal operator N_Phi f(x) = I^* (I f)(x), sharing one ODE sweep per
/// chord for the inner transform and the conjugating factors.
MatXc normal_apply_point(const MatrixField& phi0, const MatrixField& f, const Vec2& x,
                         int n_dirs = 256, const OdeOptions& opts = {});
std::vector<MatXc> normal_apply(const MatrixField& phi0, const MatrixField& f,
                                const std::vector<Vec2>& points, int n_dirs = 256,
                                const OdeOptions& opts = {});

/// L^2(lambda) Monte-Carlo norm of the linearization residual
/// C_{Phi+h} - C_Phi - I_Phi(h) over the supplied beams.
double remainder_norm(const MatrixField& phi0, const MatrixField& h,
                      const std::vector<BeamSample>& beams, const OdeOptions& opts = {});

/// Pointwise sum field phi0 + h (shared basis).
MatrixField field_sum(const MatrixField& a, const MatrixField& b, double scale_b = 1.0);

/// JSON serialization of a boundary matrix function together with its
/// (phi, varphi) grid.
void write_boundary_json(std::ostream& os, const BoundaryMatrixFunction& f);
BoundaryMatrixFunction read_boundary_json(std::istream& is);

}  // namespace diskuq
