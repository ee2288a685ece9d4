#pragma once

#include <Eigen/Core>
#include <vector>

#include "diskuq/field.hpp"
#include "diskuq/xray_linear.hpp"

namespace diskuq {

/// Zernike index (n, k), 0 <= k <= n, azimuthal order m = 2k - n.
struct ZernikeIndex {
    int n = 0;
    int k = 0;
    int m() const { return 2 * k - n; }
};

/// Number of basis functions with degree <= max_degree.
int zernike_dim(int max_degree);
/// All indices with degree <= max_degree, ordered by (n, k).
const std::vector<ZernikeIndex>& zernike_indices(int max_degree);

/// L^2(disk)-normalized real Zernike polynomial \hat Z_{n,k}: radial part
/// R_n^{|m|}(rho), angular part cos(|m| omega) for m > 0, sin(|m| omega) for
/// m < 0, constant for m = 0.
double zernike_eval(int n, int k, const Vec2& x);
/// All basis values with degree <= max_degree at one point (fast recurrence
/// path); out must hold zernike_dim(max_degree) entries, ordered like
/// zernike_indices.
void zernike_eval_all(int max_degree, const Vec2& x, double* out);

struct ZernikeExpansion {
    int max_degree = 0;
    Eigen::VectorXd coeffs;  // ordered like zernike_indices(max_degree)
};

/// Monomial coefficients c_p of the radial polynomial R_n^{|m|}(rho) =
/// sum_p c_p rho^p (index p = 0..n).
Eigen::VectorXd zernike_radial_coeffs(int n, int absm);

/// Polynomial path of the operator
///   L = (4 pi)^{-2} [ -((1-rho^2) d_rho^2 + (rho^{-1} - 3 rho) d_rho
///                     + rho^{-2} d_omega^2) + 1 ]
/// acting on sum_p c_p rho^p cos/sin(m omega):
///   rho^p -> (m^2 - p^2) rho^{p-2} + (p+1)^2 rho^p, scaled by (4 pi)^{-2}.
Eigen::VectorXd apply_L_radial(const Eigen::VectorXd& coeffs, int absm);

/// Finite-difference path of L on a polar grid with nodes
/// rho_i = (i+1/2)/n_rho (never touching the pole), omega_j = 2 pi j/n_omega.
Eigen::MatrixXd apply_L_fd(const Eigen::MatrixXd& values);

/// Coefficients by disk quadrature (Gauss-Legendre in rho x trapezoid in
/// omega, exact for the polynomial span at the default sizes).
ZernikeExpansion analyze(const ScalarField& f, int max_degree, int n_rho = 0,
                         int n_omega = 0);
double synthesize_at(const ZernikeExpansion& e, const Vec2& x);
ScalarFieldPtr synthesize_field(const ZernikeExpansion& e);

/// Numerically measured spectrum of the lambda-weighted normal operator N_0
/// on the Zernike basis.
struct SpectralCalibration {
    int max_degree = 0;
    Eigen::VectorXd c_hat;       // per degree n: <N_0 Z_{n,k}, Z_{n,k}>_lambda mean
    double leakage = 0.0;        // worst off-diagonal column mass ratio
    double convention_constant = 0.0;  // measured constant in L N_0^2 = const * id
};

/// Discrete Galerkin realization of the lambda-weighted normal operator
/// N = I^* I for su(2)-valued fields: boundary quadrature over grid, chord
/// trapezoid aligned with the ODE grid. For scalar_rank_one = true the
/// operator acts on scalar fields (Phi = 0 sanity path).
class NormalGalerkin {
  public:
    /// g_dim = 3 (su(2) components) or 1 (scalar).
    NormalGalerkin(const MatrixField& phi0, int max_degree, const BoundaryGrid& grid,
                   const OdeOptions& opts, int g_dim = 3);

    /// Galerkin matrix M = G^T W G of <N e_i, e_j>_lambda.
    const Eigen::MatrixXd& matrix() const { return m_; }
    int unknowns() const { return static_cast<int>(m_.rows()); }
    int g_dim() const { return g_dim_; }
    int max_degree() const { return max_degree_; }

    /// lambda-weighted boundary values of I(sum x_i e_i), flattened.
    Eigen::VectorXd boundary_image(const Eigen::VectorXd& x) const;
    /// lambda-weighted squared boundary norm ||I(sum x_i e_i)||^2_lambda.
    double boundary_norm_sq(const Eigen::VectorXd& x) const;

  private:
    Eigen::MatrixXd g_;  // (3 * n_beams or n_beams, unknowns)
    Eigen::VectorXd w_;  // per-row lambda weights
    Eigen::MatrixXd m_;
    int g_dim_ = 3;
    int max_degree_ = 0;
};

SpectralCalibration calibrate_N0(int max_degree, const BoundaryGrid& grid,
                                 const OdeOptions& opts);

struct InvertResult {
    std::vector<ZernikeExpansion> components;  // one per g-basis element
    MatrixField field;                         // synthesized psi_tilde
    int iterations = 0;
    double residual = 0.0;
    std::vector<double> residual_history;
    double variance = 0.0;  // ||I psi_tilde||^2_lambda = <psi, psi_tilde>
};

/// Solves N_Phi psi_tilde = psi by preconditioned conjugate gradients on the
/// Galerkin matrix; preconditioner is the calibrated diagonal c_hat(n).
InvertResult invert_normal(const NormalGalerkin& op, const SpectralCalibration& cal,
                           const MatrixField& psi, double tol, int max_iters = 200);

/// BvM asymptotic variance sigma^2_psi = ||I_Phi0 (N_Phi0)^{-1} psi||^2_lambda.
double asymptotic_variance(const NormalGalerkin& op, const SpectralCalibration& cal,
                           const MatrixField& psi, double tol = 1e-8);

/// JSON serialization of calibration tables and expansions.
void write_calibration_json(std::ostream& os, const SpectralCalibration& cal);
SpectralCalibration read_calibration_json(std::istream& is);
void write_expansion_json(std::ostream& os, const ZernikeExpansion& e);
ZernikeExpansion read_expansion_json(std::istream& is);

}  // namespace diskuq
