#pragma once

#include <Eigen/Core>
#include <array>
#include <complex>
#include <vector>

namespace diskuq {

using Mat2c = Eigen::Matrix2cd;
using MatXc = Eigen::MatrixXcd;

enum class AlgebraTag { so_n, su2 };

/// Element of a matrix Lie algebra, stored as coefficients with respect to a
/// fixed Frobenius-orthonormal basis of g in C^{nxn}.
struct AlgebraElement {
    Eigen::VectorXd coefficients;
    AlgebraTag algebra_tag = AlgebraTag::su2;
    int n = 2;  // matrix size
};

struct GroupElement {
    MatXc matrix;
};

/// Frobenius-orthonormal basis {i sigma_1, i sigma_2, i sigma_3} / sqrt(2)
/// of su(2) (skew-hermitian, traceless).
const std::array<Mat2c, 3>& su2_basis();
/// Frobenius-orthonormal complement basis of su(2) inside C^{2x2}:
/// {sigma_a / sqrt(2)} plus {Id / sqrt(2), i Id / sqrt(2)} — completes
/// su2_basis to a real-orthonormal basis of C^{2x2} (real dim 8).
const std::array<Mat2c, 5>& su2_perp_basis();

/// Frobenius-orthonormal basis of so(n) (real skew-symmetric), lexicographic
/// (E_ij - E_ji)/sqrt(2), i<j.
std::vector<Eigen::MatrixXd> so_basis(int n);

MatXc algebra_matrix(const AlgebraElement& a);
AlgebraElement algebra_from_matrix(const MatXc& m, AlgebraTag tag);

/// Real part of the Frobenius hermitian inner product tr(A B^*).
double frobenius_inner(const MatXc& a, const MatXc& b);

/// Matrix exponential; closed form for 2x2 skew-hermitian traceless input,
/// scaling-and-squaring otherwise.
MatXc expm(const MatXc& a);
GroupElement expm(const AlgebraElement& a);

enum class AlgebraPart { g, g_perp };

/// Frobenius-orthogonal projection of m onto g or its orthocomplement in
/// C^{nxn} (real inner product Re tr(A B^*)).
MatXc project_algebra(const MatXc& m, AlgebraTag tag, AlgebraPart part);

}  // namespace diskuq
