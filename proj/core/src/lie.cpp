#include "diskuq/lie.hpp"

#include <cmath>
#include <stdexcept>
#include <unsupported/Eigen/MatrixFunctions>

namespace diskuq {

namespace {
const std::complex<double> I(0.0, 1.0);
const double inv_sqrt2 = 1.0 / std::sqrt(2.0);

std::array<Mat2c, 3> make_su2_basis() {
    Mat2c s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    return {Mat2c(I * inv_sqrt2 * s1), Mat2c(I * inv_sqrt2 * s2),
            Mat2c(I * inv_sqrt2 * s3)};
}

std::array<Mat2c, 5> make_su2_perp_basis() {
    Mat2c s1, s2, s3;
    s1 << 0, 1, 1, 0;
    s2 << 0, -I, I, 0;
    s3 << 1, 0, 0, -1;
    return {Mat2c(inv_sqrt2 * s1), Mat2c(inv_sqrt2 * s2), Mat2c(inv_sqrt2 * s3),
            Mat2c(inv_sqrt2 * Mat2c::Identity()),
            Mat2c(I * inv_sqrt2 * Mat2c::Identity())};
}
}  // namespace

const std::array<Mat2c, 3>& su2_basis() {
    static const auto basis = make_su2_basis();
    return basis;
}

const std::array<Mat2c, 5>& su2_perp_basis() {
    static const auto basis = make_su2_perp_basis();
    return basis;
}

std::vector<Eigen::MatrixXd> so_basis(int n) {
    std::vector<Eigen::MatrixXd> basis;
    basis.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            Eigen::MatrixXd b = Eigen::MatrixXd::Zero(n, n);
            b(i, j) = inv_sqrt2;
            b(j, i) = -inv_sqrt2;
            basis.push_back(std::move(b));
        }
    }
    return basis;
}

double frobenius_inner(const MatXc& a, const MatXc& b) {
    return (a.array() * b.array().conjugate()).sum().real();
}

MatXc algebra_matrix(const AlgebraElement& a) {
    if (a.algebra_tag == AlgebraTag::su2) {
        const auto& basis = su2_basis();
        Mat2c m = Mat2c::Zero();
        for (int k = 0; k < 3; ++k) m += a.coefficients[k] * basis[k];
        return m;
    }
    const auto basis = so_basis(a.n);
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.n, a.n);
    for (std::size_t k = 0; k < basis.size(); ++k) {
        m += a.coefficients[static_cast<Eigen::Index>(k)] * basis[k];
    }
    return m.cast<std::complex<double>>();
}

AlgebraElement algebra_from_matrix(const MatXc& m, AlgebraTag tag) {
    AlgebraElement a;
    a.algebra_tag = tag;
    a.n = static_cast<int>(m.rows());
    if (tag == AlgebraTag::su2) {
        if (m.rows() != 2) throw std::invalid_argument("su(2) needs 2x2 input");
        const auto& basis = su2_basis();
        a.coefficients.resize(3);
        for (int k = 0; k < 3; ++k) a.coefficients[k] = frobenius_inner(m, basis[k]);
    } else {
        const auto basis = so_basis(a.n);
        a.coefficients.resize(static_cast<Eigen::Index>(basis.size()));
        for (std::size_t k = 0; k < basis.size(); ++k) {
            a.coefficients[static_cast<Eigen::Index>(k)] =
                frobenius_inner(m, basis[k].cast<std::complex<double>>());
        }
    }
    return a;
}

MatXc expm(const MatXc& a) {
    if (a.rows() == 2 && std::abs(a.trace()) < 1e-14 &&
        (a + a.adjoint()).norm() < 1e-13) {
        // Skew-hermitian traceless 2x2: A^2 = -theta^2 Id with
        // theta^2 = det(A) = |A|_F^2 / 2, so
        // exp(A) = cos(theta) Id + sinc(theta) A.
        const double theta = a.norm() * inv_sqrt2;
        const double sinc = theta < 1e-8 ? 1.0 - theta * theta / 6.0
                                         : std::sin(theta) / theta;
        return std::cos(theta) * MatXc::Identity(2, 2) + sinc * a;
    }
    return a.exp();
}

GroupElement expm(const AlgebraElement& a) { return GroupElement{expm(algebra_matrix(a))}; }

MatXc project_algebra(const MatXc& m, AlgebraTag tag, AlgebraPart part) {
    MatXc pg = MatXc::Zero(m.rows(), m.cols());
    if (tag == AlgebraTag::su2) {
        if (m.rows() != 2) throw std::invalid_argument("su(2) needs 2x2 input");
        for (const auto& b : su2_basis()) pg += frobenius_inner(m, b) * b;
    } else {
        for (const auto& b : so_basis(static_cast<int>(m.rows()))) {
            MatXc bc = b.cast<std::complex<double>>();
            pg += frobenius_inner(m, bc) * bc;
        }
    }
    return part == AlgebraPart::g ? pg : MatXc(m - pg);
}

}  // namespace diskuq
