#pragma once

#include <complex>

#include <Eigen/Dense>

namespace gqfpe {

template <typename Scalar>
using ComplexMatrix = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealMatrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

template <typename Scalar>
using RealVector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

template <typename Scalar>
using ComplexVector = Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1>;

using MatrixXc = ComplexMatrix<double>;
using VectorXc = ComplexVector<double>;
using Complex = std::complex<double>;

/// Largest entry of |A - A^dagger|.
template <typename Derived>
typename Derived::RealScalar hermiticity_defect(const Eigen::MatrixBase<Derived>& a) {
    return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

/// [A, B] = AB - BA.
template <typename A, typename B>
auto commutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a * b - b * a).eval();
}

/// {A, B} = AB + BA.
template <typename A, typename B>
auto anticommutator(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b) {
    return (a * b + b * a).eval();
}

}  // namespace gqfpe
