#pragma once

#include <complex>
#include <type_traits>

#include <Eigen/Dense>

#include "cvtele/errors.hpp"

namespace cvtele {

namespace internal {
template <typename Scalar>
struct is_complex : std::false_type {};
template <typename Real>
struct is_complex<std::complex<Real>> : std::true_type {};
}  // namespace internal

// Solves A X + X A^T + Q = 0 (plain transpose, not adjoint) for square A.
//
// Bartels-Stewart on the complex Schur form A = U T U^*: with X = U Y U^T the
// equation becomes T Y + Y T^T = -U^* Q conj(U), solved one column at a time
// from the last. Works for real and complex scalars; for real input the
// result is real. Throws SolveError when A has a pair of eigenvalues with
// lambda_i + lambda_j = 0 (no unique solution).
template <typename DerivedA, typename DerivedQ>
Eigen::Matrix<typename DerivedA::Scalar, DerivedA::RowsAtCompileTime, DerivedA::ColsAtCompileTime>
solve_continuous_lyapunov(const Eigen::MatrixBase<DerivedA>& A,
                          const Eigen::MatrixBase<DerivedQ>& Q) {
  using Scalar = typename DerivedA::Scalar;
  using Real = typename Eigen::NumTraits<Scalar>::Real;
  using Complex = std::complex<Real>;
  using ComplexMatrix = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic>;
  using Result = Eigen::Matrix<Scalar, DerivedA::RowsAtCompileTime, DerivedA::ColsAtCompileTime>;

  const Eigen::Index n = A.rows();
  if (A.cols() != n || Q.rows() != n || Q.cols() != n) {
    throw SolveError("solve_continuous_lyapunov: A and Q must be square and of equal size");
  }

  const ComplexMatrix Ac = A.template cast<Complex>();
  Eigen::ComplexSchur<ComplexMatrix> schur(Ac);
  if (schur.info() != Eigen::Success) throw SolveError("solve_continuous_lyapunov: Schur failed");
  const ComplexMatrix& T = schur.matrixT();
  const ComplexMatrix& U = schur.matrixU();

  const ComplexMatrix C = -(U.adjoint() * Q.template cast<Complex>() * U.conjugate());
  ComplexMatrix Y = ComplexMatrix::Zero(n, n);
  const Real scale = T.cwiseAbs().maxCoeff() + Real(1);
  for (Eigen::Index j = n - 1; j >= 0; --j) {
    Eigen::Matrix<Complex, Eigen::Dynamic, 1> rhs = C.col(j);
    for (Eigen::Index k = j + 1; k < n; ++k) rhs -= T(j, k) * Y.col(k);
    ComplexMatrix shifted = T;
    shifted.diagonal().array() += T(j, j);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (std::abs(shifted(i, i)) <= Real(1e3) * Eigen::NumTraits<Real>::epsilon() * scale) {
        throw SolveError("solve_continuous_lyapunov: eigenvalues sum to zero, solution not unique");
      }
    }
    Y.col(j) = shifted.template triangularView<Eigen::Upper>().solve(rhs);
  }
  const ComplexMatrix X = U * Y * U.transpose();
  if constexpr (internal::is_complex<Scalar>::value) {
    return Result(X);
  } else {
    return Result(X.real());
  }
}

}  // namespace cvtele
