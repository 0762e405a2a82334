#include "hamlearn/linalg.hpp"

#include <Eigen/Eigenvalues>

namespace hamlearn {

Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a));
  Vector mapped = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * mapped.asDiagonal() * es.eigenvectors().adjoint();
}

Vector hermitian_eigenvalues(const Matrix& a) {
  if (a.rows() == 0) return Vector();
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(a), Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

double min_eigenvalue(const Matrix& a) { return hermitian_eigenvalues(a).minCoeff(); }

double max_abs_eigenvalue(const Matrix& a) {
  return hermitian_eigenvalues(a).cwiseAbs().maxCoeff();
}

RealMatrix real_embedding(const Matrix& a) {
  const auto r = a.rows();
  RealMatrix out(2 * r, 2 * r);
  out.topLeftCorner(r, r) = a.real();
  out.topRightCorner(r, r) = -a.imag();
  out.bottomLeftCorner(r, r) = a.imag();
  out.bottomRightCorner(r, r) = a.real();
  return out;
}

Matrix complex_from_embedding(const RealMatrix& x) {
  const auto r = x.rows() / 2;
  Matrix z(r, r);
  z.real() = x.topLeftCorner(r, r) + x.bottomRightCorner(r, r);
  z.imag() = x.bottomLeftCorner(r, r) - x.topRightCorner(r, r);
  return z;
}

}  // namespace hamlearn
