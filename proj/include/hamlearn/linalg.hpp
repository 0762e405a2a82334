#pragma once

#include <functional>

#include <Eigen/Dense>

namespace hamlearn {

using Matrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

inline Matrix hermitian_part(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

/// Spectral function of a Hermitian matrix: V f(diag) V^dagger.
Matrix hermitian_function(const Matrix& a, const std::function<double(double)>& f);

/// Ascending eigenvalues of the Hermitian part of `a`.
Vector hermitian_eigenvalues(const Matrix& a);

double min_eigenvalue(const Matrix& a);
double max_abs_eigenvalue(const Matrix& a);

/// Hermitian r x r to real symmetric 2r x 2r: [[Re, -Im], [Im, Re]].
RealMatrix real_embedding(const Matrix& a);

/// Inverse of `real_embedding` up to the adjoint map of the trace pairing:
/// tr(real_embedding(A) X) = Re tr(A Z) for the returned Z.
Matrix complex_from_embedding(const RealMatrix& x);

}  // namespace hamlearn
