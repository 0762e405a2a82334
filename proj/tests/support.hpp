#pragma once

// Shared helpers for the test binaries: random instances and brute-force
// oracles that do not go through the library code paths they check.

#include <cmath>
#include <complex>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "hamlearn/pauli.hpp"

namespace testing {

using Cd = std::complex<double>;
using Mat = Eigen::MatrixXcd;

inline Mat random_complex(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Mat m(r, c);
  for (Eigen::Index i = 0; i < r; ++i)
    for (Eigen::Index j = 0; j < c; ++j) m(i, j) = Cd(g(rng), g(rng));
  return m;
}

inline Mat random_hermitian(Eigen::Index r, std::mt19937_64& rng) {
  const Mat a = random_complex(r, r, rng);
  return 0.5 * (a + a.adjoint());
}

/// Positive definite, unit trace.
inline Mat random_density(Eigen::Index r, std::mt19937_64& rng, double floor = 0.05) {
  const Mat a = random_complex(r, r, rng);
  Mat rho = a * a.adjoint() + floor * Mat::Identity(r, r);
  return rho / rho.trace().real();
}

inline double lambda_min(const Mat& a) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()), Eigen::EigenvaluesOnly);
  return es.eigenvalues()(0);
}

/// Spectral function by direct eigendecomposition.
inline Mat spectral(const Mat& a, const std::function<double(double)>& f) {
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (a + a.adjoint()));
  Eigen::VectorXd v = es.eigenvalues().unaryExpr(f);
  return es.eigenvectors() * v.asDiagonal() * es.eigenvectors().adjoint();
}

/// Maximizer of a concave function on [a, b] by golden-section search.
inline std::pair<double, double> golden_max(const std::function<double(double)>& f, double a,
                                            double b, int iters = 90) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - g * (b - a), x2 = a + g * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int k = 0; k < iters; ++k) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + g * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - g * (b - a);
      f1 = f(x1);
    }
  }
  const double x = 0.5 * (a + b);
  return {x, f(x)};
}

/// Random real coefficients on the geometric k-local basis, rescaled so the
/// spectral width of h equals n (order one energy per site).
struct RandomHamiltonian {
  std::vector<hamlearn::PauliString> basis;
  std::vector<double> coeffs;
  hamlearn::PauliOperator op;
};

inline RandomHamiltonian random_local_hamiltonian(int n, int k, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  RandomHamiltonian out{hamlearn::enumerate_geometric_k_local(n, k), {}, hamlearn::PauliOperator(n)};
  std::vector<double> raw;
  hamlearn::PauliOperator h(n);
  for (const auto& p : out.basis) {
    raw.push_back(g(rng));
    h.add_term(p, raw.back());
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(hamlearn::dense_matrix(h), Eigen::EigenvaluesOnly);
  const double width = es.eigenvalues().maxCoeff() - es.eigenvalues().minCoeff();
  for (std::size_t k = 0; k < raw.size(); ++k) {
    out.coeffs.push_back(raw[k] * n / width);
    out.op.add_term(out.basis[k], out.coeffs.back());
  }
  return out;
}

/// Single-string operators, one per basis element.
inline std::vector<hamlearn::PauliOperator> as_terms(const std::vector<hamlearn::PauliString>& b) {
  std::vector<hamlearn::PauliOperator> out;
  for (const auto& p : b) out.emplace_back(p);
  return out;
}

}  // namespace testing
