#include "hamlearn/gns_moments.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include <Eigen/Eigenvalues>

#include "hamlearn/error.hpp"

namespace hamlearn {

namespace {

/// raw_gram(i, j) = omega(b_i b_j); Pauli strings are selfadjoint.
Matrix raw_gram(const ExpectationTable& table, const std::vector<PauliString>& b) {
  const auto r = static_cast<Eigen::Index>(b.size());
  Matrix g(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      g(i, j) = table.value(multiply(b[static_cast<std::size_t>(i)], b[static_cast<std::size_t>(j)]));
    }
  }
  return g;
}

/// K(k, l) = omega(b_k [h, b_l]) in the raw basis.
Matrix commutator_moments(const ExpectationTable& table, const std::vector<PauliString>& b,
                          const PauliOperator& h) {
  const auto r = static_cast<Eigen::Index>(b.size());
  Matrix k = Matrix::Zero(r, r);
  for (Eigen::Index l = 0; l < r; ++l) {
    const auto comm = commutator(h, PauliOperator(b[static_cast<std::size_t>(l)]));
    if (comm.is_zero()) continue;
    for (Eigen::Index i = 0; i < r; ++i) {
      std::complex<double> acc{};
      for (const auto& [p, c] : comm.terms()) {
        acc += c * table.value(multiply(b[static_cast<std::size_t>(i)], p));
      }
      k(i, l) = acc;
    }
  }
  return k;
}

HamiltonianMatrix compress(const Matrix& k, const Matrix& coeffs) {
  HamiltonianMatrix out;
  out.raw = coeffs.adjoint() * k * coeffs;
  out.symmetrized = hermitian_part(out.raw);
  return out;
}

}  // namespace

Matrix gram_matrix(const ExpectationTable& table, const std::vector<PauliString>& b) {
  return hermitian_part(raw_gram(table, b));
}

OrthoBasis orthonormalize(const Matrix& gram, double gram_floor_rel,
                          std::vector<PauliString> basis) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(gram));
  const Vector& evals = es.eigenvalues();
  const double top = evals.size() ? evals.maxCoeff() : 0.0;
  const double floor = gram_floor_rel * std::max(top, 0.0);
  std::vector<double> bad;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (!(evals(i) > floor)) bad.push_back(evals(i));
  }
  if (!bad.empty() || top <= 0.0) {
    throw GramDegenerate("Gram matrix of the perturbing operators is not positive definite (" +
                             std::to_string(bad.size()) + " eigenvalues at or below the floor)",
                         bad);
  }
  OrthoBasis out;
  const Vector inv_sqrt = evals.array().rsqrt();
  out.coeffs = es.eigenvectors() * inv_sqrt.asDiagonal() * es.eigenvectors().adjoint();
  out.gram_eigenvalues = evals.reverse();
  out.basis = std::move(basis);
  return out;
}

Matrix build_delta(const ExpectationTable& table, const OrthoBasis& ortho) {
  // omega(b_l b_k^*) = raw_gram(l, k)
  const Matrix d = raw_gram(table, ortho.basis).transpose();
  return hermitian_part(ortho.coeffs.adjoint() * d * ortho.coeffs);
}

HamiltonianMatrix build_h_matrix(const ExpectationTable& table, const OrthoBasis& ortho,
                                 const PauliOperator& h) {
  return compress(commutator_moments(table, ortho.basis, h), ortho.coeffs);
}

std::vector<HamiltonianMatrix> build_h_matrices(const ExpectationTable& table,
                                                const OrthoBasis& ortho,
                                                const std::vector<PauliOperator>& h_terms,
                                                Execution exec) {
  std::vector<HamiltonianMatrix> out(h_terms.size());
  const auto s = static_cast<std::ptrdiff_t>(h_terms.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t a = 0; a < s; ++a) {
      const auto idx = static_cast<std::size_t>(a);
      out[idx] = build_h_matrix(table, ortho, h_terms[idx]);
    }
    return out;
  }
  // Exceptions cannot cross the OpenMP region; rethrow the first one after.
  std::exception_ptr failure;
#pragma omp parallel for schedule(dynamic)
  for (std::ptrdiff_t a = 0; a < s; ++a) {
    const auto idx = static_cast<std::size_t>(a);
    try {
      out[idx] = build_h_matrix(table, ortho, h_terms[idx]);
    } catch (...) {
#pragma omp critical
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

QuasiSymmetryMatrix build_w(const std::vector<Matrix>& raw_h_mats) {
  const auto s = static_cast<Eigen::Index>(raw_h_mats.size());
  std::vector<Matrix> anti(raw_h_mats.size());
  for (std::size_t a = 0; a < raw_h_mats.size(); ++a) {
    anti[a] = raw_h_mats[a] - raw_h_mats[a].adjoint();
  }
  QuasiSymmetryMatrix out;
  out.w = Matrix::Zero(s, s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) {
      // tr(X^dagger Y) = sum conj(X) .* Y
      const auto& fa = anti[static_cast<std::size_t>(a)];
      const auto& fb = anti[static_cast<std::size_t>(b)];
      out.w(a, b) = (fa.conjugate().array() * fb.array()).sum();
    }
  }
  if (s > 0) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (out.w.real() + out.w.real().transpose()),
                                                 Eigen::EigenvaluesOnly);
    out.spectrum = es.eigenvalues().unaryExpr([](double v) { return (v < 0.0 && v > -1e-12) ? 0.0 : v; });
  }
  return out;
}

double epsilon_w(double sigma_noise, double m) {
  // Same as 400 max(sigma^2 sqrt(m), 1e-11); this order rounds the two reference points exactly.
  return std::max(400.0 * std::sqrt(m) * sigma_noise * sigma_noise, 4e-9);
}

std::size_t count_commutator_terms(const std::vector<PauliString>& b,
                                   const std::vector<PauliOperator>& h_terms) {
  std::size_t pairs = 0;
  for (const auto& h : h_terms) {
    for (const auto& bj : b) {
      if (!commutator(h, PauliOperator(bj)).is_zero()) ++pairs;
    }
  }
  return pairs * b.size();
}

KernelBasis kernel_basis(const QuasiSymmetryMatrix& w, double epsilon,
                         const std::vector<Matrix>& symmetrized_h_mats,
                         const std::vector<double>& h_expectations) {
  const auto s = w.w.rows();
  KernelBasis out;
  if (s == 0) {
    out.coeffs = RealMatrix(0, 0);
    return out;
  }
  const RealMatrix re = 0.5 * (w.w.real() + w.w.real().transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> es(re);
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s; ++i) {
    if (es.eigenvalues()(i) < epsilon) keep.push_back(i);
  }
  const auto q = static_cast<Eigen::Index>(keep.size());
  out.coeffs = RealMatrix(q, s);
  for (Eigen::Index a = 0; a < q; ++a) {
    Vector v = es.eigenvectors().col(keep[static_cast<std::size_t>(a)]);
    // Fix the sign so the largest component is positive.
    Eigen::Index arg = 0;
    v.cwiseAbs().maxCoeff(&arg);
    if (v(arg) < 0) v = -v;
    out.coeffs.row(a) = v.transpose();
  }
  const Eigen::Index r = symmetrized_h_mats.empty() ? 0 : symmetrized_h_mats.front().rows();
  for (Eigen::Index a = 0; a < q; ++a) {
    Matrix m = Matrix::Zero(r, r);
    double e = 0.0;
    for (Eigen::Index b = 0; b < s; ++b) {
      const double c = out.coeffs(a, b);
      m += c * symmetrized_h_mats[static_cast<std::size_t>(b)];
      e += c * h_expectations[static_cast<std::size_t>(b)];
    }
    out.h_tilde_mats.push_back(hermitian_part(m));
    out.h_tilde_expectations.push_back(e);
  }
  return out;
}

MomentSet compute_moments(const ExpectationTable& table, const std::vector<PauliString>& b,
                          const std::vector<PauliOperator>& h_terms,
                          const MomentOptions& options) {
  if (b.empty()) throw ContractError("perturbing operator basis is empty");
  if (h_terms.empty()) throw ContractError("no variational Hamiltonian terms");
  for (const auto& h : h_terms) {
    if (!h.is_selfadjoint()) throw ContractError("Hamiltonian terms must be selfadjoint");
  }
  MomentSet out;
  out.ortho = orthonormalize(gram_matrix(table, b), options.gram_floor_rel, b);
  out.delta = build_delta(table, out.ortho);
  out.h_mats = build_h_matrices(table, out.ortho, h_terms, options.exec);
  std::vector<Matrix> raw, sym;
  raw.reserve(h_terms.size());
  sym.reserve(h_terms.size());
  for (const auto& hm : out.h_mats) {
    raw.push_back(hm.raw);
    sym.push_back(hm.symmetrized);
  }
  for (const auto& h : h_terms) out.h_expectations.push_back(table.value(h).real());
  out.w = build_w(raw);
  out.commutator_terms = count_commutator_terms(b, h_terms);
  out.epsilon_w = options.epsilon_w_override
                      ? *options.epsilon_w_override
                      : epsilon_w(table.sigma_noise(), static_cast<double>(out.commutator_terms));
  out.kernel = kernel_basis(out.w, out.epsilon_w, sym, out.h_expectations);
  return out;
}

void write_spectrum_csv(std::ostream& os, const Vector& spectrum) {
  os << "index,eigenvalue\n";
  for (Eigen::Index i = 0; i < spectrum.size(); ++i) {
    os << i << ',' << format_double(spectrum(i)) << '\n';
  }
}

}  // namespace hamlearn
