#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "hamlearn/kernels.hpp"
#include "hamlearn/linalg.hpp"
#include "hamlearn/pauli.hpp"
#include "hamlearn/state_oracle.hpp"

namespace hamlearn {

/// Operators a_j = sum_k coeffs(k, j) b_k, orthonormal in the state's Gram
/// form: coeffs^dagger G coeffs = I. coeffs is the inverse square root of G.
struct OrthoBasis {
  Matrix coeffs;
  /// Descending.
  Vector gram_eigenvalues;
  std::vector<PauliString> basis;
};

/// G_ij = omega(b_i^* b_j), Hermitian part.
Matrix gram_matrix(const ExpectationTable& table, const std::vector<PauliString>& b);

/// Throws GramDegenerate when an eigenvalue is <= gram_floor_rel * lambda_max.
OrthoBasis orthonormalize(const Matrix& gram, double gram_floor_rel = 1e-10,
                          std::vector<PauliString> basis = {});

/// Delta_ij = omega(a_j a_i^*), Hermitian part.
Matrix build_delta(const ExpectationTable& table, const OrthoBasis& ortho);

struct HamiltonianMatrix {
  /// omega(a_i^* [h, a_j]) as measured.
  Matrix raw;
  /// (raw + raw^dagger) / 2.
  Matrix symmetrized;
};

HamiltonianMatrix build_h_matrix(const ExpectationTable& table, const OrthoBasis& ortho,
                                 const PauliOperator& h);

/// All commutator matrices at once; each term is assembled independently so the
/// parallel path matches the serial one bit for bit.
std::vector<HamiltonianMatrix> build_h_matrices(const ExpectationTable& table,
                                                const OrthoBasis& ortho,
                                                const std::vector<PauliOperator>& h_terms,
                                                Execution exec = Execution::Parallel);

struct QuasiSymmetryMatrix {
  /// W_ab = tr((H_a^dagger - H_a)(H_b - H_b^dagger)).
  Matrix w;
  /// Ascending eigenvalues of Re W, dust in (-1e-12, 0) clipped to 0.
  Vector spectrum;
};

QuasiSymmetryMatrix build_w(const std::vector<Matrix>& raw_h_mats);

/// 400 max(sigma^2 sqrt(m), 1e-11).
double epsilon_w(double sigma_noise, double m);

/// r times the number of (alpha, j) with [h_alpha, b_j] != 0.
std::size_t count_commutator_terms(const std::vector<PauliString>& b,
                                   const std::vector<PauliOperator>& h_terms);

struct KernelBasis {
  /// q x s, rows are orthonormal real coefficient vectors of h~_alpha.
  RealMatrix coeffs;
  std::vector<Matrix> h_tilde_mats;
  std::vector<double> h_tilde_expectations;
  std::size_t dimension() const noexcept { return static_cast<std::size_t>(coeffs.rows()); }
};

/// Eigenvectors of Re W with eigenvalue below epsilon. An empty kernel is a
/// verdict (the state is stationary for nothing in the span), not an error.
KernelBasis kernel_basis(const QuasiSymmetryMatrix& w, double epsilon,
                         const std::vector<Matrix>& symmetrized_h_mats,
                         const std::vector<double>& h_expectations);

struct MomentOptions {
  double gram_floor_rel = 1e-10;
  std::optional<double> epsilon_w_override;
  Execution exec = Execution::Parallel;
};

struct MomentSet {
  OrthoBasis ortho;
  Matrix delta;
  std::vector<HamiltonianMatrix> h_mats;
  std::vector<double> h_expectations;
  QuasiSymmetryMatrix w;
  KernelBasis kernel;
  double epsilon_w = 0.0;
  std::size_t commutator_terms = 0;
};

MomentSet compute_moments(const ExpectationTable& table, const std::vector<PauliString>& b,
                          const std::vector<PauliOperator>& h_terms,
                          const MomentOptions& options = {});

/// "index,eigenvalue" CSV with a header line.
void write_spectrum_csv(std::ostream& os, const Vector& spectrum);

}  // namespace hamlearn
