#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "hamlearn/linalg.hpp"
#include "hamlearn/pauli.hpp"

namespace hamlearn {

using CVector = Eigen::VectorXcd;

/// Explicit GNS space of a faithful density matrix, small n only.
///
/// Vectors |a> are stored as vec(a) (column-major), so the GNS inner product
/// is <a|b> = vec(a)^dagger G vec(b) with G = rho^T (x) I. Operators on the GNS
/// space are matrices acting on vec coordinates.
class GnsSpace {
 public:
  static constexpr int kMaxSites = 4;

  /// Throws ContractError on a non-Hermitian, non-unit-trace or non-faithful
  /// rho and ResourceError past kMaxSites.
  explicit GnsSpace(const Matrix& rho, double tol = 1e-10);

  int num_sites() const noexcept { return n_; }
  Eigen::Index hilbert_dim() const noexcept { return rho_.rows(); }
  Eigen::Index dim() const noexcept { return rho_.rows() * rho_.rows(); }

  const Matrix& rho() const noexcept { return rho_; }
  const Matrix& log_rho() const noexcept { return log_rho_; }
  const Matrix& gram() const noexcept { return gram_; }

  static CVector vec(const Matrix& a);
  Matrix unvec(const CVector& v) const;

  /// |b> -> |a b>.
  Matrix left(const Matrix& a) const;
  /// |b> -> |b a^*>.
  Matrix right(const Matrix& a) const;
  /// pi_l(h) - pi_r(h).
  Matrix hamiltonian(const Matrix& h) const;

  /// pi_l(rho) pi_r(rho^-1).
  const Matrix& delta() const noexcept { return delta_; }
  /// pi_l(log rho) - pi_r(log rho).
  const Matrix& log_delta() const noexcept { return log_delta_; }
  /// From the sesquilinear form <a|Delta|b> = omega(b a^*) on matrix units.
  Matrix delta_from_form() const;

  std::complex<double> inner(const Matrix& a, const Matrix& b) const;
  /// <a|X|b> for an operator X in vec coordinates.
  std::complex<double> element(const Matrix& a, const Matrix& x, const Matrix& b) const;
  /// Hilbert-space adjoint: G^-1 X^dagger G.
  Matrix adjoint(const Matrix& x) const;
  /// G^{1/2} X G^{-1/2}, where the GNS adjoint is the ordinary adjoint.
  Matrix to_orthonormal(const Matrix& x) const;
  Matrix from_orthonormal(const Matrix& x) const;

  /// J|a> = |rho^{1/2} a^* rho^{-1/2}>, antilinear.
  CVector apply_j(const CVector& v) const;

  /// Matrix of X on span{|b_i>} in an orthonormal basis |a_j> = sum_k C_kj |b_k>
  /// with C = (V^dagger G V)^{-1/2}: entries <a_i|X|a_j>.
  Matrix compress(const Matrix& x, const std::vector<Matrix>& b) const;

 private:
  int n_;
  Matrix rho_;
  Matrix log_rho_;
  Matrix rho_sqrt_;
  Matrix rho_inv_sqrt_;
  Matrix gram_;
  Matrix gram_sqrt_;
  Matrix gram_inv_sqrt_;
  Matrix delta_;
  Matrix log_delta_;
};

GnsSpace build_gns(const Matrix& rho);

/// Dense Pauli expansion: sum_p tr(p X) / 2^n p.
PauliOperator pauli_decompose(const Matrix& x, int n, double drop_below = 1e-14);

std::vector<Matrix> dense_all(const std::vector<PauliString>& b);

struct LindbladSpec {
  std::vector<PauliOperator> b_ops;
  /// Anti-Hermitian.
  Matrix m;
  /// Positive semidefinite.
  Matrix lambda;

  /// Throws ContractError when M is not anti-Hermitian or Lambda has a
  /// negative eigenvalue beyond tol.
  void validate(double tol = 1e-10) const;
};

/// L(a) from the defining formula on dense matrices.
Matrix lindblad_apply(const LindbladSpec& spec, const Matrix& a);
PauliOperator lindblad_apply(const LindbladSpec& spec, const PauliOperator& a);

/// vec(L(a)) = L_hat vec(a).
Matrix lindblad_superoperator(const LindbladSpec& spec, int n);

/// Density matrix of omega o e^{tL}.
Matrix evolve_density(const Matrix& rho, const LindbladSpec& spec, double t);

double von_neumann_entropy(const Matrix& rho);
double free_energy(const Matrix& rho, const Matrix& h, double temperature);

struct FreeEnergyRate {
  double energy = 0.0;
  double entropy = 0.0;
  /// energy - T entropy.
  double total = 0.0;
};

/// Derivatives at t = 0 from GNS matrix elements of H and log Delta.
FreeEnergyRate free_energy_derivative(const GnsSpace& gns, const Matrix& h, double temperature,
                                      const LindbladSpec& spec);

/// Central finite differences of the evolved state.
FreeEnergyRate free_energy_derivative_fd(const Matrix& rho, const Matrix& h, double temperature,
                                         const LindbladSpec& spec, double step = 1e-5);

struct RtsCheck {
  bool holds = false;
  double min_eigenvalue = 0.0;
  /// Norm of the anti-Hermitian part of P(T log Delta + H)P^dagger.
  double antihermitian_norm = 0.0;
};

RtsCheck check_rts(const GnsSpace& gns, const Matrix& h, double temperature,
                   const std::vector<Matrix>& b, double tol = 1e-9);

struct EebCheck {
  /// lambda_min of T log(P Delta P^dagger) + P H P^dagger (Hermitian part).
  double lhs_min_eigenvalue = 0.0;
  /// lambda_min of P (T log Delta + H) P^dagger (Hermitian part).
  double rhs_min_eigenvalue = 0.0;
  /// lambda_min and norm of log(P Delta P^dagger) - P log(Delta) P^dagger.
  double jensen_gap_min_eigenvalue = 0.0;
  double jensen_gap_norm = 0.0;
  bool jensen_gap_psd = false;
};

EebCheck check_matrix_eeb(const GnsSpace& gns, const Matrix& h, double temperature,
                          const std::vector<Matrix>& b, double tol = 1e-9);

struct QuasiSymmetryCheck {
  bool via_gns = false;
  bool via_commutators = false;
  double gns_residual = 0.0;
  double commutator_residual = 0.0;
  bool agree() const noexcept { return via_gns == via_commutators; }
};

/// P H P^dagger self-adjoint versus omega([b_i^* b_j, h]) = 0 for all i, j.
QuasiSymmetryCheck check_quasisymmetry(const GnsSpace& gns, const Matrix& h,
                                       const std::vector<Matrix>& b, double tol = 1e-9);

/// A random Hermitian h with omega([b_i^* b_j, h]) = 0 for every pair, or the
/// zero matrix when only multiples of the identity qualify.
Matrix random_quasisymmetry(const GnsSpace& gns, const std::vector<Matrix>& b, std::uint64_t seed);

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool passed = false;
};

struct BatteryOptions {
  int n = 2;
  std::uint64_t seed = 1;
  int instances = 1;
  /// Inject a trace error into rho to exercise the failure path.
  double corrupt_trace = 0.0;
};

/// Every GNS, Lindblad and Araki-Sewell check over random faithful states.
/// Dynamics checks run only for n <= 3. Results are aggregated per check by
/// worst residual.
std::vector<CheckResult> run_battery(const BatteryOptions& options);

}  // namespace hamlearn
