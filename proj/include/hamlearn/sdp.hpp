#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "hamlearn/linalg.hpp"

namespace hamlearn {

/// `Normalized`:  maximize mu over (y, T >= 0, mu) subject to
///   T L0 + sum_a y_a H~_a - mu I >= 0  and  sum_a y_a omega(h~_a) = -1.
/// `FixedTemperature`: T = 1 and no normalization row.
enum class SdpMode { Normalized, FixedTemperature };

enum class SdpStatus { Optimal, Infeasible, NumericalTrouble };

std::string to_string(SdpStatus s);
std::string to_string(SdpMode m);

struct SdpOptions {
  double feas_tol = 1e-8;
  double gap_tol = 1e-8;
  int max_iterations = 150;
};

struct SdpProblem {
  Matrix l0;
  std::vector<Matrix> h_tilde;
  std::vector<double> h_tilde_expectations;
  SdpMode mode = SdpMode::Normalized;
  SdpOptions options;

  Eigen::Index dim() const noexcept { return l0.rows(); }
  std::size_t num_terms() const noexcept { return h_tilde.size(); }
};

struct KktResiduals {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

struct SdpSolution {
  SdpStatus status = SdpStatus::NumericalTrouble;
  Vector y;
  double temperature = 0.0;
  double mu = 0.0;
  /// Dual certificate: Z >= 0 with tr Z = 1, the multiplier tau >= 0 of
  /// T >= 0, and the multiplier nu of the normalization row (the dual
  /// objective value).
  Matrix dual_matrix;
  double dual_temperature = 0.0;
  double dual_objective = 0.0;
  /// Relative residuals as tracked by the solver.
  KktResiduals residuals;
  int iterations = 0;
};

/// Matrix logarithm of the compressed modular operator, optionally restricted
/// to the span of eigenvectors above the floor.
struct LogDelta {
  Matrix l0;
  /// Columns span the retained eigenspace (identity when nothing is projected).
  Matrix range;
  Vector eigenvalues;
  bool projected = false;
  Eigen::Index reduced_dimension() const noexcept { return l0.rows(); }
};

/// Throws DeltaNotPositive when an eigenvalue is <= eig_floor and `project` is
/// off. With `project`, those eigenvectors are discarded instead.
LogDelta log_psd(const Matrix& delta, double eig_floor = 0.0, bool project = false);

/// range^dagger m range.
Matrix restrict_to(const Matrix& m, const Matrix& range);

/// Throws ContractError on non-Hermitian input and NormalizationDegenerate
/// when every omega(h~_a) vanishes in normalized mode.
SdpSolution solve(const SdpProblem& problem);

/// Residuals recomputed from scratch on the complex Hermitian problem, with a
/// different code path from the solver.
struct ResidualReport {
  double lmi_violation = 0.0;          // max(0, -lambda_min(S))
  double temperature_violation = 0.0;  // max(0, -T)
  double normalization = 0.0;          // |sum y omega + 1|
  double lambda_min_consistency = 0.0; // |lambda_min(T L0 + sum y H~) - mu|
  double dual_trace = 0.0;             // |tr Z - 1|
  double dual_temperature = 0.0;       // |<Z, L0> + tau|
  double dual_stationarity = 0.0;      // max_a |<Z, H~_a> + nu omega_a|
  double dual_psd_violation = 0.0;     // max(0, -lambda_min(Z), -tau)
  double duality_gap = 0.0;            // |nu - mu|
  double complementarity = 0.0;        // |<Z, S>| + |tau T|

  double primal() const;
  double dual() const;
  double gap() const;
  double max() const;
};

ResidualReport check_solution(const SdpProblem& problem, const SdpSolution& solution);

/// Plain-text fixtures: matrices row-major, complex entries as "re im".
void write_problem(std::ostream& os, const SdpProblem& problem);
SdpProblem read_problem(std::istream& is);
void write_solution(std::ostream& os, const SdpSolution& solution);
SdpSolution read_solution(std::istream& is);

}  // namespace hamlearn
