#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hamlearn/gns_moments.hpp"
#include "hamlearn/sdp.hpp"

namespace hamlearn {

enum class Verdict { NotStationary, NotGibbs, Candidate };

std::string to_string(Verdict v);

struct ReconstructOptions {
  double gram_floor_rel = 1e-10;
  std::optional<double> epsilon_w_override;
  /// Drop the non-positive eigenspace of Delta instead of failing.
  bool project_delta = false;
  double delta_eig_floor = 0.0;
  /// NotGibbs when mu* < -certificate_tol_rel * ||L0||.
  double certificate_tol_rel = 1e-6;
  SdpMode mode = SdpMode::Normalized;
  SdpOptions sdp;
  Execution exec = Execution::Parallel;
};

struct Diagnostics {
  std::size_t r = 0;
  std::size_t s = 0;
  std::size_t q = 0;
  double epsilon_w = 0.0;
  std::size_t commutator_terms = 0;
  Vector w_spectrum;
  Vector gram_spectrum;
  double delta_min_eigenvalue = 0.0;
  std::size_t reduced_dimension = 0;
  double l0_norm = 0.0;
  double certificate_tol = 0.0;
  std::string sdp_status;
  int sdp_iterations = 0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  double gap_residual = 0.0;
  /// Optimum at T* = 0, physically degenerate.
  bool zero_temperature = false;
};

struct ReconstructionResult {
  Verdict verdict = Verdict::NotStationary;
  /// Coefficients in the original h_alpha basis.
  Vector y_star;
  double temperature = 0.0;
  double mu_star = 0.0;
  Diagnostics diagnostics;
};

/// Gram -> moments -> kernel of W -> log Delta -> SDP.
/// Throws GramDegenerate, DeltaNotPositive and NormalizationDegenerate.
ReconstructionResult reconstruct(const ExpectationTable& table, const std::vector<PauliString>& b,
                                 const std::vector<PauliOperator>& h_terms,
                                 const ReconstructOptions& options = {});

/// arccos(|<y, z>| / (|y| |z|)), in [0, pi/2].
double recovery_angle(const Vector& y, const Vector& z);

struct TemperatureRatio {
  double ratio = 0.0;
  /// Least-squares scale, y ~ c z.
  double scale = 0.0;
  bool reliable = true;
};

TemperatureRatio temperature_ratio(const Vector& y_star, double t_star, const Vector& z_true,
                                   double t_true);

/// "key = value" lines with stable field names.
void write_result(std::ostream& os, const ReconstructionResult& result);

}  // namespace hamlearn
