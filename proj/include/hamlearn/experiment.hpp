#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "hamlearn/learner.hpp"

namespace hamlearn {

struct ModelConfig {
  enum class Kind { Xxz, Custom };
  Kind kind = Kind::Xxz;
  double anisotropy = 0.5;
  /// Use the printed form with a repeated YY term instead of ZZ.
  bool literal_paper_model = false;
  /// Custom Hamiltonian in PauliOperator text form.
  std::string terms;
};

struct ExperimentConfig {
  int n = 4;
  ModelConfig model;
  std::vector<double> temperatures{1.0};
  std::vector<double> sigma_grid{0.0};
  int runs_per_point = 10;
  int k_local = 2;
  std::uint64_t seed = 1;
  /// Adds the identity to the perturbing operators only.
  bool include_identity = false;
  bool project_delta = false;
  std::optional<double> epsilon_w_override;
  double gram_floor_rel = 1e-10;
  double certificate_tol_rel = 1e-6;

  /// Throws ContractError naming the offending field.
  void validate() const;
};

/// Flat INI: "[section]" headers, "key = value" lines, '#' or ';' comments.
/// Lists are comma separated. Errors carry "<source>:<line>:".
ExperimentConfig parse_config(std::istream& is, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);

/// -sum_i (X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}) on an open chain.
/// `literal` replaces the last term by delta Y_i Y_{i+1}.
PauliOperator xxz_hamiltonian(int n, double anisotropy, bool literal = false);

PauliOperator model_hamiltonian(const ExperimentConfig& config);

struct LearningSetup {
  std::vector<PauliString> b;
  std::vector<PauliString> h_strings;
  std::vector<PauliOperator> h_terms;
  std::set<PauliString> required;
};

LearningSetup make_setup(const ExperimentConfig& config);

/// Coefficients of h on the single-string terms (real parts).
Vector coefficients_on(const PauliOperator& h, const std::vector<PauliString>& terms);

ReconstructOptions reconstruct_options(const ExperimentConfig& config);

/// Noise seed for one sweep job, independent of evaluation order.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sigma_index,
                          std::uint64_t temperature_index, std::uint64_t run_index);

struct SweepRecord {
  double sigma_noise = 0.0;
  double temperature = 0.0;
  int run = 0;
  std::optional<double> theta;
  std::optional<double> temp_ratio;
  std::optional<double> mu_star;
  /// Candidate / NotStationary / NotGibbs, or the error class on failure.
  std::string verdict;
  std::size_t q = 0;
  double wall_ms = 0.0;
  std::string message;
};

/// One record per (sigma, T, run), sorted by that key. Jobs run on OpenMP
/// threads under Execution::Parallel; every record is identical either way.
std::vector<SweepRecord> run_sweep(const ExperimentConfig& config,
                                   Execution exec = Execution::Parallel);

/// sigma_noise,temperature,run,theta,temp_ratio,mu_star,verdict,q,wall_ms
void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records);

struct SweepAggregate {
  double sigma_noise = 0.0;
  double temperature = 0.0;
  int runs = 0;
  int candidates = 0;
  int delta_not_positive = 0;
  int other_failures = 0;
  std::optional<double> theta_mean;
  std::optional<double> theta_std;
  std::optional<double> temp_ratio_mean;
  std::optional<double> temp_ratio_std;
};

std::vector<SweepAggregate> aggregate(const std::vector<SweepRecord>& records);
void write_aggregate_csv(std::ostream& os, const std::vector<SweepAggregate>& rows);

}  // namespace hamlearn
