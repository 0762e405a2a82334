#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "hamlearn/kernels.hpp"
#include "hamlearn/linalg.hpp"
#include "hamlearn/pauli.hpp"

namespace hamlearn {

/// Hermitian, unit-trace, positive semidefinite 2^n x 2^n matrix. Gibbs states
/// carry their spectral decomposition so log(rho) is available exactly.
class DensityMatrix {
 public:
  /// Validates Hermiticity, trace and positivity to `tol`.
  DensityMatrix(int n, Matrix rho, double tol = 1e-10);

  int num_sites() const noexcept { return n_; }
  const Matrix& matrix() const noexcept { return rho_; }
  /// Ascending eigenvalues / matching eigenvectors.
  const Vector& eigenvalues() const noexcept { return eigenvalues_; }
  const Matrix& eigenvectors() const noexcept { return eigenvectors_; }
  bool is_faithful(double floor = 0.0) const { return eigenvalues_.minCoeff() > floor; }
  Matrix log() const;

 private:
  friend DensityMatrix gibbs_density(const PauliOperator& h, double temperature);
  DensityMatrix(int n, Matrix rho, Vector evals, Matrix evecs);

  int n_;
  Matrix rho_;
  Vector eigenvalues_;
  Matrix eigenvectors_;
};

/// e^{-h/T} / tr e^{-h/T} via Hermitian diagonalization of dense(h), with the
/// spectrum shifted by its minimum before exponentiating.
DensityMatrix gibbs_density(const PauliOperator& h, double temperature);

double expectation(const DensityMatrix& rho, const PauliString& p);

/// Expectation values keyed by Pauli string. The identity is always 1 and is
/// never noised.
class ExpectationTable {
 public:
  explicit ExpectationTable(int n);

  int num_sites() const noexcept { return n_; }
  double sigma_noise() const noexcept { return sigma_noise_; }
  std::optional<std::uint64_t> seed() const noexcept { return seed_; }
  void set_noise_metadata(double sigma, std::optional<std::uint64_t> seed);

  void set(const PauliString& p, double value);
  bool contains(const PauliString& p) const;
  /// Throws IncompleteDataError if absent.
  double value(const PauliString& p) const;
  /// omega(c * p) for a phased product.
  std::complex<double> value(const PauliProduct& prod) const;
  std::complex<double> value(const PauliOperator& op) const;

  std::size_t size() const noexcept { return values_.size(); }
  /// Strings in canonical order.
  std::vector<PauliString> strings() const;

  friend bool operator==(const ExpectationTable& a, const ExpectationTable& b);

 private:
  int n_;
  double sigma_noise_ = 0.0;
  std::optional<std::uint64_t> seed_;
  std::unordered_map<PauliString, double, PauliStringHash> values_;
};

/// Every string whose expectation is needed to assemble the Gram matrix, the
/// compressed modular operator, the commutator matrices and omega(h_alpha).
std::set<PauliString> required_strings(const std::vector<PauliString>& b_basis,
                                       const std::vector<PauliOperator>& h_terms);

ExpectationTable build_table(const DensityMatrix& rho, const std::set<PauliString>& strings,
                             Execution exec = Execution::Parallel);

/// Adds an independent N(0, sigma^2) draw to every non-identity entry. Draws
/// are taken in canonical string order from a generator seeded with `seed`.
ExpectationTable add_noise(const ExpectationTable& table, double sigma, std::uint64_t seed);

/// Text format: "# n = ", "# sigma_noise = ", "# seed = " header lines, then
/// one "PAULI<TAB>value" line per entry in canonical order, shortest
/// round-trip decimal.
void write_table(std::ostream& os, const ExpectationTable& table);
ExpectationTable read_table(std::istream& is);
void save_table(const std::string& path, const ExpectationTable& table);
ExpectationTable load_table(const std::string& path);

/// Shortest decimal representation that round-trips.
std::string format_double(double v);

}  // namespace hamlearn
