#include "hamlearn/state_oracle.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "hamlearn/error.hpp"

namespace hamlearn {

// ---------------------------------------------------------------------------
// DensityMatrix

DensityMatrix::DensityMatrix(int n, Matrix rho, double tol) : n_(n), rho_(std::move(rho)) {
  const Eigen::Index dim = Eigen::Index{1} << n;
  if (rho_.rows() != dim || rho_.cols() != dim) {
    throw DimensionError("density matrix is not 2^n x 2^n");
  }
  if ((rho_ - rho_.adjoint()).cwiseAbs().maxCoeff() > tol) {
    throw ContractError("density matrix is not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > tol) {
    throw ContractError("density matrix trace differs from 1");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(rho_));
  eigenvalues_ = es.eigenvalues();
  eigenvectors_ = es.eigenvectors();
  if (eigenvalues_.minCoeff() < -tol) {
    throw ContractError("density matrix has a negative eigenvalue");
  }
}

DensityMatrix::DensityMatrix(int n, Matrix rho, Vector evals, Matrix evecs)
    : n_(n), rho_(std::move(rho)), eigenvalues_(std::move(evals)), eigenvectors_(std::move(evecs)) {}

Matrix DensityMatrix::log() const {
  if (!is_faithful()) throw ContractError("log of a non-faithful density matrix");
  const Vector logs = eigenvalues_.array().log();
  return eigenvectors_ * logs.asDiagonal() * eigenvectors_.adjoint();
}

DensityMatrix gibbs_density(const PauliOperator& h, double temperature) {
  if (!(temperature > 0.0)) throw ContractError("temperature must be positive");
  if (!h.is_selfadjoint()) throw ContractError("Hamiltonian must be selfadjoint");
  const int n = h.num_sites();
  Eigen::SelfAdjointEigenSolver<Matrix> es(dense_matrix(h));
  const Vector& energies = es.eigenvalues();
  const double e0 = energies.minCoeff();
  Vector weights = ((energies.array() - e0) * (-1.0 / temperature)).exp();
  weights /= weights.sum();
  Matrix rho = es.eigenvectors() * weights.asDiagonal() * es.eigenvectors().adjoint();
  rho = hermitian_part(rho);
  return DensityMatrix(n, std::move(rho), std::move(weights), es.eigenvectors());
}

double expectation(const DensityMatrix& rho, const PauliString& p) {
  if (p.num_sites() != rho.num_sites()) throw DimensionError("site count mismatch");
  const PauliString one[] = {p};
  return expectation_kernel(rho.matrix(), one, Execution::Serial).front();
}

// ---------------------------------------------------------------------------
// ExpectationTable

ExpectationTable::ExpectationTable(int n) : n_(n) { values_.emplace(PauliString(n), 1.0); }

void ExpectationTable::set_noise_metadata(double sigma, std::optional<std::uint64_t> seed) {
  sigma_noise_ = sigma;
  seed_ = seed;
}

void ExpectationTable::set(const PauliString& p, double value) {
  if (p.num_sites() != n_) throw DimensionError("site count mismatch");
  if (p.is_identity()) {
    if (value != 1.0) throw ContractError("identity expectation must be exactly 1");
    return;
  }
  values_[p] = value;
}

bool ExpectationTable::contains(const PauliString& p) const { return values_.count(p) != 0; }

double ExpectationTable::value(const PauliString& p) const {
  const auto it = values_.find(p);
  if (it == values_.end()) throw IncompleteDataError(p.to_string());
  return it->second;
}

std::complex<double> ExpectationTable::value(const PauliProduct& prod) const {
  return prod.phase.value() * value(prod.string);
}

std::complex<double> ExpectationTable::value(const PauliOperator& op) const {
  std::complex<double> acc{};
  for (const auto& [p, c] : op.terms()) acc += c * value(p);
  return acc;
}

std::vector<PauliString> ExpectationTable::strings() const {
  std::vector<PauliString> out;
  out.reserve(values_.size());
  for (const auto& kv : values_) out.push_back(kv.first);
  std::sort(out.begin(), out.end());
  return out;
}

bool operator==(const ExpectationTable& a, const ExpectationTable& b) {
  return a.n_ == b.n_ && a.sigma_noise_ == b.sigma_noise_ && a.seed_ == b.seed_ &&
         a.values_ == b.values_;
}

std::set<PauliString> required_strings(const std::vector<PauliString>& b_basis,
                                       const std::vector<PauliOperator>& h_terms) {
  std::set<PauliString> out;
  if (b_basis.empty()) return out;
  const int n = b_basis.front().num_sites();
  out.insert(PauliString(n));
  // Pauli strings are selfadjoint, so b_i^* b_j and b_j b_i^* are both
  // products of two basis strings.
  for (const auto& bi : b_basis) {
    for (const auto& bj : b_basis) out.insert(multiply(bi, bj).string);
  }
  for (const auto& h : h_terms) {
    for (const auto& [p, c] : h.terms()) out.insert(p);
    for (const auto& bj : b_basis) {
      const auto comm = commutator(h, PauliOperator(bj));
      for (const auto& [p, c] : comm.terms()) {
        for (const auto& bi : b_basis) out.insert(multiply(bi, p).string);
      }
    }
  }
  return out;
}

ExpectationTable build_table(const DensityMatrix& rho, const std::set<PauliString>& strings,
                             Execution exec) {
  const std::vector<PauliString> ordered(strings.begin(), strings.end());
  const auto values = expectation_kernel(rho.matrix(), ordered, exec);
  ExpectationTable table(rho.num_sites());
  for (std::size_t k = 0; k < ordered.size(); ++k) {
    if (ordered[k].is_identity()) continue;
    table.set(ordered[k], values[k]);
  }
  return table;
}

ExpectationTable add_noise(const ExpectationTable& table, double sigma, std::uint64_t seed) {
  if (!(sigma >= 0.0)) throw ContractError("noise standard deviation must be non-negative");
  ExpectationTable out = table;
  if (sigma == 0.0) return out;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (const auto& p : table.strings()) {
    if (p.is_identity()) continue;
    out.set(p, table.value(p) + gauss(rng));
  }
  const double total = std::hypot(table.sigma_noise(), sigma);
  out.set_noise_metadata(total, seed);
  return out;
}

// ---------------------------------------------------------------------------
// Serialization

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

void write_table(std::ostream& os, const ExpectationTable& table) {
  os << "# n = " << table.num_sites() << '\n';
  os << "# sigma_noise = " << format_double(table.sigma_noise()) << '\n';
  os << "# seed = " << (table.seed() ? std::to_string(*table.seed()) : std::string("none"))
     << '\n';
  for (const auto& p : table.strings()) {
    os << p.to_string() << '\t' << format_double(table.value(p)) << '\n';
  }
}

namespace {

double parse_double(std::string_view s, int line) {
  while (!s.empty() && s.front() == ' ') s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\r')) s.remove_suffix(1);
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError("line " + std::to_string(line) + ": bad number '" + std::string(s) + "'");
  }
  return v;
}

}  // namespace

ExpectationTable read_table(std::istream& is) {
  std::string line;
  int lineno = 0;
  std::optional<int> n;
  double sigma = 0.0;
  std::optional<std::uint64_t> seed;
  std::optional<ExpectationTable> table;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    if (line.front() == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = line.substr(1, eq - 1);
      key.erase(std::remove(key.begin(), key.end(), ' '), key.end());
      std::string_view value(line);
      value.remove_prefix(eq + 1);
      while (!value.empty() && value.front() == ' ') value.remove_prefix(1);
      while (!value.empty() && (value.back() == ' ' || value.back() == '\r')) value.remove_suffix(1);
      if (key == "n") {
        n = static_cast<int>(parse_double(value, lineno));
      } else if (key == "sigma_noise") {
        sigma = parse_double(value, lineno);
      } else if (key == "seed") {
        if (value != "none") {
          std::uint64_t s = 0;
          auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), s);
          if (ec != std::errc()) throw ParseError("line " + std::to_string(lineno) + ": bad seed");
          seed = s;
        }
      }
      continue;
    }
    if (!n) throw ParseError("line " + std::to_string(lineno) + ": entry before '# n =' header");
    if (!table) table.emplace(*n);
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw ParseError("line " + std::to_string(lineno) + ": expected PAULI<TAB>value");
    }
    PauliString p = [&] {
      try {
        return PauliString::parse(std::string_view(line).substr(0, tab), *n);
      } catch (const ParseError& e) {
        throw ParseError("line " + std::to_string(lineno) + ": " + e.what());
      }
    }();
    const double v = parse_double(std::string_view(line).substr(tab + 1), lineno);
    if (p.is_identity() && v != 1.0) {
      throw ParseError("line " + std::to_string(lineno) + ": identity entry must be 1");
    }
    table->set(p, v);
  }
  if (!n) throw ParseError("missing '# n =' header");
  if (!table) table.emplace(*n);
  table->set_noise_metadata(sigma, seed);
  return *table;
}

void save_table(const std::string& path, const ExpectationTable& table) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open '" + path + "' for writing");
  write_table(os, table);
  if (!os) throw Error("write to '" + path + "' failed");
}

ExpectationTable load_table(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return read_table(is);
}

}  // namespace hamlearn
