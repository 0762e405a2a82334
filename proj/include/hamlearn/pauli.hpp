#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace hamlearn {

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

char to_char(Pauli p);

/// Exact fourth root of unity, i^k.
struct Phase {
  std::uint8_t k = 0;

  static constexpr Phase one() { return {0}; }
  static constexpr Phase i() { return {1}; }
  static constexpr Phase minus_one() { return {2}; }
  static constexpr Phase minus_i() { return {3}; }

  std::complex<double> value() const;
  std::string to_string() const;

  friend constexpr Phase operator*(Phase a, Phase b) {
    return {static_cast<std::uint8_t>((a.k + b.k) & 3U)};
  }
  friend constexpr bool operator==(Phase a, Phase b) = default;
};

class PauliString;
struct PauliProduct;
PauliProduct multiply(const PauliString& p, const PauliString& q);

/// Tensor product of single-site Paulis on an n-site register.
///
/// Stored in symplectic form: site s carries X^x Z^z times i^{xz}, so
/// (x, z) = (1, 1) is exactly Y. Sites beyond `kMaxSites` are not supported.
class PauliString {
 public:
  static constexpr int kMaxSites = 256;

  explicit PauliString(int n);
  PauliString(int n, std::initializer_list<std::pair<int, Pauli>> letters);

  /// Parses "X0 Z3", "Y2" or "I".
  static PauliString parse(std::string_view text, int n);

  int num_sites() const noexcept { return n_; }
  Pauli at(int site) const;
  void set(int site, Pauli p);

  bool is_identity() const noexcept;
  int weight() const noexcept;
  /// Leftmost and rightmost non-identity site, -1 for the identity.
  int leftmost() const noexcept;
  int rightmost() const noexcept;
  std::vector<std::pair<int, Pauli>> letters() const;

  bool commutes_with(const PauliString& other) const;

  /// Bit masks restricted to n <= 64, with site 0 as the most significant bit
  /// (matching the Kronecker order used by `dense_matrix`).
  std::uint64_t dense_x_mask() const;
  std::uint64_t dense_z_mask() const;
  int y_count() const noexcept;

  std::string to_string() const;
  std::size_t hash() const noexcept;

  friend bool operator==(const PauliString& a, const PauliString& b) noexcept {
    return a.n_ == b.n_ && a.x_ == b.x_ && a.z_ == b.z_;
  }
  /// Canonical order: identity first, then (leftmost site, window width,
  /// letters over the window with I < X < Y < Z).
  friend bool operator<(const PauliString& a, const PauliString& b) noexcept;

 private:
  friend PauliProduct multiply(const PauliString& p, const PauliString& q);

  static constexpr int kWords = kMaxSites / 64;
  int n_;
  std::array<std::uint64_t, kWords> x_{};
  std::array<std::uint64_t, kWords> z_{};
};

struct PauliStringHash {
  std::size_t operator()(const PauliString& p) const noexcept { return p.hash(); }
};

struct PauliProduct {
  PauliString string;
  Phase phase;
};

/// p * q = phase * string.
PauliProduct multiply(const PauliString& p, const PauliString& q);

/// Sparse complex linear combination of Pauli strings. Coefficients that become
/// exactly zero are dropped.
class PauliOperator {
 public:
  using Coefficient = std::complex<double>;
  using TermMap = std::map<PauliString, Coefficient>;

  explicit PauliOperator(int n) : n_(n) {}
  PauliOperator(const PauliString& p, Coefficient c = 1.0);

  /// Parses "c1 * X0 X1 + c2 * Z2" style sums of real-coefficient strings.
  static PauliOperator parse(std::string_view text, int n);

  int num_sites() const noexcept { return n_; }
  const TermMap& terms() const noexcept { return terms_; }
  std::size_t size() const noexcept { return terms_.size(); }
  bool is_zero() const noexcept { return terms_.empty(); }
  bool is_selfadjoint() const noexcept;
  Coefficient coefficient(const PauliString& p) const;

  void add_term(const PauliString& p, Coefficient c);
  PauliOperator adjoint() const;

  PauliOperator& operator+=(const PauliOperator& other);
  PauliOperator& operator-=(const PauliOperator& other);
  PauliOperator& operator*=(Coefficient c);

  friend PauliOperator operator+(PauliOperator a, const PauliOperator& b) { return a += b; }
  friend PauliOperator operator-(PauliOperator a, const PauliOperator& b) { return a -= b; }
  friend PauliOperator operator*(PauliOperator a, Coefficient c) { return a *= c; }
  friend PauliOperator operator*(Coefficient c, PauliOperator a) { return a *= c; }
  friend PauliOperator operator*(const PauliOperator& a, const PauliOperator& b);
  friend bool operator==(const PauliOperator& a, const PauliOperator& b) = default;

  std::string to_string() const;

 private:
  void check_sites(int n) const;

  int n_;
  TermMap terms_;
};

/// ab - ba. Only anticommuting string pairs contribute, so commuting inputs
/// give the exact zero operator.
PauliOperator commutator(const PauliOperator& a, const PauliOperator& b);

/// Dense-matrix limit, `HAMLEARN_DENSE_LIMIT` if set, otherwise 12 sites.
int dense_limit();

Eigen::MatrixXcd dense_matrix(const PauliString& p, int limit = dense_limit());
Eigen::MatrixXcd dense_matrix(const PauliOperator& op, int limit = dense_limit());

/// All non-identity strings supported on a window of at most k contiguous
/// sites, in canonical order. `include_identity` prepends the identity.
std::vector<PauliString> enumerate_geometric_k_local(int n, int k, bool include_identity = false);

/// Closed-form length of `enumerate_geometric_k_local(n, k, false)`.
std::size_t geometric_k_local_count(int n, int k);

/// Every one of the 4^n - 1 non-identity strings, canonical order.
std::vector<PauliString> enumerate_all(int n, bool include_identity = false);

}  // namespace hamlearn
