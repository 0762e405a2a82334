#include "hamlearn/pauli.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cstdlib>
#include <sstream>

#include "hamlearn/error.hpp"

namespace hamlearn {

namespace {

constexpr int kMaxDenseSites = 20;

void check_same_sites(int a, int b) {
  if (a != b) {
    throw DimensionError("site count mismatch: " + std::to_string(a) + " vs " + std::to_string(b));
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

char to_char(Pauli p) {
  switch (p) {
    case Pauli::I: return 'I';
    case Pauli::X: return 'X';
    case Pauli::Y: return 'Y';
    case Pauli::Z: return 'Z';
  }
  return '?';
}

std::complex<double> Phase::value() const {
  switch (k & 3U) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
  }
}

std::string Phase::to_string() const {
  static constexpr const char* names[] = {"+1", "+i", "-1", "-i"};
  return names[k & 3U];
}

// ---------------------------------------------------------------------------
// PauliString

PauliString::PauliString(int n) : n_(n) {
  if (n < 1 || n > kMaxSites) {
    throw ContractError("site count " + std::to_string(n) + " outside [1, " +
                        std::to_string(kMaxSites) + "]");
  }
}

PauliString::PauliString(int n, std::initializer_list<std::pair<int, Pauli>> letters)
    : PauliString(n) {
  for (const auto& [site, p] : letters) set(site, p);
}

PauliString PauliString::parse(std::string_view text, int n) {
  PauliString out(n);
  text = trim(text);
  if (text.empty()) throw ParseError("empty Pauli string");
  if (text == "I") return out;
  std::size_t pos = 0;
  while (pos < text.size()) {
    while (pos < text.size() && text[pos] == ' ') ++pos;
    if (pos >= text.size()) break;
    const char letter = text[pos++];
    Pauli p;
    switch (letter) {
      case 'X': p = Pauli::X; break;
      case 'Y': p = Pauli::Y; break;
      case 'Z': p = Pauli::Z; break;
      default:
        throw ParseError("bad Pauli letter '" + std::string(1, letter) + "' in '" +
                         std::string(text) + "'");
    }
    int site = -1;
    const auto* first = text.data() + pos;
    const auto* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, site);
    if (ec != std::errc() || ptr == first) {
      throw ParseError("missing site index in '" + std::string(text) + "'");
    }
    pos = static_cast<std::size_t>(ptr - text.data());
    if (site < 0 || site >= n) {
      throw ParseError("site " + std::to_string(site) + " out of range for n=" + std::to_string(n));
    }
    if (out.at(site) != Pauli::I) {
      throw ParseError("site " + std::to_string(site) + " repeated in '" + std::string(text) + "'");
    }
    out.set(site, p);
    if (pos < text.size() && text[pos] != ' ') {
      throw ParseError("expected space after site index in '" + std::string(text) + "'");
    }
  }
  return out;
}

Pauli PauliString::at(int site) const {
  if (site < 0 || site >= n_) throw ContractError("site index out of range");
  const auto w = static_cast<std::size_t>(site / 64);
  const auto b = static_cast<unsigned>(site % 64);
  const bool x = (x_[w] >> b) & 1U;
  const bool z = (z_[w] >> b) & 1U;
  if (x && z) return Pauli::Y;
  if (x) return Pauli::X;
  if (z) return Pauli::Z;
  return Pauli::I;
}

void PauliString::set(int site, Pauli p) {
  if (site < 0 || site >= n_) {
    throw ContractError("site index " + std::to_string(site) + " out of range for n=" +
                        std::to_string(n_));
  }
  const auto w = static_cast<std::size_t>(site / 64);
  const std::uint64_t bit = std::uint64_t{1} << static_cast<unsigned>(site % 64);
  x_[w] &= ~bit;
  z_[w] &= ~bit;
  if (p == Pauli::X || p == Pauli::Y) x_[w] |= bit;
  if (p == Pauli::Z || p == Pauli::Y) z_[w] |= bit;
}

bool PauliString::is_identity() const noexcept {
  for (int w = 0; w < kWords; ++w) {
    if ((x_[w] | z_[w]) != 0) return false;
  }
  return true;
}

int PauliString::weight() const noexcept {
  int total = 0;
  for (int w = 0; w < kWords; ++w) total += std::popcount(x_[w] | z_[w]);
  return total;
}

int PauliString::leftmost() const noexcept {
  for (int w = 0; w < kWords; ++w) {
    const auto s = x_[w] | z_[w];
    if (s != 0) return 64 * w + std::countr_zero(s);
  }
  return -1;
}

int PauliString::rightmost() const noexcept {
  for (int w = kWords - 1; w >= 0; --w) {
    const auto s = x_[w] | z_[w];
    if (s != 0) return 64 * w + 63 - std::countl_zero(s);
  }
  return -1;
}

std::vector<std::pair<int, Pauli>> PauliString::letters() const {
  std::vector<std::pair<int, Pauli>> out;
  const int lo = leftmost();
  if (lo < 0) return out;
  const int hi = rightmost();
  for (int s = lo; s <= hi; ++s) {
    const Pauli p = at(s);
    if (p != Pauli::I) out.emplace_back(s, p);
  }
  return out;
}

bool PauliString::commutes_with(const PauliString& other) const {
  check_same_sites(n_, other.n_);
  int parity = 0;
  for (int w = 0; w < kWords; ++w) {
    parity += std::popcount(x_[w] & other.z_[w]) + std::popcount(z_[w] & other.x_[w]);
  }
  return (parity & 1) == 0;
}

std::uint64_t PauliString::dense_x_mask() const {
  if (n_ > 64) throw ResourceError("dense masks need n <= 64");
  std::uint64_t mask = 0;
  for (int s = 0; s < n_; ++s) {
    if ((x_[0] >> s) & 1U) mask |= std::uint64_t{1} << (n_ - 1 - s);
  }
  return mask;
}

std::uint64_t PauliString::dense_z_mask() const {
  if (n_ > 64) throw ResourceError("dense masks need n <= 64");
  std::uint64_t mask = 0;
  for (int s = 0; s < n_; ++s) {
    if ((z_[0] >> s) & 1U) mask |= std::uint64_t{1} << (n_ - 1 - s);
  }
  return mask;
}

int PauliString::y_count() const noexcept {
  int total = 0;
  for (int w = 0; w < kWords; ++w) total += std::popcount(x_[w] & z_[w]);
  return total;
}

std::string PauliString::to_string() const {
  if (is_identity()) return "I";
  std::string out;
  for (const auto& [site, p] : letters()) {
    if (!out.empty()) out += ' ';
    out += to_char(p);
    out += std::to_string(site);
  }
  return out;
}

std::size_t PauliString::hash() const noexcept {
  std::uint64_t h = 0x9e3779b97f4a7c15ULL ^ static_cast<std::uint64_t>(n_);
  for (int w = 0; w < kWords; ++w) {
    h ^= x_[w] + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
    h ^= z_[w] + 0x7f4a7c159e3779b9ULL + (h << 6) + (h >> 2);
  }
  return static_cast<std::size_t>(h);
}

bool operator<(const PauliString& a, const PauliString& b) noexcept {
  if (a.n_ != b.n_) return a.n_ < b.n_;
  const int la = a.leftmost();
  const int lb = b.leftmost();
  if (la != lb) return la < lb;  // identity has -1 and sorts first
  if (la < 0) return false;
  const int wa = a.rightmost() - la;
  const int wb = b.rightmost() - lb;
  if (wa != wb) return wa < wb;
  for (int s = la; s <= la + wa; ++s) {
    const auto pa = a.at(s);
    const auto pb = b.at(s);
    if (pa != pb) return pa < pb;
  }
  return false;
}

PauliProduct multiply(const PauliString& p, const PauliString& q) {
  check_same_sites(p.n_, q.n_);
  PauliProduct out{PauliString(p.n_), Phase::one()};
  // With P(x, z) = i^{x.z} X^x Z^z per site:
  // P1 P2 = i^{x1.z1 + x2.z2 - x3.z3} (-1)^{z1.x2} P3.
  int exponent = 0;
  for (int w = 0; w < PauliString::kWords; ++w) {
    const auto x3 = p.x_[w] ^ q.x_[w];
    const auto z3 = p.z_[w] ^ q.z_[w];
    out.string.x_[w] = x3;
    out.string.z_[w] = z3;
    exponent += std::popcount(p.x_[w] & p.z_[w]) + std::popcount(q.x_[w] & q.z_[w]) -
                std::popcount(x3 & z3) + 2 * std::popcount(p.z_[w] & q.x_[w]);
  }
  out.phase.k = static_cast<std::uint8_t>(((exponent % 4) + 4) % 4);
  return out;
}

// ---------------------------------------------------------------------------
// PauliOperator

PauliOperator::PauliOperator(const PauliString& p, Coefficient c) : n_(p.num_sites()) {
  add_term(p, c);
}

PauliOperator PauliOperator::parse(std::string_view text, int n) {
  PauliOperator out(n);
  const std::string normalized(text);
  // Split on '+' and on '-' that begin a new term (not exponents).
  std::vector<std::string> pieces;
  std::string current;
  for (std::size_t i = 0; i < normalized.size(); ++i) {
    const char c = normalized[i];
    const bool exponent_sign = i > 0 && (normalized[i - 1] == 'e' || normalized[i - 1] == 'E');
    const auto pending = trim(current);
    const bool bare_sign = pending == "+" || pending == "-";
    if ((c == '+' || c == '-') && !exponent_sign && !pending.empty() && !bare_sign) {
      pieces.push_back(current);
      current.clear();
    }
    current += c;
  }
  if (!trim(current).empty()) pieces.push_back(current);
  if (pieces.empty()) throw ParseError("empty operator");
  for (const auto& raw : pieces) {
    std::string_view piece = trim(raw);
    double sign = 1.0;
    while (!piece.empty() && (piece.front() == '+' || piece.front() == '-')) {
      if (piece.front() == '-') sign = -sign;
      piece = trim(piece.substr(1));
    }
    double coef = 1.0;
    const auto star = piece.find('*');
    if (star != std::string_view::npos) {
      const auto num = trim(piece.substr(0, star));
      auto [ptr, ec] = std::from_chars(num.data(), num.data() + num.size(), coef);
      if (ec != std::errc() || ptr != num.data() + num.size()) {
        throw ParseError("bad coefficient '" + std::string(num) + "'");
      }
      piece = trim(piece.substr(star + 1));
    }
    out.add_term(PauliString::parse(piece, n), sign * coef);
  }
  return out;
}

bool PauliOperator::is_selfadjoint() const noexcept {
  return std::all_of(terms_.begin(), terms_.end(),
                     [](const auto& t) { return t.second.imag() == 0.0; });
}

PauliOperator::Coefficient PauliOperator::coefficient(const PauliString& p) const {
  const auto it = terms_.find(p);
  return it == terms_.end() ? Coefficient{} : it->second;
}

void PauliOperator::check_sites(int n) const { check_same_sites(n_, n); }

void PauliOperator::add_term(const PauliString& p, Coefficient c) {
  check_sites(p.num_sites());
  if (c == Coefficient{}) return;
  auto [it, inserted] = terms_.try_emplace(p, c);
  if (!inserted) {
    it->second += c;
    if (it->second == Coefficient{}) terms_.erase(it);
  }
}

PauliOperator PauliOperator::adjoint() const {
  PauliOperator out(n_);
  for (const auto& [p, c] : terms_) out.terms_.emplace(p, std::conj(c));
  return out;
}

PauliOperator& PauliOperator::operator+=(const PauliOperator& other) {
  check_sites(other.n_);
  for (const auto& [p, c] : other.terms_) add_term(p, c);
  return *this;
}

PauliOperator& PauliOperator::operator-=(const PauliOperator& other) {
  check_sites(other.n_);
  for (const auto& [p, c] : other.terms_) add_term(p, -c);
  return *this;
}

PauliOperator& PauliOperator::operator*=(Coefficient c) {
  if (c == Coefficient{}) {
    terms_.clear();
    return *this;
  }
  for (auto it = terms_.begin(); it != terms_.end();) {
    it->second *= c;
    if (it->second == Coefficient{}) {
      it = terms_.erase(it);
    } else {
      ++it;
    }
  }
  return *this;
}

PauliOperator operator*(const PauliOperator& a, const PauliOperator& b) {
  a.check_sites(b.n_);
  PauliOperator out(a.n_);
  for (const auto& [p, cp] : a.terms_) {
    for (const auto& [q, cq] : b.terms_) {
      const auto prod = multiply(p, q);
      out.add_term(prod.string, cp * cq * prod.phase.value());
    }
  }
  return out;
}

std::string PauliOperator::to_string() const {
  if (terms_.empty()) return "0";
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [p, c] : terms_) {
    if (!first) os << " + ";
    first = false;
    if (c.imag() == 0.0) {
      os << c.real();
    } else {
      os << '(' << c.real() << (c.imag() < 0 ? "-" : "+") << std::abs(c.imag()) << "i)";
    }
    os << " * " << p.to_string();
  }
  return os.str();
}

PauliOperator commutator(const PauliOperator& a, const PauliOperator& b) {
  check_same_sites(a.num_sites(), b.num_sites());
  PauliOperator out(a.num_sites());
  for (const auto& [p, cp] : a.terms()) {
    for (const auto& [q, cq] : b.terms()) {
      if (p.commutes_with(q)) continue;
      const auto prod = multiply(p, q);
      out.add_term(prod.string, 2.0 * cp * cq * prod.phase.value());
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Dense bridge

int dense_limit() {
  if (const char* env = std::getenv("HAMLEARN_DENSE_LIMIT")) {
    int v = 0;
    const std::string_view s(env);
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec == std::errc() && ptr == s.data() + s.size() && v > 0) {
      return std::min(v, kMaxDenseSites);
    }
  }
  return 12;
}

namespace {

void check_dense(int n, int limit) {
  if (n > limit || n > kMaxDenseSites) {
    throw ResourceError("dense matrix for n=" + std::to_string(n) + " exceeds the limit of " +
                        std::to_string(std::min(limit, kMaxDenseSites)) + " sites");
  }
}

void accumulate_dense(const PauliString& p, std::complex<double> c, Eigen::MatrixXcd& m) {
  const auto dim = static_cast<std::uint64_t>(m.rows());
  const auto xm = p.dense_x_mask();
  const auto zm = p.dense_z_mask();
  const auto base = c * Phase{static_cast<std::uint8_t>(p.y_count() & 3)}.value();
  for (std::uint64_t col = 0; col < dim; ++col) {
    const double sign = (std::popcount(col & zm) & 1) ? -1.0 : 1.0;
    m(static_cast<Eigen::Index>(col ^ xm), static_cast<Eigen::Index>(col)) += sign * base;
  }
}

}  // namespace

Eigen::MatrixXcd dense_matrix(const PauliString& p, int limit) {
  check_dense(p.num_sites(), limit);
  const Eigen::Index dim = Eigen::Index{1} << p.num_sites();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  accumulate_dense(p, 1.0, m);
  return m;
}

Eigen::MatrixXcd dense_matrix(const PauliOperator& op, int limit) {
  check_dense(op.num_sites(), limit);
  const Eigen::Index dim = Eigen::Index{1} << op.num_sites();
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(dim, dim);
  for (const auto& [p, c] : op.terms()) accumulate_dense(p, c, m);
  return m;
}

// ---------------------------------------------------------------------------
// Bases

std::vector<PauliString> enumerate_geometric_k_local(int n, int k, bool include_identity) {
  if (k < 1 || k > n) {
    throw ContractError("locality k=" + std::to_string(k) + " must lie in [1, n=" +
                        std::to_string(n) + "]");
  }
  std::vector<PauliString> out;
  out.reserve(geometric_k_local_count(n, k) + (include_identity ? 1 : 0));
  if (include_identity) out.emplace_back(n);
  constexpr Pauli kEnds[] = {Pauli::X, Pauli::Y, Pauli::Z};
  constexpr Pauli kAny[] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  for (int start = 0; start < n; ++start) {
    for (int width = 1; width <= k && start + width <= n; ++width) {
      // Odometer over the window letters; both ends non-identity.
      std::vector<int> digits(static_cast<std::size_t>(width), 0);
      while (true) {
        PauliString p(n);
        bool valid = true;
        for (int w = 0; w < width; ++w) {
          const bool end = (w == 0 || w == width - 1);
          const int d = digits[static_cast<std::size_t>(w)];
          if (end && d > 2) valid = false;
          if (!valid) break;
          p.set(start + w, end ? kEnds[d] : kAny[d]);
        }
        if (valid) out.push_back(p);
        int pos = width - 1;
        while (pos >= 0) {
          const bool end = (pos == 0 || pos == width - 1);
          auto& d = digits[static_cast<std::size_t>(pos)];
          if (++d < (end ? 3 : 4)) break;
          d = 0;
          --pos;
        }
        if (pos < 0) break;
      }
    }
  }
  return out;
}

std::size_t geometric_k_local_count(int n, int k) {
  if (k < 1 || k > n) throw ContractError("locality out of range");
  std::size_t total = 3 * static_cast<std::size_t>(n);
  std::size_t interior = 1;  // 4^{w-2}
  for (int w = 2; w <= k; ++w) {
    total += static_cast<std::size_t>(n - w + 1) * 9 * interior;
    interior *= 4;
  }
  return total;
}

std::vector<PauliString> enumerate_all(int n, bool include_identity) {
  if (n < 1 || n > 12) throw ResourceError("enumerate_all is limited to n <= 12");
  std::vector<PauliString> out;
  const std::size_t total = std::size_t{1} << (2 * n);
  out.reserve(total);
  constexpr Pauli kAny[] = {Pauli::I, Pauli::X, Pauli::Y, Pauli::Z};
  for (std::size_t code = include_identity ? 0 : 1; code < total; ++code) {
    PauliString p(n);
    for (int s = 0; s < n; ++s) p.set(s, kAny[(code >> (2 * s)) & 3U]);
    out.push_back(p);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hamlearn
