#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "hamlearn/error.hpp"
#include "hamlearn/experiment.hpp"
#include "hamlearn/state_oracle.hpp"
#include "support.hpp"

using namespace hamlearn;
using testing::Cd;
using testing::Mat;

namespace {

// Free energy <h> - T S from the spectrum of rho.
double free_energy_of(const Mat& rho, const Mat& h, double t) {
  Eigen::SelfAdjointEigenSolver<Mat> es(rho, Eigen::EigenvaluesOnly);
  double s = 0.0;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    const double p = es.eigenvalues()(i);
    if (p > 0.0) s -= p * std::log(p);
  }
  return (rho * h).trace().real() - t * s;
}

}  // namespace

TEST_CASE("zero Hamiltonian gives the maximally mixed state") {
  for (int n = 1; n <= 3; ++n) {
    const DensityMatrix rho = gibbs_density(PauliOperator(n), 0.7);
    const auto d = Eigen::Index{1} << n;
    CHECK((rho.matrix() - Mat::Identity(d, d) / static_cast<double>(d)).norm() < 1e-15);
    for (const auto& p : enumerate_all(n)) CHECK(std::abs(expectation(rho, p)) < 1e-15);
  }
}

TEST_CASE("two-level Gibbs weights") {
  const PauliOperator h = PauliOperator::parse("-1 * Z0", 1);
  const DensityMatrix rho = gibbs_density(h, 1.0);
  CHECK(expectation(rho, PauliString(1, {{0, Pauli::Z}})) == doctest::Approx(std::tanh(1.0)).epsilon(1e-14));
  CHECK(std::abs(expectation(rho, PauliString(1, {{0, Pauli::X}}))) < 1e-15);
  CHECK(rho.is_faithful());
}

TEST_CASE("Gibbs state against scaling-and-squaring exponential") {
  const PauliOperator h = xxz_hamiltonian(4, 0.5);
  const double t = 2.0;
  const DensityMatrix rho = gibbs_density(h, t);
  const Mat e = (-dense_matrix(h) / t).exp();
  const Mat ref = e / e.trace();
  CHECK((rho.matrix() - ref).cwiseAbs().maxCoeff() < 1e-13);
  const Mat hd = dense_matrix(h);
  CHECK((rho.matrix() * hd - hd * rho.matrix()).norm() < 1e-10);
  CHECK(std::abs(rho.matrix().trace() - Cd(1.0)) < 1e-12);
  // Ferromagnetic in-plane correlations.
  const PauliString xx(4, {{0, Pauli::X}, {1, Pauli::X}});
  const double v = expectation(rho, xx);
  CHECK(v > 0.0);
  CHECK(v == doctest::Approx((ref * dense_matrix(xx)).trace().real()).epsilon(1e-12));
}

TEST_CASE("non-selfadjoint Hamiltonians are rejected") {
  PauliOperator h(1);
  h.add_term(PauliString(1, {{0, Pauli::X}}), Cd(0, 1));
  CHECK_THROWS_AS(gibbs_density(h, 1.0), ContractError);
  CHECK_THROWS_AS(gibbs_density(PauliOperator::parse("1 * Z0", 1), 0.0), ContractError);
}

TEST_CASE("large spectra do not overflow") {
  const PauliOperator h = PauliOperator::parse("2000 * Z0 + 1500 * X1", 2);
  const DensityMatrix rho = gibbs_density(h, 1.0);
  CHECK(rho.matrix().allFinite());
  CHECK(std::abs(rho.matrix().trace().real() - 1.0) < 1e-12);
  CHECK(expectation(rho, PauliString(2, {{0, Pauli::Z}})) == doctest::Approx(-1.0));
}

TEST_CASE("Gibbs state minimizes the free energy") {
  std::mt19937_64 rng(21);
  for (int n = 1; n <= 3; ++n) {
    const auto h = testing::random_local_hamiltonian(n, std::min(n, 2), rng);
    const double t = 0.8;
    const Mat hd = dense_matrix(h.op);
    const DensityMatrix gibbs = gibbs_density(h.op, t);
    const double f0 = free_energy_of(gibbs.matrix(), hd, t);
    const auto d = gibbs.matrix().rows();
    for (int trial = 0; trial < 100; ++trial) {
      const double eps = trial < 50 ? 1e-2 : 0.3;
      Mat sigma = gibbs.matrix() + eps * testing::random_density(d, rng);
      sigma /= sigma.trace().real();
      CHECK(free_energy_of(sigma, hd, t) >= f0 - 1e-14);
    }
  }
}

TEST_CASE("multiplicative gauge") {
  std::mt19937_64 rng(22);
  const auto h = testing::random_local_hamiltonian(3, 2, rng);
  for (double c : {2.0, 0.25, 8.0}) {
    // Powers of two scale exactly.
    CHECK(gibbs_density(h.op * Cd(c), c * 1.3).matrix() == gibbs_density(h.op, 1.3).matrix());
  }
  const Mat a = gibbs_density(h.op * Cd(3.0), 3.0 * 1.3).matrix();
  CHECK((a - gibbs_density(h.op, 1.3).matrix()).cwiseAbs().maxCoeff() < 1e-14);
}

TEST_CASE("exact expectations are bounded by one") {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 4; ++n) {
    const auto h = testing::random_local_hamiltonian(n, std::min(n, 2), rng);
    const DensityMatrix rho = gibbs_density(h.op, 0.3);
    const auto strings = enumerate_all(n, true);
    const ExpectationTable t =
        build_table(rho, std::set<PauliString>(strings.begin(), strings.end()));
    for (const auto& p : strings) CHECK(std::abs(t.value(p)) <= 1.0 + 1e-14);
    CHECK(t.value(PauliString(n)) == 1.0);
  }
}

TEST_CASE("required strings") {
  SUBCASE("single qubit") {
    const std::vector<PauliString> b{PauliString(1, {{0, Pauli::X}})};
    const std::vector<PauliOperator> h{PauliOperator(PauliString(1, {{0, Pauli::Z}}))};
    const auto req = required_strings(b, h);
    // X X = I, X [Z, X] = X (2i Y) = -2 Z, plus Z itself.
    CHECK(req.count(PauliString(1)) == 1);
    CHECK(req.count(PauliString(1, {{0, Pauli::Z}})) == 1);
    for (const auto& p : req) CHECK(p.num_sites() == 1);
  }
  SUBCASE("identity basis") {
    const auto req = required_strings({PauliString(2)}, {});
    REQUIRE(req.size() == 1);
    CHECK(req.begin()->is_identity());
  }
  SUBCASE("every product is covered") {
    const int n = 4;
    const auto b = enumerate_geometric_k_local(n, 2);
    std::vector<PauliOperator> h;
    for (const auto& p : enumerate_geometric_k_local(n, 2)) h.emplace_back(p);
    const auto req = required_strings(b, h);
    for (const auto& bi : b) {
      for (const auto& bj : b) {
        CHECK(req.count(multiply(bi, bj).string));
        CHECK(req.count(multiply(bj, bi).string));
        for (const auto& ha : h) {
          const PauliOperator prod = PauliOperator(bi) * commutator(ha, PauliOperator(bj));
          for (const auto& [s, c] : prod.terms()) CHECK(req.count(s));
        }
      }
    }
  }
  SUBCASE("restricted bases need fewer strings") {
    const int n = 8;
    const auto b = enumerate_geometric_k_local(n, 2);
    std::vector<PauliOperator> h;
    for (const auto& p : enumerate_geometric_k_local(n, 2)) h.emplace_back(p);
    const auto req = required_strings(b, h);
    CHECK(req.size() < (std::size_t{1} << (2 * n)));
    for (const auto& p : req) CHECK(p.weight() <= 6);
  }
}

TEST_CASE("noise model") {
  const int n = 6;
  const auto strings = enumerate_all(n, true);
  const std::set<PauliString> all(strings.begin(), strings.end());
  const ExpectationTable exact = build_table(gibbs_density(xxz_hamiltonian(n, 0.5), 1.0), all);

  CHECK(add_noise(exact, 0.0, 5) == exact);
  const ExpectationTable a = add_noise(exact, 1e-3, 99);
  const ExpectationTable b = add_noise(exact, 1e-3, 99);
  CHECK(a == b);
  std::ostringstream sa, sb;
  write_table(sa, a);
  write_table(sb, b);
  CHECK(sa.str() == sb.str());
  CHECK_FALSE(add_noise(exact, 1e-3, 100) == a);
  CHECK(a.value(PauliString(n)) == 1.0);
  CHECK(a.sigma_noise() == 1e-3);

  const double sigma = 0.02;
  const ExpectationTable noisy = add_noise(exact, sigma, 7);
  double sum = 0.0, sum2 = 0.0;
  std::size_t count = 0;
  for (const auto& p : strings) {
    if (p.is_identity()) continue;
    const double d = noisy.value(p) - exact.value(p);
    sum += d;
    sum2 += d * d;
    ++count;
  }
  REQUIRE(count >= 4000);
  const double mean = sum / static_cast<double>(count);
  const double sd = std::sqrt(sum2 / static_cast<double>(count) - mean * mean);
  CHECK(std::abs(sd - sigma) < 0.05 * sigma);

  // No clamping.
  const ExpectationTable wild = add_noise(exact, 5.0, 3);
  bool beyond = false;
  for (const auto& p : strings) beyond = beyond || std::abs(wild.value(p)) > 1.0;
  CHECK(beyond);

  CHECK_THROWS_AS(add_noise(exact, -1.0, 1), ContractError);
}

TEST_CASE("noise statistics over ten thousand entries") {
  const int n = 7;
  const auto strings = enumerate_all(n, false);
  REQUIRE(strings.size() >= 10000);
  ExpectationTable zero(n);
  for (const auto& p : strings) zero.set(p, 0.0);
  const ExpectationTable noisy = add_noise(zero, 1e-4, 2024);
  double sum2 = 0.0;
  for (const auto& p : strings) sum2 += noisy.value(p) * noisy.value(p);
  const double sd = std::sqrt(sum2 / static_cast<double>(strings.size()));
  CHECK(std::abs(sd - 1e-4) < 0.05 * 1e-4);
}

TEST_CASE("table serialization round trips exactly") {
  std::mt19937_64 rng(24);
  const auto h = testing::random_local_hamiltonian(3, 2, rng);
  const auto strings = enumerate_all(3, true);
  const ExpectationTable exact =
      build_table(gibbs_density(h.op, 0.9), std::set<PauliString>(strings.begin(), strings.end()));
  for (const ExpectationTable& t : {exact, add_noise(exact, 3e-5, 17)}) {
    std::stringstream ss;
    write_table(ss, t);
    const ExpectationTable back = read_table(ss);
    CHECK(back == t);
    CHECK(back.sigma_noise() == t.sigma_noise());
    CHECK(back.seed() == t.seed());
  }
  std::istringstream bad("# n = 2\nX0 Q1\t0.5\n");
  CHECK_THROWS_AS(read_table(bad), ParseError);
}

TEST_CASE("missing strings raise") {
  ExpectationTable t(2);
  CHECK_THROWS_AS(t.value(PauliString(2, {{0, Pauli::X}})), IncompleteDataError);
}

TEST_CASE("parallel table build matches the serial one") {
  std::mt19937_64 rng(25);
  const auto h = testing::random_local_hamiltonian(6, 2, rng);
  const DensityMatrix rho = gibbs_density(h.op, 1.1);
  const auto strings = enumerate_geometric_k_local(6, 4, true);
  const std::set<PauliString> set(strings.begin(), strings.end());
  CHECK(build_table(rho, set, Execution::Serial) == build_table(rho, set, Execution::Parallel));
  const auto a = expectation_kernel(rho.matrix(), strings, Execution::Serial);
  const auto b = expectation_kernel(rho.matrix(), strings, Execution::Parallel);
  CHECK(a == b);
  for (std::size_t k = 0; k < strings.size(); k += 37) {
    CHECK(a[k] == doctest::Approx((rho.matrix() * dense_matrix(strings[k])).trace().real())
                      .epsilon(1e-12));
  }
}
