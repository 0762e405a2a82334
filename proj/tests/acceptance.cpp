// Acceptance runner: one PASS/FAIL line per criterion, exit code 1 if any fail.
// Usage: acceptance [AC1 AC2 ...]   (no arguments runs everything)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "hamlearn/error.hpp"
#include "hamlearn/experiment.hpp"
#include "hamlearn/gns_moments.hpp"
#include "hamlearn/learner.hpp"
#include "hamlearn/sdp.hpp"
#include "hamlearn/state_oracle.hpp"
#include "hamlearn/verify.hpp"
#include "sdp_oracle.hpp"
#include "support.hpp"

using namespace hamlearn;
using testing::Mat;

namespace {

// AC1
constexpr double kAc1Theta = 1e-6;
constexpr double kAc1Ratio = 1e-4;
constexpr double kAc1Mu = 1e-7;
// AC2
constexpr double kAc2Mu = -1e-7;
// AC3
constexpr int kAc3AllowedViolations = 1;
constexpr double kAc3LowSigmaBound = 1e-5;
constexpr double kAc3ThresholdMax = 1e-2;
constexpr double kAc3RatioLo = 0.5;
constexpr double kAc3RatioHi = 2.0;
// AC5
constexpr double kAc5Mu = 1e-4;
constexpr double kAc5Kkt = 1e-7;
constexpr double kAc5Analytic = 1e-6;
constexpr double kAc5Box = 8.0;
constexpr int kAc5Iters = 32;

int failures = 0;

void report(const std::string& id, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %s  %s  (%.1f s)\n", ok ? "PASS" : "FAIL", id.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

Vector as_vector(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void ac1() {
  const Timer timer;
  std::mt19937_64 rng(101);
  double worst_theta = 0.0, worst_ratio = 0.0, worst_mu = 0.0;
  int cases = 0, bad_verdict = 0;
  for (int n = 2; n <= 3; ++n) {
    const auto b = enumerate_all(n);
    const auto all = enumerate_all(n, true);
    const std::set<PauliString> required(all.begin(), all.end());
    for (int k = 0; k < 10; ++k) {
      const auto h = testing::random_local_hamiltonian(n, 2, rng);
      const auto terms = testing::as_terms(h.basis);
      const Vector z = as_vector(h.coeffs);
      for (double temp : {0.5, 1.0, 2.0}) {
        ++cases;
        const ReconstructionResult r = reconstruct(build_table(gibbs_density(h.op, temp), required), b, terms);
        if (r.verdict != Verdict::Candidate) {
          ++bad_verdict;
          continue;
        }
        worst_theta = std::max(worst_theta, recovery_angle(r.y_star, z));
        worst_ratio = std::max(worst_ratio, std::abs(temperature_ratio(r.y_star, r.temperature, z, temp).ratio - 1.0));
        worst_mu = std::max(worst_mu, std::abs(r.mu_star));
      }
    }
  }
  const bool ok = bad_verdict == 0 && worst_theta <= kAc1Theta && worst_ratio <= kAc1Ratio && worst_mu <= kAc1Mu;
  report("AC1 full-span exact recovery", ok,
         std::to_string(cases) + " cases, non-candidate " + std::to_string(bad_verdict) + ", max theta " +
             fmt(worst_theta) + ", max |ratio-1| " + fmt(worst_ratio) + ", max |mu| " + fmt(worst_mu),
         timer.seconds());
}

void ac2() {
  const Timer timer;
  std::mt19937_64 rng(102);
  int cases = 0, feasible = 0;
  double worst = std::numeric_limits<double>::infinity();
  for (int n : {4, 6}) {
    const auto b = enumerate_geometric_k_local(n, 2);
    const auto terms = testing::as_terms(b);
    const auto required = required_strings(b, terms);
    for (int k = 0; k < 15; ++k) {
      const auto h = testing::random_local_hamiltonian(n, 2, rng);
      ++cases;
      const ReconstructionResult r = reconstruct(build_table(gibbs_density(h.op, 1.0), required), b, terms);
      if (r.verdict == Verdict::NotStationary) continue;
      worst = std::min(worst, r.mu_star);
      if (r.mu_star >= kAc2Mu) ++feasible;
    }
  }
  report("AC2 feasibility of the true point", feasible == cases,
         std::to_string(feasible) + "/" + std::to_string(cases) + " with mu* >= " + fmt(kAc2Mu) + ", min mu* " +
             fmt(worst),
         timer.seconds());
}

void ac3() {
  const Timer timer;
  ExperimentConfig cfg;
  cfg.n = 6;
  cfg.temperatures = {1.0, 2.0, 10.0};
  cfg.sigma_grid = {1e-8, 1e-7, 1e-6, 1e-5, 1e-4, 1e-3};
  cfg.runs_per_point = 10;
  cfg.seed = 1;
  const auto records = run_sweep(cfg);
  const auto rows = aggregate(records);

  // (a) mean theta against sigma, per temperature.
  bool ok_a = true;
  std::string detail_a;
  for (double t : cfg.temperatures) {
    std::vector<double> theta;
    for (const auto& row : rows)
      if (row.temperature == t) theta.push_back(row.theta_mean.value_or(std::nan("")));
    int violations = 0;
    for (std::size_t i = 0; i + 1 < theta.size(); ++i) {
      // Rows are sorted by increasing sigma; theta must not grow as sigma shrinks.
      if (!(theta[i] <= theta[i + 1])) ++violations;
    }
    ok_a = ok_a && violations <= kAc3AllowedViolations;
    detail_a += " T=" + fmt(t) + ":";
    for (double th : theta) detail_a += " " + fmt(th);
    detail_a += " [" + std::to_string(violations) + " viol]";
  }
  report("AC3a mean theta non-increasing as noise falls", ok_a, detail_a.substr(1), timer.seconds());

  // (b) DeltaNotPositive above some threshold at T = 1, extended to 1e-2.
  const Timer timer_b;
  ExperimentConfig extra = cfg;
  extra.temperatures = {1.0};
  extra.sigma_grid = {1e-2};
  auto t1 = records;
  t1.erase(std::remove_if(t1.begin(), t1.end(), [](const SweepRecord& r) { return r.temperature != 1.0; }),
           t1.end());
  for (const auto& r : run_sweep(extra)) t1.push_back(r);
  std::map<double, std::pair<int, int>> counts;  // sigma -> (DeltaNotPositive, GramDegenerate)
  for (const auto& r : t1) {
    auto& c = counts[r.sigma_noise];
    if (r.verdict == "DeltaNotPositive") ++c.first;
    if (r.verdict == "GramDegenerate") ++c.second;
  }
  bool clean_below = true;
  std::optional<double> threshold;
  for (auto it = counts.rbegin(); it != counts.rend(); ++it) {
    if (it->second.first == 0) break;
    threshold = it->first;
  }
  for (const auto& [s, c] : counts)
    if (s < kAc3LowSigmaBound && c.first > 0) clean_below = false;
  const bool ok_b = clean_below && threshold && *threshold >= kAc3LowSigmaBound && *threshold <= kAc3ThresholdMax;
  std::string detail_b = "T=1 DeltaNotPositive/GramDegenerate per sigma:";
  for (const auto& [s, c] : counts)
    detail_b += " " + fmt(s) + "=" + std::to_string(c.first) + "/" + std::to_string(c.second);
  detail_b += threshold ? ", threshold " + fmt(*threshold) : ", no threshold";
  report("AC3b DeltaNotPositive threshold in [1e-5, 1e-2]", ok_b, detail_b, timer_b.seconds());

  // (c) temperature ratio at the lowest noise.
  const double lowest = cfg.sigma_grid.front();
  bool ok_c = true;
  int with_ratio = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& r : records) {
    if (r.sigma_noise != lowest) continue;
    if (!r.temp_ratio) {
      ok_c = false;
      continue;
    }
    ++with_ratio;
    lo = std::min(lo, *r.temp_ratio);
    hi = std::max(hi, *r.temp_ratio);
    if (*r.temp_ratio < kAc3RatioLo || *r.temp_ratio > kAc3RatioHi) ok_c = false;
  }
  report("AC3c temperature ratio in [0.5, 2] at sigma=1e-8", ok_c,
         std::to_string(with_ratio) + " runs with a ratio, range [" + fmt(lo) + ", " + fmt(hi) + "]", 0.0);
}

void ac4() {
  const Timer timer;
  int checks = 0, failed = 0;
  std::string names;
  const int per_n[] = {34, 33, 33};
  for (int n = 1; n <= 3; ++n) {
    BatteryOptions opts;
    opts.n = n;
    opts.instances = per_n[n - 1];
    opts.seed = 200 + static_cast<std::uint64_t>(n);
    for (const auto& c : run_battery(opts)) {
      ++checks;
      if (!c.passed) {
        ++failed;
        names += " " + c.name + "(n=" + std::to_string(n) + ", " + fmt(c.residual) + ")";
      }
    }
  }
  report("AC4 verification battery on 100 instances", failed == 0,
         std::to_string(checks - failed) + "/" + std::to_string(checks) + " checks passed" + names, timer.seconds());
}

void ac5() {
  const Timer timer;
  std::mt19937_64 rng(105);
  int compared = 0, skipped = 0, attempts = 0;
  double worst_mu = 0.0, worst_kkt = 0.0;
  bool status_ok = true;
  while (compared < 50 && attempts < 200) {
    const std::size_t q = 1 + static_cast<std::size_t>(attempts % 3);
    const auto r = static_cast<Eigen::Index>(2 + (attempts * 7) % 39);
    ++attempts;
    const SdpProblem p = testing::random_problem(r, q, rng);
    const auto ref = testing::oracle_solve(p, kAc5Box, kAc5Iters);
    if (ref.on_box_boundary) {
      ++skipped;
      continue;
    }
    const SdpSolution s = solve(p);
    ++compared;
    if (s.status != SdpStatus::Optimal) {
      status_ok = false;
      continue;
    }
    worst_mu = std::max(worst_mu, std::abs(s.mu - ref.mu));
    worst_kkt = std::max(worst_kkt, check_solution(p, s).max());
  }

  SdpProblem analytic;
  analytic.l0 = Mat::Zero(2, 2);
  analytic.l0(0, 0) = -1.0;
  analytic.l0(1, 1) = -2.0;
  Mat h1 = Mat::Zero(2, 2);
  h1(0, 0) = 1.0;
  h1(1, 1) = 2.0;
  analytic.h_tilde = {h1};
  // omega(h1) = -1, so the normalization fixes y = 1.
  analytic.h_tilde_expectations = {-1.0};
  const SdpSolution a = solve(analytic);
  const bool ok_analytic = a.status == SdpStatus::Optimal && std::abs(a.mu - 1.0) <= kAc5Analytic &&
                           std::abs(a.temperature) <= kAc5Analytic;

  const bool ok = compared == 50 && status_ok && worst_mu <= kAc5Mu && worst_kkt <= kAc5Kkt && ok_analytic;
  report("AC5 SDP soundness", ok,
         std::to_string(compared) + " problems (" + std::to_string(skipped) + " oracle box hits redrawn), max |mu-oracle| " +
             fmt(worst_mu) + ", max KKT " + fmt(worst_kkt) + ", analytic mu " + fmt(a.mu) + " T " + fmt(a.temperature),
         timer.seconds());
}

void ac6() {
  const double a = epsilon_w(0.0, 1.0);
  const double b = epsilon_w(1e-4, 1e4);
  report("AC6 epsilon_W formula", a == 4e-9 && b == 4e-4,
         "epsilon_w(0, m) = " + fmt(a) + ", epsilon_w(1e-4, 1e4) = " + fmt(b), 0.0);
}

std::string sweep_csv(const ExperimentConfig& cfg, Execution exec) {
  std::ostringstream os;
  write_sweep_csv(os, run_sweep(cfg, exec));
  std::istringstream is(os.str());
  std::string line, out;
  while (std::getline(is, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

void ac7() {
  const Timer timer;
  ExperimentConfig cfg;
  cfg.n = 4;
  cfg.temperatures = {1.0, 2.0};
  cfg.sigma_grid = {1e-6, 1e-4, 1e-2};
  cfg.runs_per_point = 3;
  cfg.seed = 77;
  const std::string s1 = sweep_csv(cfg, Execution::Serial);
  const std::string s2 = sweep_csv(cfg, Execution::Serial);
  const std::string p1 = sweep_csv(cfg, Execution::Parallel);
  const std::string p2 = sweep_csv(cfg, Execution::Parallel);
  report("AC7 sweep determinism", s1 == s2 && p1 == p2 && s1 == p1,
         "serial repeat " + std::string(s1 == s2 ? "same" : "differs") + ", parallel repeat " +
             (p1 == p2 ? "same" : "differs") + ", serial vs parallel " + (s1 == p1 ? "same" : "differs"),
         timer.seconds());
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<std::string, void (*)()> all{{"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4},
                                              {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7}};
  std::vector<std::string> chosen(argv + 1, argv + argc);
  if (chosen.empty())
    for (const auto& [k, v] : all) chosen.push_back(k);
  for (const auto& id : chosen) {
    const auto it = all.find(id);
    if (it == all.end()) {
      std::fprintf(stderr, "unknown criterion '%s'\n", id.c_str());
      return 2;
    }
    try {
      it->second();
    } catch (const std::exception& e) {
      report(id, false, std::string("exception: ") + e.what(), 0.0);
    }
  }
  std::printf("%d criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
