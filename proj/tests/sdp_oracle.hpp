#pragma once

// Brute-force reference for the learning SDP: the optimum equals
// max over (y, T >= 0) on the normalization plane of lambda_min(T L0 + sum y H),
// a concave function, maximized here by nested golden-section search.

#include <algorithm>
#include <functional>
#include <random>
#include <vector>

#include "hamlearn/sdp.hpp"
#include "support.hpp"

namespace testing {

struct OracleResult {
  std::vector<double> y;
  double temperature = 0.0;
  double mu = 0.0;
  bool on_box_boundary = false;
};

inline Mat pencil(const hamlearn::SdpProblem& p, const std::vector<double>& y, double t) {
  Mat m = t * p.l0;
  for (std::size_t a = 0; a < y.size(); ++a) m += y[a] * p.h_tilde[a];
  return m;
}

/// Free variables: every y except the pivot (largest |omega|), which is solved
/// from the normalization, then T in [0, box].
inline OracleResult oracle_solve(const hamlearn::SdpProblem& p, double box, int iters = 40) {
  const std::size_t q = p.num_terms();
  std::size_t pivot = 0;
  for (std::size_t a = 1; a < q; ++a) {
    if (std::abs(p.h_tilde_expectations[a]) > std::abs(p.h_tilde_expectations[pivot])) pivot = a;
  }
  std::vector<std::size_t> free_idx;
  for (std::size_t a = 0; a < q; ++a)
    if (a != pivot) free_idx.push_back(a);

  std::vector<double> x(free_idx.size() + 1, 0.0);
  auto unpack = [&](const std::vector<double>& v) {
    std::vector<double> y(q, 0.0);
    double rest = -1.0;
    for (std::size_t k = 0; k < free_idx.size(); ++k) {
      y[free_idx[k]] = v[k];
      rest -= v[k] * p.h_tilde_expectations[free_idx[k]];
    }
    y[pivot] = rest / p.h_tilde_expectations[pivot];
    return y;
  };
  auto objective = [&](const std::vector<double>& v) {
    return lambda_min(pencil(p, unpack(v), v.back()));
  };
  // Maximize over coordinates dim..end for fixed leading ones.
  std::function<double(std::size_t)> inner = [&](std::size_t dim) -> double {
    if (dim == x.size()) return objective(x);
    const double lo = dim + 1 == x.size() ? 0.0 : -box;
    auto f = [&](double v) {
      x[dim] = v;
      return inner(dim + 1);
    };
    auto [arg, val] = golden_max(f, lo, box, iters);
    x[dim] = arg;
    return val;
  };

  // Recover the argmax one coordinate at a time.
  OracleResult out;
  std::vector<double> best(x.size(), 0.0);
  for (std::size_t d = 0; d < x.size(); ++d) {
    for (std::size_t k = 0; k < d; ++k) x[k] = best[k];
    const double lo = d + 1 == x.size() ? 0.0 : -box;
    auto f = [&](double v) {
      for (std::size_t k = 0; k < d; ++k) x[k] = best[k];
      x[d] = v;
      return inner(d + 1);
    };
    best[d] = golden_max(f, lo, box, iters).first;
    const double tol = 1e-3 * box;
    if (best[d] > box - tol || (d + 1 != x.size() && best[d] < -box + tol)) {
      out.on_box_boundary = true;
    }
  }
  out.y = unpack(best);
  out.temperature = best.back();
  out.mu = objective(best);
  return out;
}

/// Random normalized problem made strictly dual feasible by shifting with a
/// random interior dual point, so the primal optimum is attained.
inline hamlearn::SdpProblem random_problem(Eigen::Index r, std::size_t q, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.1, 1.0);
  hamlearn::SdpProblem p;
  const Mat z0 = random_density(r, rng, 0.5);
  const double tau0 = u(rng);
  const double nu0 = g(rng);
  const Mat id = Mat::Identity(r, r);
  p.l0 = random_hermitian(r, rng);
  p.l0 -= ((z0 * p.l0).trace().real() + tau0) * id;
  for (std::size_t a = 0; a < q; ++a) {
    double e = g(rng);
    if (std::abs(e) < 0.2) e = e < 0 ? -0.2 : 0.2;
    Mat h = random_hermitian(r, rng);
    h -= ((z0 * h).trace().real() + nu0 * e) * id;
    p.h_tilde.push_back(h);
    p.h_tilde_expectations.push_back(e);
  }
  return p;
}

}  // namespace testing
