#include "hamlearn/sdp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/QR>

#include "hamlearn/error.hpp"
#include "hamlearn/state_oracle.hpp"

namespace hamlearn {

std::string to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Optimal: return "Optimal";
    case SdpStatus::Infeasible: return "Infeasible";
    case SdpStatus::NumericalTrouble: return "NumericalTrouble";
  }
  return "?";
}

std::string to_string(SdpMode m) {
  return m == SdpMode::Normalized ? "normalized" : "fixed_temperature";
}

LogDelta log_psd(const Matrix& delta, double eig_floor, bool project) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(hermitian_part(delta));
  const Vector& evals = es.eigenvalues();
  std::vector<double> bad;
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < evals.size(); ++i) {
    if (evals(i) > eig_floor) {
      keep.push_back(i);
    } else {
      bad.push_back(evals(i));
    }
  }
  LogDelta out;
  out.eigenvalues = evals;
  if (!bad.empty() && !project) {
    throw DeltaNotPositive("compressed modular operator has " + std::to_string(bad.size()) +
                               " non-positive eigenvalue(s), smallest " +
                               format_double(bad.front()),
                           bad);
  }
  if (keep.empty()) {
    throw DeltaNotPositive("compressed modular operator has no positive eigenvalues", bad);
  }
  const auto rr = static_cast<Eigen::Index>(keep.size());
  Matrix vecs(delta.rows(), rr);
  Vector logs(rr);
  for (Eigen::Index k = 0; k < rr; ++k) {
    vecs.col(k) = es.eigenvectors().col(keep[static_cast<std::size_t>(k)]);
    logs(k) = std::log(evals(keep[static_cast<std::size_t>(k)]));
  }
  out.projected = !bad.empty();
  if (out.projected) {
    out.range = vecs;
    out.l0 = logs.asDiagonal();
  } else {
    out.range = Matrix::Identity(delta.rows(), delta.rows());
    out.l0 = hermitian_part(vecs * logs.asDiagonal() * vecs.adjoint());
  }
  return out;
}

Matrix restrict_to(const Matrix& m, const Matrix& range) {
  return hermitian_part(range.adjoint() * m * range);
}

// ---------------------------------------------------------------------------
// Interior point method on block-diagonal real symmetric cones.

namespace {

using Blocks = std::vector<RealMatrix>;

/// max b.u  s.t.  S = C - sum_k u_k A_k >= 0;   min <C, X>  s.t.  A(X) = b, X >= 0.
struct StandardForm {
  Blocks c;
  std::vector<Blocks> a;
  Vector b;
};

double inner(const Blocks& x, const Blocks& y) {
  double acc = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) acc += (x[k].array() * y[k].array()).sum();
  return acc;
}

double norm(const Blocks& x) { return std::sqrt(inner(x, x)); }

Blocks identity_like(const Blocks& shape, double scale) {
  Blocks out;
  for (const auto& blk : shape) out.push_back(scale * RealMatrix::Identity(blk.rows(), blk.cols()));
  return out;
}

Blocks combine(const std::vector<Blocks>& a, const Vector& u) {
  Blocks out;
  for (const auto& blk : a.front()) out.push_back(RealMatrix::Zero(blk.rows(), blk.cols()));
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double w = u(static_cast<Eigen::Index>(k));
    if (w == 0.0) continue;
    for (std::size_t j = 0; j < out.size(); ++j) out[j] += w * a[k][j];
  }
  return out;
}

/// Largest step in (0, inf] keeping X + alpha dX positive definite.
double max_step(const Blocks& x, const Blocks& dx) {
  double alpha = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < x.size(); ++k) {
    Eigen::LLT<RealMatrix> llt(x[k]);
    if (llt.info() != Eigen::Success) return 0.0;
    RealMatrix m = llt.matrixL().solve(dx[k]);
    m = llt.matrixL().solve(m.transpose()).transpose();
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(0.5 * (m + m.transpose()), Eigen::EigenvaluesOnly);
    const double lam = es.eigenvalues().minCoeff();
    if (lam < 0.0) alpha = std::min(alpha, -1.0 / lam);
  }
  return alpha;
}

struct IpmResult {
  Vector u;
  Blocks x;
  Blocks s;
  int iterations = 0;
  bool converged = false;
  bool unbounded = false;
  KktResiduals residuals;
};

IpmResult run_ipm(const StandardForm& f, const SdpOptions& opt) {
  const auto m = static_cast<Eigen::Index>(f.a.size());
  double dim_total = 0.0;
  for (const auto& blk : f.c) dim_total += static_cast<double>(blk.rows());

  double a_scale = norm(f.c);
  for (const auto& ak : f.a) a_scale = std::max(a_scale, norm(ak));
  IpmResult res;
  res.u = Vector::Zero(m);
  res.x = identity_like(f.c, 1.0);
  res.s = identity_like(f.c, std::max(1.0, a_scale / std::sqrt(dim_total)));

  const double inner_tol = 1e-2 * std::min(opt.feas_tol, opt.gap_tol);
  const double b_norm = f.b.norm();
  const double c_norm = norm(f.c);

  IpmResult best = res;
  double best_merit = std::numeric_limits<double>::infinity();

  for (int it = 0; it <= opt.max_iterations; ++it) {
    auto& X = res.x;
    auto& S = res.s;
    Blocks rd = f.c;
    {
      const Blocks atu = combine(f.a, res.u);
      for (std::size_t k = 0; k < rd.size(); ++k) rd[k] -= S[k] + atu[k];
    }
    Vector rp(m);
    for (Eigen::Index k = 0; k < m; ++k) {
      rp(k) = f.b(k) - inner(f.a[static_cast<std::size_t>(k)], X);
    }
    const double pobj = inner(f.c, X);
    const double dobj = f.b.dot(res.u);
    const double gap = inner(X, S);
    const double scale = 1.0 + std::abs(pobj) + std::abs(dobj);
    res.residuals.primal = rp.norm() / (1.0 + b_norm);
    res.residuals.dual = norm(rd) / (1.0 + c_norm);
    res.residuals.gap = std::max(std::abs(pobj - dobj), std::abs(gap)) / scale;
    res.iterations = it;

    const double merit = std::max({res.residuals.primal, res.residuals.dual, res.residuals.gap});
    if (merit < best_merit) {
      best_merit = merit;
      best = res;
    }
    if (merit < inner_tol) {
      res.converged = true;
      return res;
    }
    if (res.u.lpNorm<Eigen::Infinity>() > 1e9 && res.residuals.dual < opt.feas_tol) {
      res.unbounded = true;
      return res;
    }
    if (it == opt.max_iterations) break;

    Blocks s_inv;
    bool ok = true;
    for (const auto& blk : S) {
      Eigen::LLT<RealMatrix> llt(blk);
      if (llt.info() != Eigen::Success) {
        ok = false;
        break;
      }
      RealMatrix inv = llt.solve(RealMatrix::Identity(blk.rows(), blk.cols()));
      s_inv.push_back(0.5 * (inv + inv.transpose()));
    }
    if (!ok) break;

    // Schur complement M_ij = tr(A_i X A_j S^-1).
    std::vector<Blocks> ax(f.a.size()), as(f.a.size());
    for (std::size_t k = 0; k < f.a.size(); ++k) {
      for (std::size_t j = 0; j < X.size(); ++j) {
        ax[k].push_back(f.a[k][j] * X[j]);
        as[k].push_back(f.a[k][j] * s_inv[j]);
      }
    }
    RealMatrix schur(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
      for (Eigen::Index j = 0; j < m; ++j) {
        double acc = 0.0;
        const auto& xi = ax[static_cast<std::size_t>(i)];
        const auto& sj = as[static_cast<std::size_t>(j)];
        for (std::size_t b = 0; b < X.size(); ++b) {
          acc += (xi[b].array() * sj[b].transpose().array()).sum();
        }
        schur(i, j) = acc;
      }
    }
    schur = 0.5 * (schur + schur.transpose());
    Eigen::LDLT<RealMatrix> schur_ldlt(schur);
    Eigen::ColPivHouseholderQR<RealMatrix> schur_qr;
    const bool use_qr = schur_ldlt.info() != Eigen::Success || !schur_ldlt.isPositive();
    if (use_qr) schur_qr.compute(schur);

    // HKM direction for complementarity target X S -> rc.
    auto direction = [&](const Blocks& rc, Vector& du, Blocks& dx, Blocks& ds) {
      Blocks t1;
      for (std::size_t j = 0; j < X.size(); ++j) t1.push_back((rc[j] - X[j] * rd[j]) * s_inv[j]);
      Vector rhs(m);
      for (Eigen::Index k = 0; k < m; ++k) {
        rhs(k) = rp(k) - inner(f.a[static_cast<std::size_t>(k)], t1);
      }
      du = use_qr ? Vector(schur_qr.solve(rhs)) : Vector(schur_ldlt.solve(rhs));
      ds = rd;
      const Blocks adu = combine(f.a, du);
      for (std::size_t j = 0; j < ds.size(); ++j) ds[j] -= adu[j];
      dx.clear();
      for (std::size_t j = 0; j < X.size(); ++j) {
        RealMatrix d = (rc[j] - X[j] * ds[j]) * s_inv[j];
        dx.push_back(0.5 * (d + d.transpose()));
      }
    };

    const double mu = gap / dim_total;
    Blocks rc;
    for (std::size_t j = 0; j < X.size(); ++j) rc.push_back(-X[j] * S[j]);
    Vector du_a;
    Blocks dx_a, ds_a;
    direction(rc, du_a, dx_a, ds_a);
    const double ap_a = std::min(1.0, max_step(X, dx_a));
    const double ad_a = std::min(1.0, max_step(S, ds_a));
    double new_gap = 0.0;
    for (std::size_t j = 0; j < X.size(); ++j) {
      new_gap += ((X[j] + ap_a * dx_a[j]).array() * (S[j] + ad_a * ds_a[j]).array()).sum();
    }
    const double sigma = std::clamp(std::pow(std::max(new_gap, 0.0) / gap, 3.0), 0.0, 1.0);

    for (std::size_t j = 0; j < X.size(); ++j) {
      rc[j] = sigma * mu * RealMatrix::Identity(X[j].rows(), X[j].cols()) - X[j] * S[j] -
              dx_a[j] * ds_a[j];
    }
    Vector du;
    Blocks dx, ds;
    direction(rc, du, dx, ds);
    const double gamma = 0.95;
    const double ap = std::min(1.0, gamma * max_step(X, dx));
    const double ad = std::min(1.0, gamma * max_step(S, ds));
    if (!(ap > 0.0) || !(ad > 0.0)) break;
    for (std::size_t j = 0; j < X.size(); ++j) {
      X[j] += ap * dx[j];
      S[j] += ad * ds[j];
    }
    res.u += ad * du;
  }
  best.converged = false;
  return best;
}

}  // namespace

// ---------------------------------------------------------------------------

SdpSolution solve(const SdpProblem& p) {
  const Eigen::Index r = p.dim();
  const auto q = static_cast<Eigen::Index>(p.num_terms());
  if (p.l0.cols() != r) throw DimensionError("L0 is not square");
  if (p.h_tilde_expectations.size() != p.h_tilde.size()) {
    throw DimensionError("one expectation per kernel matrix required");
  }
  auto check_herm = [](const Matrix& m, const char* what) {
    if (m.size() && (m - m.adjoint()).cwiseAbs().maxCoeff() > 1e-10) {
      throw ContractError(std::string(what) + " is not Hermitian");
    }
  };
  check_herm(p.l0, "L0");
  for (const auto& h : p.h_tilde) {
    if (h.rows() != r || h.cols() != r) throw DimensionError("kernel matrix size mismatch");
    check_herm(h, "kernel matrix");
  }

  const bool normalized = p.mode == SdpMode::Normalized;
  Vector e(q);
  for (Eigen::Index a = 0; a < q; ++a) e(a) = p.h_tilde_expectations[static_cast<std::size_t>(a)];
  if (normalized && (q == 0 || e.lpNorm<Eigen::Infinity>() < 1e-12)) {
    throw NormalizationDegenerate(
        "every kernel direction has zero expectation; the normalization cannot be satisfied");
  }

  // y = y0 + N z with e.y0 = -1 and N an orthonormal basis of e-perp.
  Vector y0 = Vector::Zero(q);
  RealMatrix null_basis;
  if (normalized) {
    y0 = -e / e.squaredNorm();
    Eigen::HouseholderQR<RealMatrix> qr(e);
    const RealMatrix full_q = qr.householderQ() * RealMatrix::Identity(q, q);
    null_basis = full_q.rightCols(q - 1);
  } else {
    null_basis = RealMatrix::Identity(q, q);
  }
  const Eigen::Index free_vars = null_basis.cols();

  StandardForm f;
  const bool with_t_block = normalized;
  auto blocks_of = [&](const RealMatrix& main, double t_entry) {
    Blocks out{main};
    if (with_t_block) out.push_back(RealMatrix::Constant(1, 1, t_entry));
    return out;
  };
  Matrix base = normalized ? Matrix(Matrix::Zero(r, r)) : p.l0;
  for (Eigen::Index a = 0; a < q; ++a) base += y0(a) * p.h_tilde[static_cast<std::size_t>(a)];
  f.c = blocks_of(real_embedding(base), 0.0);
  for (Eigen::Index j = 0; j < free_vars; ++j) {
    Matrix dir = Matrix::Zero(r, r);
    for (Eigen::Index a = 0; a < q; ++a) {
      dir += null_basis(a, j) * p.h_tilde[static_cast<std::size_t>(a)];
    }
    f.a.push_back(blocks_of(-real_embedding(dir), 0.0));
  }
  if (normalized) f.a.push_back(blocks_of(-real_embedding(p.l0), -1.0));
  f.a.push_back(blocks_of(RealMatrix::Identity(2 * r, 2 * r), 0.0));
  const auto m = static_cast<Eigen::Index>(f.a.size());
  f.b = Vector::Zero(m);
  f.b(m - 1) = 1.0;

  const IpmResult ipm = run_ipm(f, p.options);

  SdpSolution sol;
  sol.iterations = ipm.iterations;
  sol.residuals = ipm.residuals;
  const Vector z = ipm.u.head(free_vars);
  sol.y = y0 + null_basis * z;
  sol.temperature = normalized ? ipm.u(free_vars) : 1.0;
  sol.mu = ipm.u(m - 1);
  sol.dual_matrix = hermitian_part(complex_from_embedding(ipm.x.front()));
  sol.dual_temperature = with_t_block ? ipm.x.back()(0, 0) : 0.0;
  if (normalized) {
    double acc = 0.0;
    for (Eigen::Index a = 0; a < q; ++a) {
      acc += e(a) * (sol.dual_matrix * p.h_tilde[static_cast<std::size_t>(a)]).trace().real();
    }
    sol.dual_objective = -acc / e.squaredNorm();
  } else {
    sol.dual_objective = (sol.dual_matrix * p.l0).trace().real();
  }

  if (ipm.unbounded) {
    sol.status = SdpStatus::Infeasible;
  } else if (ipm.converged ||
             (sol.residuals.primal <= p.options.feas_tol && sol.residuals.dual <= p.options.feas_tol &&
              sol.residuals.gap <= p.options.gap_tol)) {
    sol.status = SdpStatus::Optimal;
  } else {
    sol.status = SdpStatus::NumericalTrouble;
  }
  return sol;
}

// ---------------------------------------------------------------------------

double ResidualReport::primal() const {
  return std::max({lmi_violation, temperature_violation, normalization});
}
double ResidualReport::dual() const {
  return std::max({dual_trace, dual_temperature, dual_stationarity, dual_psd_violation});
}
double ResidualReport::gap() const { return std::max(duality_gap, complementarity); }
double ResidualReport::max() const {
  return std::max({primal(), dual(), gap(), lambda_min_consistency});
}

ResidualReport check_solution(const SdpProblem& p, const SdpSolution& s) {
  ResidualReport rep;
  const bool normalized = p.mode == SdpMode::Normalized;
  const Eigen::Index r = p.dim();
  Matrix pencil = s.temperature * p.l0;
  for (std::size_t a = 0; a < p.h_tilde.size(); ++a) {
    pencil += s.y(static_cast<Eigen::Index>(a)) * p.h_tilde[a];
  }
  const double lam = min_eigenvalue(pencil);
  const Matrix slack = pencil - s.mu * Matrix::Identity(r, r);
  rep.lmi_violation = std::max(0.0, s.mu - lam);
  rep.lambda_min_consistency = std::abs(lam - s.mu);
  if (normalized) {
    rep.temperature_violation = std::max(0.0, -s.temperature);
    double acc = 0.0;
    for (std::size_t a = 0; a < p.h_tilde.size(); ++a) {
      acc += s.y(static_cast<Eigen::Index>(a)) * p.h_tilde_expectations[a];
    }
    rep.normalization = std::abs(acc + 1.0);
  }

  const Matrix& zm = s.dual_matrix;
  rep.dual_trace = std::abs(zm.trace().real() - 1.0);
  const double zl = (zm.conjugate().cwiseProduct(p.l0)).sum().real();
  if (normalized) rep.dual_temperature = std::abs(zl + s.dual_temperature);
  for (std::size_t a = 0; a < p.h_tilde.size(); ++a) {
    const double zh = (zm.conjugate().cwiseProduct(p.h_tilde[a])).sum().real();
    const double target = normalized ? -s.dual_objective * p.h_tilde_expectations[a] : 0.0;
    rep.dual_stationarity = std::max(rep.dual_stationarity, std::abs(zh - target));
  }
  rep.dual_psd_violation = std::max({0.0, -min_eigenvalue(zm), normalized ? -s.dual_temperature : 0.0});
  rep.duality_gap = std::abs(s.dual_objective - s.mu);
  rep.complementarity = std::abs((zm.conjugate().cwiseProduct(slack)).sum().real()) +
                        (normalized ? std::abs(s.dual_temperature * s.temperature) : 0.0);
  return rep;
}

// ---------------------------------------------------------------------------
// Fixtures

namespace {

void write_matrix(std::ostream& os, const Matrix& m) {
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) os << ' ';
      os << format_double(m(i, j).real()) << ' ' << format_double(m(i, j).imag());
    }
    os << '\n';
  }
}

std::string expect_key(std::istream& is, const std::string& key) {
  std::string token;
  if (!(is >> token) || token != key) {
    throw ParseError("expected '" + key + "', found '" + token + "'");
  }
  return token;
}

double read_double(std::istream& is) {
  std::string token;
  if (!(is >> token)) throw ParseError("unexpected end of fixture");
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
  if (ec != std::errc() || ptr != token.data() + token.size()) {
    throw ParseError("bad number '" + token + "'");
  }
  return v;
}

Matrix read_matrix(std::istream& is, Eigen::Index r) {
  Matrix m(r, r);
  for (Eigen::Index i = 0; i < r; ++i) {
    for (Eigen::Index j = 0; j < r; ++j) {
      const double re = read_double(is);
      const double im = read_double(is);
      m(i, j) = {re, im};
    }
  }
  return m;
}

}  // namespace

void write_problem(std::ostream& os, const SdpProblem& p) {
  os << "sdp_problem 1\n";
  os << "mode " << to_string(p.mode) << '\n';
  os << "r " << p.dim() << '\n';
  os << "q " << p.num_terms() << '\n';
  os << "feas_tol " << format_double(p.options.feas_tol) << '\n';
  os << "gap_tol " << format_double(p.options.gap_tol) << '\n';
  os << "max_iterations " << p.options.max_iterations << '\n';
  os << "L0\n";
  write_matrix(os, p.l0);
  for (std::size_t a = 0; a < p.num_terms(); ++a) {
    os << "h_tilde " << a << '\n';
    write_matrix(os, p.h_tilde[a]);
  }
  os << "h_tilde_expectations";
  for (double v : p.h_tilde_expectations) os << ' ' << format_double(v);
  os << '\n';
}

SdpProblem read_problem(std::istream& is) {
  SdpProblem p;
  expect_key(is, "sdp_problem");
  if (read_double(is) != 1.0) throw ParseError("unsupported fixture version");
  expect_key(is, "mode");
  std::string mode;
  is >> mode;
  if (mode == "normalized") {
    p.mode = SdpMode::Normalized;
  } else if (mode == "fixed_temperature") {
    p.mode = SdpMode::FixedTemperature;
  } else {
    throw ParseError("unknown mode '" + mode + "'");
  }
  expect_key(is, "r");
  const auto r = static_cast<Eigen::Index>(read_double(is));
  expect_key(is, "q");
  const auto q = static_cast<std::size_t>(read_double(is));
  expect_key(is, "feas_tol");
  p.options.feas_tol = read_double(is);
  expect_key(is, "gap_tol");
  p.options.gap_tol = read_double(is);
  expect_key(is, "max_iterations");
  p.options.max_iterations = static_cast<int>(read_double(is));
  expect_key(is, "L0");
  p.l0 = read_matrix(is, r);
  for (std::size_t a = 0; a < q; ++a) {
    expect_key(is, "h_tilde");
    read_double(is);
    p.h_tilde.push_back(read_matrix(is, r));
  }
  expect_key(is, "h_tilde_expectations");
  for (std::size_t a = 0; a < q; ++a) p.h_tilde_expectations.push_back(read_double(is));
  return p;
}

void write_solution(std::ostream& os, const SdpSolution& s) {
  os << "sdp_solution 1\n";
  os << "status " << to_string(s.status) << '\n';
  os << "temperature " << format_double(s.temperature) << '\n';
  os << "mu " << format_double(s.mu) << '\n';
  os << "y " << s.y.size();
  for (Eigen::Index a = 0; a < s.y.size(); ++a) os << ' ' << format_double(s.y(a));
  os << '\n';
  os << "dual_temperature " << format_double(s.dual_temperature) << '\n';
  os << "dual_objective " << format_double(s.dual_objective) << '\n';
  os << "iterations " << s.iterations << '\n';
  os << "residuals " << format_double(s.residuals.primal) << ' ' << format_double(s.residuals.dual)
     << ' ' << format_double(s.residuals.gap) << '\n';
  os << "dual_matrix " << s.dual_matrix.rows() << '\n';
  write_matrix(os, s.dual_matrix);
}

SdpSolution read_solution(std::istream& is) {
  SdpSolution s;
  expect_key(is, "sdp_solution");
  if (read_double(is) != 1.0) throw ParseError("unsupported fixture version");
  expect_key(is, "status");
  std::string status;
  is >> status;
  if (status == "Optimal") {
    s.status = SdpStatus::Optimal;
  } else if (status == "Infeasible") {
    s.status = SdpStatus::Infeasible;
  } else if (status == "NumericalTrouble") {
    s.status = SdpStatus::NumericalTrouble;
  } else {
    throw ParseError("unknown status '" + status + "'");
  }
  expect_key(is, "temperature");
  s.temperature = read_double(is);
  expect_key(is, "mu");
  s.mu = read_double(is);
  expect_key(is, "y");
  const auto q = static_cast<Eigen::Index>(read_double(is));
  s.y.resize(q);
  for (Eigen::Index a = 0; a < q; ++a) s.y(a) = read_double(is);
  expect_key(is, "dual_temperature");
  s.dual_temperature = read_double(is);
  expect_key(is, "dual_objective");
  s.dual_objective = read_double(is);
  expect_key(is, "iterations");
  s.iterations = static_cast<int>(read_double(is));
  expect_key(is, "residuals");
  s.residuals.primal = read_double(is);
  s.residuals.dual = read_double(is);
  s.residuals.gap = read_double(is);
  expect_key(is, "dual_matrix");
  const auto r = static_cast<Eigen::Index>(read_double(is));
  s.dual_matrix = read_matrix(is, r);
  return s;
}

}  // namespace hamlearn
