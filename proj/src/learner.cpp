#include "hamlearn/learner.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "hamlearn/error.hpp"

namespace hamlearn {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::NotStationary: return "NotStationary";
    case Verdict::NotGibbs: return "NotGibbs";
    case Verdict::Candidate: return "Candidate";
  }
  return "?";
}

ReconstructionResult reconstruct(const ExpectationTable& table, const std::vector<PauliString>& b,
                                 const std::vector<PauliOperator>& h_terms,
                                 const ReconstructOptions& options) {
  MomentOptions mopts;
  mopts.gram_floor_rel = options.gram_floor_rel;
  mopts.epsilon_w_override = options.epsilon_w_override;
  mopts.exec = options.exec;
  const MomentSet moments = compute_moments(table, b, h_terms, mopts);

  ReconstructionResult out;
  auto& diag = out.diagnostics;
  diag.r = b.size();
  diag.s = h_terms.size();
  diag.q = moments.kernel.dimension();
  diag.epsilon_w = moments.epsilon_w;
  diag.commutator_terms = moments.commutator_terms;
  diag.w_spectrum = moments.w.spectrum;
  diag.gram_spectrum = moments.ortho.gram_eigenvalues;
  diag.delta_min_eigenvalue = min_eigenvalue(moments.delta);
  out.y_star = Vector::Zero(static_cast<Eigen::Index>(h_terms.size()));

  if (diag.q == 0) {
    out.verdict = Verdict::NotStationary;
    return out;
  }

  const LogDelta ld = log_psd(moments.delta, options.delta_eig_floor, options.project_delta);
  diag.reduced_dimension = static_cast<std::size_t>(ld.reduced_dimension());

  SdpProblem problem;
  problem.l0 = ld.l0;
  problem.mode = options.mode;
  problem.options = options.sdp;
  problem.h_tilde_expectations = moments.kernel.h_tilde_expectations;
  for (const auto& h : moments.kernel.h_tilde_mats) {
    problem.h_tilde.push_back(ld.projected ? restrict_to(h, ld.range) : h);
  }
  const SdpSolution sol = solve(problem);

  diag.l0_norm = ld.l0.size() ? ld.l0.operatorNorm() : 0.0;
  diag.certificate_tol = options.certificate_tol_rel * diag.l0_norm;
  diag.sdp_status = to_string(sol.status);
  diag.sdp_iterations = sol.iterations;
  diag.primal_residual = sol.residuals.primal;
  diag.dual_residual = sol.residuals.dual;
  diag.gap_residual = sol.residuals.gap;

  if (sol.status == SdpStatus::Infeasible) {
    throw Error("learning program is unbounded; the kernel directions do not fix a scale");
  }
  if (sol.status == SdpStatus::NumericalTrouble) {
    throw Error("interior point solver stalled after " + std::to_string(sol.iterations) +
                " iterations");
  }

  out.y_star = moments.kernel.coeffs.transpose() * sol.y;
  out.temperature = sol.temperature;
  out.mu_star = sol.mu;
  diag.zero_temperature = sol.temperature <= options.sdp.feas_tol;
  out.verdict = sol.mu < -diag.certificate_tol ? Verdict::NotGibbs : Verdict::Candidate;
  return out;
}

double recovery_angle(const Vector& y, const Vector& z) {
  if (y.size() != z.size()) throw DimensionError("coefficient vectors differ in length");
  const double ny = y.norm();
  const double nz = z.norm();
  if (ny == 0.0 || nz == 0.0) throw ContractError("recovery angle of a zero vector");
  const double c = std::clamp(std::abs(y.dot(z)) / (ny * nz), 0.0, 1.0);
  return std::acos(c);
}

TemperatureRatio temperature_ratio(const Vector& y_star, double t_star, const Vector& z_true,
                                   double t_true) {
  if (y_star.size() != z_true.size()) throw DimensionError("coefficient vectors differ in length");
  const double zz = z_true.squaredNorm();
  if (zz == 0.0 || y_star.norm() == 0.0) throw ContractError("temperature ratio of a zero vector");
  TemperatureRatio out;
  out.scale = y_star.dot(z_true) / zz;
  // |c| tiny relative to |y| means the angle is near pi/2.
  out.reliable = std::abs(out.scale) * std::sqrt(zz) > 1e-8 * y_star.norm();
  out.ratio = (t_star / out.scale) / t_true;
  return out;
}

namespace {

void write_vector(std::ostream& os, const char* key, const Vector& v) {
  os << key << " =";
  for (Eigen::Index i = 0; i < v.size(); ++i) os << ' ' << format_double(v(i));
  os << '\n';
}

}  // namespace

void write_result(std::ostream& os, const ReconstructionResult& r) {
  const auto& d = r.diagnostics;
  os << "verdict = " << to_string(r.verdict) << '\n';
  os << "temperature = " << format_double(r.temperature) << '\n';
  os << "mu_star = " << format_double(r.mu_star) << '\n';
  write_vector(os, "y_star", r.y_star);
  os << "r = " << d.r << '\n';
  os << "s = " << d.s << '\n';
  os << "q = " << d.q << '\n';
  os << "epsilon_w = " << format_double(d.epsilon_w) << '\n';
  os << "commutator_terms = " << d.commutator_terms << '\n';
  os << "delta_min_eigenvalue = " << format_double(d.delta_min_eigenvalue) << '\n';
  os << "reduced_dimension = " << d.reduced_dimension << '\n';
  os << "certificate_tol = " << format_double(d.certificate_tol) << '\n';
  os << "sdp_status = " << (d.sdp_status.empty() ? "none" : d.sdp_status) << '\n';
  os << "sdp_iterations = " << d.sdp_iterations << '\n';
  os << "primal_residual = " << format_double(d.primal_residual) << '\n';
  os << "dual_residual = " << format_double(d.dual_residual) << '\n';
  os << "gap_residual = " << format_double(d.gap_residual) << '\n';
  os << "zero_temperature = " << (d.zero_temperature ? "true" : "false") << '\n';
  write_vector(os, "w_spectrum", d.w_spectrum);
  write_vector(os, "gram_spectrum", d.gram_spectrum);
}

}  // namespace hamlearn
