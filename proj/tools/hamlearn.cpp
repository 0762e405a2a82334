#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "hamlearn/error.hpp"
#include "hamlearn/experiment.hpp"
#include "hamlearn/verify.hpp"

using namespace hamlearn;

namespace {

// Exit codes shared by every subcommand.
constexpr int kExitCandidate = 0;
constexpr int kExitUsage = 1;
constexpr int kExitNotStationary = 2;
constexpr int kExitNotGibbs = 3;
constexpr int kExitDataError = 4;

struct ConfigFlags {
  std::string path;
  std::optional<int> n;
  std::optional<double> anisotropy;
  bool literal = false;
  std::string terms;
  std::vector<double> temperatures;
  std::vector<double> sigma_grid;
  std::optional<int> runs;
  std::optional<int> k_local;
  std::optional<std::uint64_t> seed;
  bool include_identity = false;
  bool project_delta = false;
  std::optional<double> epsilon_w;
  std::optional<double> gram_floor;
  bool serial = false;

  void attach(CLI::App* app) {
    app->add_option("-c,--config", path, "INI config file; flags below override it");
    app->add_option("--n", n, "Number of sites");
    app->add_option("--anisotropy", anisotropy, "XXZ anisotropy");
    app->add_flag("--literal-paper-model", literal, "Use the repeated-YY form of the XXZ chain");
    app->add_option("--terms", terms, "Custom Hamiltonian, e.g. \"1.0 * Z0 Z1 + 0.5 * X0\"");
    app->add_option("--temperatures", temperatures, "Temperatures")->delimiter(',');
    app->add_option("--sigma-grid", sigma_grid, "Noise standard deviations")->delimiter(',');
    app->add_option("--runs", runs, "Runs per grid point");
    app->add_option("--k-local", k_local, "Locality of the b and h bases");
    app->add_option("--seed", seed, "Master seed");
    app->add_flag("--include-identity", include_identity, "Add the identity to the b basis");
    app->add_flag("--project-delta", project_delta,
                  "Project out the nonpositive eigenspace of Delta instead of failing");
    app->add_option("--epsilon-w", epsilon_w, "Fixed kernel threshold for W");
    app->add_option("--gram-floor", gram_floor, "Relative Gram eigenvalue floor");
    app->add_flag("--serial", serial, "Run kernels and sweeps on one thread");
  }

  ExperimentConfig resolve() const {
    ExperimentConfig c = path.empty() ? ExperimentConfig{} : load_config(path);
    if (n) c.n = *n;
    if (anisotropy) c.model.anisotropy = *anisotropy;
    if (literal) c.model.literal_paper_model = true;
    if (!terms.empty()) {
      c.model.kind = ModelConfig::Kind::Custom;
      c.model.terms = terms;
    }
    if (!temperatures.empty()) c.temperatures = temperatures;
    if (!sigma_grid.empty()) c.sigma_grid = sigma_grid;
    if (runs) c.runs_per_point = *runs;
    if (k_local) c.k_local = *k_local;
    if (seed) c.seed = *seed;
    if (include_identity) c.include_identity = true;
    if (project_delta) c.project_delta = true;
    if (epsilon_w) c.epsilon_w_override = *epsilon_w;
    if (gram_floor) c.gram_floor_rel = *gram_floor;
    return c;
  }

  Execution exec() const { return serial ? Execution::Serial : Execution::Parallel; }
};

std::string table_name(double temperature) { return "table_T" + format_double(temperature) + ".txt"; }

int cmd_gen(const ConfigFlags& flags, const std::string& out_dir, std::optional<double> sigma) {
  ExperimentConfig cfg = flags.resolve();
  cfg.validate();
  const PauliOperator h = model_hamiltonian(cfg);
  const LearningSetup setup = make_setup(cfg);
  std::filesystem::create_directories(out_dir);
  for (std::size_t ti = 0; ti < cfg.temperatures.size(); ++ti) {
    const double t = cfg.temperatures[ti];
    ExpectationTable table = build_table(gibbs_density(h, t), setup.required, flags.exec());
    if (sigma && *sigma > 0.0) table = add_noise(table, *sigma, derive_seed(cfg.seed, 0, ti, 0));
    const std::string path = (std::filesystem::path(out_dir) / table_name(t)).string();
    save_table(path, table);
    std::cout << path << " (" << table.size() << " strings)\n";
  }
  return 0;
}

int cmd_learn(const ConfigFlags& flags, const std::string& table_path, const std::string& out_path,
              std::optional<double> true_temperature) {
  const ExpectationTable table = load_table(table_path);
  ExperimentConfig cfg = flags.resolve();
  cfg.n = table.num_sites();
  cfg.validate();
  const LearningSetup setup = make_setup(cfg);
  ReconstructOptions opts = reconstruct_options(cfg);
  opts.exec = flags.exec();

  ReconstructionResult res;
  try {
    res = reconstruct(table, setup.b, setup.h_terms, opts);
  } catch (const Error& e) {
    std::cout << "verdict: error\n" << e.what() << '\n';
    return kExitDataError;
  }

  if (!out_path.empty()) {
    std::ofstream os(out_path);
    if (!os) throw Error("cannot write '" + out_path + "'");
    write_result(os, res);
  }

  std::cout << "verdict: " << to_string(res.verdict) << '\n';
  switch (res.verdict) {
    case Verdict::NotStationary:
      std::cout << "No Hamiltonian in the span is a quasi-symmetry of the state; it is not a "
                   "stationary state of any of them.\n";
      break;
    case Verdict::NotGibbs:
      std::cout << "The certificate is negative: the state is not a Gibbs state of any "
                   "Hamiltonian in the span.\n";
      break;
    case Verdict::Candidate:
      std::cout << "The state may be a Gibbs state of the recovered Hamiltonian; it is one if the "
                   "perturbing operators span the whole algebra.\n";
      break;
  }
  const auto& d = res.diagnostics;
  std::cout << "r = " << d.r << ", s = " << d.s << ", q = " << d.q
            << ", epsilon_w = " << format_double(d.epsilon_w) << '\n';
  if (res.verdict == Verdict::NotStationary) return kExitNotStationary;
  std::cout << "temperature = " << format_double(res.temperature)
            << "\nmu_star = " << format_double(res.mu_star) << '\n';
  if (true_temperature) {
    const Vector z = coefficients_on(model_hamiltonian(cfg), setup.h_strings);
    if (res.y_star.norm() > 0.0 && z.norm() > 0.0) {
      std::cout << "theta = " << format_double(recovery_angle(res.y_star, z)) << '\n';
      const TemperatureRatio tr = temperature_ratio(res.y_star, res.temperature, z,
                                                    *true_temperature);
      std::cout << "temperature_ratio = " << format_double(tr.ratio)
                << (tr.reliable ? "" : " (unreliable)") << '\n';
    }
  }
  return res.verdict == Verdict::Candidate ? kExitCandidate : kExitNotGibbs;
}

int cmd_sweep(const ConfigFlags& flags, const std::string& out_path, const std::string& agg_path) {
  ExperimentConfig cfg = flags.resolve();
  cfg.validate();
  const std::vector<SweepRecord> records = run_sweep(cfg, flags.exec());
  if (out_path.empty() || out_path == "-") {
    write_sweep_csv(std::cout, records);
  } else {
    std::ofstream os(out_path);
    if (!os) throw Error("cannot write '" + out_path + "'");
    write_sweep_csv(os, records);
  }
  if (!agg_path.empty()) {
    std::ofstream os(agg_path);
    if (!os) throw Error("cannot write '" + agg_path + "'");
    write_aggregate_csv(os, aggregate(records));
  }
  return 0;
}

int cmd_verify(const BatteryOptions& opts) {
  if (opts.n < 1 || opts.n > GnsSpace::kMaxSites) {
    std::cerr << "error: --n must lie in [1, " << GnsSpace::kMaxSites << "]\n";
    return kExitUsage;
  }
  std::vector<CheckResult> results;
  try {
    results = run_battery(opts);
  } catch (const Error& e) {
    std::cout << "FAIL build_gns: " << e.what() << '\n';
    return kExitUsage;
  }
  int failures = 0;
  for (const auto& r : results) {
    std::printf("%s %-40s residual %.3e  tol %.1e\n", r.passed ? "PASS" : "FAIL", r.name.c_str(),
                r.residual, r.tolerance);
    if (!r.passed) ++failures;
  }
  std::printf("%d/%zu checks passed\n", static_cast<int>(results.size()) - failures,
              results.size());
  return failures == 0 ? 0 : kExitUsage;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hamiltonian and temperature reconstruction from Gibbs-state expectation values"};
  app.require_subcommand(1);

  ConfigFlags gen_flags, learn_flags, sweep_flags;

  auto* gen = app.add_subcommand("gen", "Write exact expectation tables, one per temperature");
  gen_flags.attach(gen);
  std::string gen_out = ".";
  std::optional<double> gen_sigma;
  gen->add_option("-o,--out", gen_out, "Output directory");
  gen->add_option("--sigma", gen_sigma, "Add Gaussian noise of this standard deviation");

  auto* learn = app.add_subcommand("learn", "Reconstruct a Hamiltonian from a table");
  learn_flags.attach(learn);
  std::string learn_table, learn_out;
  std::optional<double> learn_truth;
  learn->add_option("table", learn_table, "Expectation table file")->required();
  learn->add_option("-o,--out", learn_out, "Result file");
  learn->add_option("--true-temperature", learn_truth,
                    "Compare against the configured model at this temperature");

  auto* sweep = app.add_subcommand("sweep", "Noise sweep over (sigma, T, run)");
  sweep_flags.attach(sweep);
  std::string sweep_out = "-", sweep_agg;
  sweep->add_option("-o,--out", sweep_out, "Per-run CSV ('-' for stdout)");
  sweep->add_option("--aggregate", sweep_agg, "Mean/std CSV per grid point");

  auto* verify = app.add_subcommand("verify", "Run the GNS and stability verification battery");
  BatteryOptions battery;
  verify->add_option("--n", battery.n, "Sites (at most 4)");
  verify->add_option("--seed", battery.seed, "Seed");
  verify->add_option("--instances", battery.instances, "Random instances");
  verify->add_option("--corrupt-trace", battery.corrupt_trace,
                     "Add this to the trace of rho to exercise the failure path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (gen->parsed()) return cmd_gen(gen_flags, gen_out, gen_sigma);
    if (learn->parsed()) return cmd_learn(learn_flags, learn_table, learn_out, learn_truth);
    if (sweep->parsed()) return cmd_sweep(sweep_flags, sweep_out, sweep_agg);
    if (verify->parsed()) return cmd_verify(battery);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitDataError;
  }
  return kExitUsage;
}
