#include "hamlearn/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <string_view>

#include "hamlearn/error.hpp"

namespace hamlearn {

// ---------------------------------------------------------------------------
// Config

void ExperimentConfig::validate() const {
  if (n < 1) throw ContractError("n must be positive");
  if (n > dense_limit()) {
    throw ContractError("n = " + std::to_string(n) + " exceeds the dense limit of " +
                        std::to_string(dense_limit()) + " sites");
  }
  if (k_local < 1 || k_local > n) throw ContractError("k_local must lie in [1, n]");
  if (temperatures.empty()) throw ContractError("temperatures must not be empty");
  for (double t : temperatures) {
    if (!(t > 0.0)) throw ContractError("temperatures must be positive");
  }
  if (sigma_grid.empty()) throw ContractError("sigma_grid must not be empty");
  for (double s : sigma_grid) {
    if (!(s >= 0.0)) throw ContractError("sigma_grid entries must be non-negative");
  }
  if (runs_per_point < 1) throw ContractError("runs_per_point must be at least 1");
  if (model.kind == ModelConfig::Kind::Custom && model.terms.empty()) {
    throw ContractError("custom model needs 'terms'");
  }
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

class LineParser {
 public:
  LineParser(std::string source, int line) : source_(std::move(source)), line_(line) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(source_ + ":" + std::to_string(line_) + ": " + msg);
  }

  double number(std::string_view s) const {
    s = trim(s);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail("expected a number, got '" + std::string(s) + "'");
    }
    return v;
  }

  long long integer(std::string_view s) const {
    s = trim(s);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail("expected an integer, got '" + std::string(s) + "'");
    }
    return v;
  }

  std::uint64_t unsigned_integer(std::string_view s) const {
    s = trim(s);
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
      fail("expected a non-negative integer, got '" + std::string(s) + "'");
    }
    return v;
  }

  bool boolean(std::string_view s) const {
    s = trim(s);
    if (s == "true" || s == "yes" || s == "1" || s == "on") return true;
    if (s == "false" || s == "no" || s == "0" || s == "off") return false;
    fail("expected true or false, got '" + std::string(s) + "'");
  }

  std::vector<double> list(std::string_view s) const {
    std::vector<double> out;
    if (trim(s).empty()) return out;
    while (true) {
      const auto comma = s.find(',');
      const auto item = trim(s.substr(0, comma));
      if (item.empty()) fail("empty list entry");
      out.push_back(number(item));
      if (comma == std::string_view::npos) break;
      s.remove_prefix(comma + 1);
    }
    return out;
  }

 private:
  std::string source_;
  int line_;
};

}  // namespace

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
  ExperimentConfig cfg;
  std::string raw;
  std::string section;
  int lineno = 0;
  while (std::getline(is, raw)) {
    ++lineno;
    const LineParser p(source, lineno);
    std::string_view line = raw;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') p.fail("unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      static const std::set<std::string> known{"system", "model", "sweep", "basis", "learner"};
      if (!known.count(section)) p.fail("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) p.fail("expected 'key = value'");
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const std::string full = section.empty() ? key : section + "." + key;

    if (full == "system.n" || full == "n") {
      cfg.n = static_cast<int>(p.integer(value));
    } else if (full == "system.seed" || full == "seed") {
      cfg.seed = p.unsigned_integer(value);
    } else if (full == "model.type") {
      if (value == "xxz") {
        cfg.model.kind = ModelConfig::Kind::Xxz;
      } else if (value == "custom") {
        cfg.model.kind = ModelConfig::Kind::Custom;
      } else {
        p.fail("model type must be 'xxz' or 'custom'");
      }
    } else if (full == "model.anisotropy") {
      cfg.model.anisotropy = p.number(value);
    } else if (full == "model.literal_paper_model") {
      cfg.model.literal_paper_model = p.boolean(value);
    } else if (full == "model.terms") {
      cfg.model.terms = std::string(value);
    } else if (full == "sweep.temperatures") {
      cfg.temperatures = p.list(value);
    } else if (full == "sweep.sigma_grid") {
      cfg.sigma_grid = p.list(value);
    } else if (full == "sweep.runs_per_point") {
      cfg.runs_per_point = static_cast<int>(p.integer(value));
    } else if (full == "basis.k_local") {
      cfg.k_local = static_cast<int>(p.integer(value));
    } else if (full == "basis.include_identity") {
      cfg.include_identity = p.boolean(value);
    } else if (full == "learner.project_delta") {
      cfg.project_delta = p.boolean(value);
    } else if (full == "learner.epsilon_w_override") {
      if (value == "none") {
        cfg.epsilon_w_override.reset();
      } else {
        cfg.epsilon_w_override = p.number(value);
      }
    } else if (full == "learner.gram_floor_rel") {
      cfg.gram_floor_rel = p.number(value);
    } else if (full == "learner.certificate_tol_rel") {
      cfg.certificate_tol_rel = p.number(value);
    } else {
      p.fail("unknown key '" + full + "'");
    }
  }
  if (cfg.model.kind == ModelConfig::Kind::Custom && !cfg.model.terms.empty()) {
    try {
      PauliOperator::parse(cfg.model.terms, cfg.n);
    } catch (const Error& e) {
      throw ParseError(source + ": model.terms: " + e.what());
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error("cannot open '" + path + "'");
  return parse_config(is, path);
}

// ---------------------------------------------------------------------------
// Models

PauliOperator xxz_hamiltonian(int n, double anisotropy, bool literal) {
  PauliOperator h(n);
  for (int i = 0; i + 1 < n; ++i) {
    h.add_term(PauliString(n, {{i, Pauli::X}, {i + 1, Pauli::X}}), -1.0);
    h.add_term(PauliString(n, {{i, Pauli::Y}, {i + 1, Pauli::Y}}), -1.0);
    const Pauli last = literal ? Pauli::Y : Pauli::Z;
    h.add_term(PauliString(n, {{i, last}, {i + 1, last}}), -anisotropy);
  }
  return h;
}

PauliOperator model_hamiltonian(const ExperimentConfig& config) {
  if (config.model.kind == ModelConfig::Kind::Custom) {
    return PauliOperator::parse(config.model.terms, config.n);
  }
  return xxz_hamiltonian(config.n, config.model.anisotropy, config.model.literal_paper_model);
}

LearningSetup make_setup(const ExperimentConfig& config) {
  LearningSetup s;
  s.b = enumerate_geometric_k_local(config.n, config.k_local, config.include_identity);
  s.h_strings = enumerate_geometric_k_local(config.n, config.k_local, false);
  for (const auto& p : s.h_strings) s.h_terms.emplace_back(p);
  s.required = required_strings(s.b, s.h_terms);
  // The true Hamiltonian's own strings, for reporting.
  const PauliOperator h = model_hamiltonian(config);
  for (const auto& [p, c] : h.terms()) s.required.insert(p);
  return s;
}

Vector coefficients_on(const PauliOperator& h, const std::vector<PauliString>& terms) {
  Vector z(static_cast<Eigen::Index>(terms.size()));
  for (std::size_t k = 0; k < terms.size(); ++k) {
    z(static_cast<Eigen::Index>(k)) = h.coefficient(terms[k]).real();
  }
  return z;
}

ReconstructOptions reconstruct_options(const ExperimentConfig& config) {
  ReconstructOptions o;
  o.gram_floor_rel = config.gram_floor_rel;
  o.epsilon_w_override = config.epsilon_w_override;
  o.project_delta = config.project_delta;
  o.certificate_tol_rel = config.certificate_tol_rel;
  return o;
}

// ---------------------------------------------------------------------------
// Sweep

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::string error_class(const std::exception& e) {
  if (dynamic_cast<const DeltaNotPositive*>(&e)) return "DeltaNotPositive";
  if (dynamic_cast<const GramDegenerate*>(&e)) return "GramDegenerate";
  if (dynamic_cast<const NormalizationDegenerate*>(&e)) return "NormalizationDegenerate";
  if (dynamic_cast<const IncompleteDataError*>(&e)) return "IncompleteData";
  return "Error";
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t sigma_index,
                          std::uint64_t temperature_index, std::uint64_t run_index) {
  std::uint64_t h = splitmix64(master);
  h = splitmix64(h ^ sigma_index);
  h = splitmix64(h ^ temperature_index);
  return splitmix64(h ^ run_index);
}

std::vector<SweepRecord> run_sweep(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const PauliOperator h = model_hamiltonian(config);
  const LearningSetup setup = make_setup(config);
  const Vector z_true = coefficients_on(h, setup.h_strings);
  ReconstructOptions opts = reconstruct_options(config);
  opts.exec = Execution::Serial;

  std::vector<ExpectationTable> exact;
  exact.reserve(config.temperatures.size());
  for (double t : config.temperatures) {
    exact.push_back(build_table(gibbs_density(h, t), setup.required, exec));
  }

  const std::size_t ns = config.sigma_grid.size();
  const std::size_t nt = config.temperatures.size();
  const auto nr = static_cast<std::size_t>(config.runs_per_point);
  std::vector<SweepRecord> records(ns * nt * nr);

  auto job = [&](std::size_t idx) {
    const std::size_t si = idx / (nt * nr);
    const std::size_t ti = (idx / nr) % nt;
    const std::size_t run = idx % nr;
    SweepRecord rec;
    rec.sigma_noise = config.sigma_grid[si];
    rec.temperature = config.temperatures[ti];
    rec.run = static_cast<int>(run);
    const auto start = std::chrono::steady_clock::now();
    try {
      const ExpectationTable table =
          rec.sigma_noise > 0.0
              ? add_noise(exact[ti], rec.sigma_noise, derive_seed(config.seed, si, ti, run))
              : exact[ti];
      const ReconstructionResult res = reconstruct(table, setup.b, setup.h_terms, opts);
      rec.verdict = to_string(res.verdict);
      rec.q = res.diagnostics.q;
      if (res.verdict != Verdict::NotStationary) rec.mu_star = res.mu_star;
      if (res.verdict != Verdict::NotStationary && res.y_star.norm() > 0.0) {
        rec.theta = recovery_angle(res.y_star, z_true);
        const TemperatureRatio tr = temperature_ratio(res.y_star, res.temperature, z_true,
                                                      rec.temperature);
        if (tr.reliable) rec.temp_ratio = tr.ratio;
      }
    } catch (const std::exception& e) {
      rec.verdict = error_class(e);
      rec.message = e.what();
    }
    rec.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                      .count();
    records[idx] = std::move(rec);
  };

  const auto total = static_cast<std::ptrdiff_t>(records.size());
  if (exec == Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < total; ++i) job(static_cast<std::size_t>(i));
  } else {
    for (std::ptrdiff_t i = 0; i < total; ++i) job(static_cast<std::size_t>(i));
  }

  std::stable_sort(records.begin(), records.end(), [](const SweepRecord& a, const SweepRecord& b) {
    if (a.sigma_noise != b.sigma_noise) return a.sigma_noise < b.sigma_noise;
    if (a.temperature != b.temperature) return a.temperature < b.temperature;
    return a.run < b.run;
  });
  return records;
}

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_double(*v) : std::string(); }

}  // namespace

void write_sweep_csv(std::ostream& os, const std::vector<SweepRecord>& records) {
  os << "sigma_noise,temperature,run,theta,temp_ratio,mu_star,verdict,q,wall_ms\n";
  for (const auto& r : records) {
    os << format_double(r.sigma_noise) << ',' << format_double(r.temperature) << ',' << r.run << ','
       << opt(r.theta) << ',' << opt(r.temp_ratio) << ',' << opt(r.mu_star) << ',' << r.verdict
       << ',' << r.q << ',' << format_double(std::round(r.wall_ms * 1000.0) / 1000.0) << '\n';
  }
}

std::vector<SweepAggregate> aggregate(const std::vector<SweepRecord>& records) {
  std::map<std::pair<double, double>, std::vector<const SweepRecord*>> groups;
  for (const auto& r : records) groups[{r.sigma_noise, r.temperature}].push_back(&r);

  auto stats = [](const std::vector<double>& v, std::optional<double>& mean,
                  std::optional<double>& sd) {
    if (v.empty()) return;
    double m = 0.0;
    for (double x : v) m += x;
    m /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - m) * (x - m);
    mean = m;
    sd = v.size() > 1 ? std::sqrt(var / static_cast<double>(v.size() - 1)) : 0.0;
  };

  std::vector<SweepAggregate> out;
  for (const auto& [key, group] : groups) {
    SweepAggregate a;
    a.sigma_noise = key.first;
    a.temperature = key.second;
    std::vector<double> thetas, ratios;
    for (const auto* r : group) {
      ++a.runs;
      if (r->verdict == "Candidate") ++a.candidates;
      else if (r->verdict == "DeltaNotPositive") ++a.delta_not_positive;
      else if (r->verdict != "NotGibbs" && r->verdict != "NotStationary") ++a.other_failures;
      if (r->theta) thetas.push_back(*r->theta);
      if (r->temp_ratio) ratios.push_back(*r->temp_ratio);
    }
    stats(thetas, a.theta_mean, a.theta_std);
    stats(ratios, a.temp_ratio_mean, a.temp_ratio_std);
    out.push_back(a);
  }
  return out;
}

void write_aggregate_csv(std::ostream& os, const std::vector<SweepAggregate>& rows) {
  os << "sigma_noise,temperature,runs,candidates,delta_not_positive,other_failures,theta_mean,"
        "theta_std,temp_ratio_mean,temp_ratio_std\n";
  for (const auto& a : rows) {
    os << format_double(a.sigma_noise) << ',' << format_double(a.temperature) << ',' << a.runs << ','
       << a.candidates << ',' << a.delta_not_positive << ',' << a.other_failures << ','
       << opt(a.theta_mean) << ',' << opt(a.theta_std) << ',' << opt(a.temp_ratio_mean) << ','
       << opt(a.temp_ratio_std) << '\n';
  }
}

}  // namespace hamlearn
