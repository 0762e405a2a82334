// Serial reference vs OpenMP path for the data-parallel kernels.
#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cstdio>
#include <functional>
#include <vector>

#include "hamlearn/experiment.hpp"
#include "hamlearn/gns_moments.hpp"
#include "hamlearn/kernels.hpp"

using namespace hamlearn;

namespace {

double median_ms(const std::function<void()>& fn, int repeats) {
  std::vector<double> t;
  for (int i = 0; i < repeats; ++i) {
    const auto start = std::chrono::steady_clock::now();
    fn();
    t.push_back(std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start)
                    .count());
  }
  std::sort(t.begin(), t.end());
  return t[t.size() / 2];
}

void report(const char* name, double serial, double parallel, bool identical) {
  std::printf("%-28s serial %9.2f ms  parallel %9.2f ms  speedup %5.2fx  %s\n", name, serial,
              parallel, serial / parallel, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main(int argc, char** argv) {
  const int repeats = argc > 1 ? std::atoi(argv[1]) : 5;
  std::printf("threads: %d, repeats: %d\n", parallel_threads(), repeats);

  {
    const int n = 8;
    const PauliOperator h = xxz_hamiltonian(n, 0.5);
    const DensityMatrix rho = gibbs_density(h, 1.0);
    const auto strings = enumerate_geometric_k_local(n, 4, false);
    std::vector<double> a, b;
    const double s = median_ms([&] { a = expectation_kernel(rho.matrix(), strings, Execution::Serial); },
                               repeats);
    const double p = median_ms(
        [&] { b = expectation_kernel(rho.matrix(), strings, Execution::Parallel); }, repeats);
    report("expectation_kernel n=8", s, p, a == b);
  }

  {
    ExperimentConfig cfg;
    cfg.n = 6;
    const LearningSetup setup = make_setup(cfg);
    const ExpectationTable table =
        build_table(gibbs_density(model_hamiltonian(cfg), 1.0), setup.required);
    const OrthoBasis ortho = orthonormalize(gram_matrix(table, setup.b), 1e-10, setup.b);
    std::vector<HamiltonianMatrix> a, b;
    const double s = median_ms(
        [&] { a = build_h_matrices(table, ortho, setup.h_terms, Execution::Serial); }, repeats);
    const double p = median_ms(
        [&] { b = build_h_matrices(table, ortho, setup.h_terms, Execution::Parallel); }, repeats);
    bool same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k) same = a[k].raw == b[k].raw;
    report("build_h_matrices n=6", s, p, same);
  }

  {
    ExperimentConfig cfg;
    cfg.n = 4;
    cfg.temperatures = {1.0, 2.0};
    cfg.sigma_grid = {1e-6, 1e-4};
    cfg.runs_per_point = 4;
    std::vector<SweepRecord> a, b;
    const double s = median_ms([&] { a = run_sweep(cfg, Execution::Serial); }, repeats);
    const double p = median_ms([&] { b = run_sweep(cfg, Execution::Parallel); }, repeats);
    bool same = a.size() == b.size();
    for (std::size_t k = 0; same && k < a.size(); ++k) {
      same = a[k].theta == b[k].theta && a[k].mu_star == b[k].mu_star && a[k].verdict == b[k].verdict;
    }
    report("run_sweep n=4 (16 jobs)", s, p, same);
  }
  return 0;
}
