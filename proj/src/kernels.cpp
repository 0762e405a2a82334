#include "hamlearn/kernels.hpp"

#include <bit>
#include <complex>
#include <cstdint>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace hamlearn {

namespace {

double pauli_trace(const Matrix& rho, const PauliString& p) {
  const auto dim = static_cast<std::uint64_t>(rho.rows());
  const auto xm = p.dense_x_mask();
  const auto zm = p.dense_z_mask();
  // Column j of p holds i^{#Y} (-1)^{z.j} at row j ^ x.
  std::complex<double> acc{};
  for (std::uint64_t j = 0; j < dim; ++j) {
    const auto v = rho(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j ^ xm));
    if (std::popcount(j & zm) & 1) {
      acc -= v;
    } else {
      acc += v;
    }
  }
  return (acc * Phase{static_cast<std::uint8_t>(p.y_count() & 3)}.value()).real();
}

}  // namespace

std::vector<double> expectation_kernel(const Matrix& rho, std::span<const PauliString> strings,
                                       Execution exec) {
  std::vector<double> out(strings.size());
  const auto count = static_cast<std::ptrdiff_t>(strings.size());
  if (exec == Execution::Serial) {
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      out[static_cast<std::size_t>(k)] = pauli_trace(rho, strings[static_cast<std::size_t>(k)]);
    }
  } else {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      out[static_cast<std::size_t>(k)] = pauli_trace(rho, strings[static_cast<std::size_t>(k)]);
    }
  }
  return out;
}

int parallel_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

}  // namespace hamlearn
