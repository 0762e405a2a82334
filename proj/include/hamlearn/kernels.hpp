#pragma once

#include <span>
#include <vector>

#include "hamlearn/linalg.hpp"
#include "hamlearn/pauli.hpp"

namespace hamlearn {

/// Every data-parallel kernel has a serial reference path. Both paths compute
/// each output entry with the same instruction sequence, so results are
/// bitwise identical regardless of the schedule.
enum class Execution { Serial, Parallel };

/// tr(rho p) for each string, real part. O(2^n) per string.
std::vector<double> expectation_kernel(const Matrix& rho, std::span<const PauliString> strings,
                                       Execution exec);

/// Number of OpenMP threads that `Execution::Parallel` will use (1 without OpenMP).
int parallel_threads();

}  // namespace hamlearn
