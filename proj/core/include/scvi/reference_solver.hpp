#pragma once

#include <cstddef>

#include "scvi/problem.hpp"

namespace scvi {

struct ReferenceSolveOptions {
  double step = 0.0;  // 0: 1/(2L) from the problem's global Lipschitz constant
  double tolerance = 1e-12;
  std::size_t max_iterations = 5'000'000;
};

struct ReferenceSolveResult {
  BlockVector solution;
  double residual = 0.0;  // ‖x − P(x, γF(x))‖₂ / γ
  std::size_t iterations = 0;
  bool converged = false;
};

// Deterministic full-block extragradient on the expected map.
ReferenceSolveResult solve_deterministic(const ScviProblem& problem, const BlockVector& x0,
                                         const ReferenceSolveOptions& options = {});

}  // namespace scvi
