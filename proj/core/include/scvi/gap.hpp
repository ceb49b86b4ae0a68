#pragma once

#include <cstddef>
#include <cstdint>
#include <variant>

#include "scvi/problem.hpp"

namespace scvi {

struct GridBruteForce {
  double resolution = 1e-2;
};

struct MultiStartAscent {
  std::size_t starts = 16;
  double tolerance = 1e-8;
  std::uint64_t seed = 0;
  std::size_t max_iterations = 5000;
};

struct AffineExact {
  double tolerance = 1e-10;
  std::size_t max_iterations = 200000;
};

using GapMethod = std::variant<GridBruteForce, MultiStartAscent, AffineExact>;

struct GapEstimate {
  double value = 0.0;        // best feasible φ(y), a lower bound on G(x)
  double upper_bound = 0.0;  // certified upper bound (AffineExact), else +inf
  std::size_t evaluations = 0;
  BlockVector maximizer;
};

// G(x) = sup_{y∈X} ⟨F(y), x − y⟩
GapEstimate estimate_gap(const ScviProblem& problem, const BlockVector& x, const GapMethod& method);
double gap_function(const ScviProblem& problem, const BlockVector& x, const GapMethod& method);
GapMethod default_gap_method(const ScviProblem& problem);

}  // namespace scvi
