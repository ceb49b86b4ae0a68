#include "scvi/reference_solver.hpp"

#include "scvi/error.hpp"

namespace scvi {

namespace {

BlockVector prox_all(const ScviProblem& problem, const BlockVector& x, const Vector& step) {
  BlockVector out = BlockVector::zeros(problem.layout_ptr());
  const auto& layout = problem.layout();
  for (std::size_t i = 0; i < problem.num_blocks(); ++i)
    out.block(i) = prox_map(problem.geometry(i), x.block(i),
                            step.segment(layout.offset(i), layout.size(i)));
  return out;
}

}  // namespace

ReferenceSolveResult solve_deterministic(const ScviProblem& problem, const BlockVector& x0,
                                         const ReferenceSolveOptions& options) {
  double gamma = options.step;
  if (gamma <= 0.0) {
    const double l = problem.constants().global_lipschitz;
    if (!(l > 0.0)) throw DomainError("reference solve needs a step or a global Lipschitz constant");
    gamma = 0.5 / l;
  }
  const Mapping& f = problem.map();
  ReferenceSolveResult res;
  res.solution = x0;
  BlockVector& x = res.solution;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    const BlockVector y = prox_all(problem, x, gamma * f.value(x.values()));
    res.residual = (x.values() - y.values()).norm() / gamma;
    res.iterations = it;
    if (res.residual <= options.tolerance) {
      res.converged = true;
      return res;
    }
    x = prox_all(problem, x, gamma * f.value(y.values()));
    if (!x.values().allFinite()) throw NonFiniteError("reference solve produced non-finite iterate");
  }
  res.iterations = options.max_iterations;
  return res;
}

}  // namespace scvi
