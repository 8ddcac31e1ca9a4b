#include "ucr/bounds.hpp"

#include <stdexcept>

#include "ucr/driver.hpp"

namespace ucr {

double lower_bound(const UcInstance& inst, Mode mode,
                   const conic::SolverOptions& solver) {
  if (mode == Mode::FullSdp && inst.network.n_buses() > 120)
    throw std::invalid_argument(
        "full-sdp bound is limited to networks of at most 120 buses");
  NetworkMatrices mats = build_matrices(inst.network);
  // mu = 0: the penalty matrix is never applied, any valid one will do.
  PenaltyMatrix pen = build_penalty_matrix(inst.network, 0.5, 1.0);
  Anchor anchor = default_anchor(inst, mats);
  AssembledProgram asmbl = assemble(inst, mats, pen, anchor, 0.0, mode);
  conic::SolveResult res = conic::solve(asmbl.prog, solver);
  if (res.status != conic::SolverStatus::Optimal &&
      res.status != conic::SolverStatus::NearOptimal)
    throw std::runtime_error("bound solve failed: " + conic::to_string(res.status) +
                             (res.message.empty() ? "" : " (" + res.message + ")"));
  RelaxationSolution sol = extract(asmbl, res, inst, mats, pen, anchor, 0.0);
  return sol.objective_cost;
}

double gap_percent(double feasible_cost, double bound) {
  if (!(feasible_cost > 0.0))
    throw std::invalid_argument("gap requires a positive feasible cost");
  return 100.0 * (feasible_cost - bound) / feasible_cost;
}

}  // namespace ucr
