#pragma once

#include <optional>
#include <string>
#include <vector>

#include "ucr/relax.hpp"

namespace ucr {

struct RoundLog {
  int round = 0;  // 1-based
  double objective_cost = 0.0;
  double penalty_value = 0.0;
  double max_violation = 0.0;
  double integrality_gap = 0.0;
  conic::SolverStatus solver_status = conic::SolverStatus::NumericalFailure;
  double wall_seconds = 0.0;
};

// Per-constraint-family maxima of the original problem's residuals at a
// candidate point, all in per-unit except cost_identity (relative).
struct ViolationReport {
  double power_balance = 0.0;
  double flow_limit = 0.0;
  double voltage_bounds = 0.0;
  double integrality = 0.0;
  double capacity = 0.0;
  double ramp = 0.0;
  double min_up_down = 0.0;
  double cost_identity = 0.0;
  double max_violation = 0.0;
  bool feasible = false;
};

// A schedule candidate evaluated against the original constraints.
struct Candidate {
  Eigen::MatrixXcd v;  // |V| x T
  Eigen::MatrixXd x;   // |G| x T, in [0, 1]
  Eigen::MatrixXd p;   // |G| x T
  Eigen::MatrixXd q;   // |G| x T
  std::optional<Eigen::MatrixXd> c;  // reported costs, checked when present
};

struct RunOptions {
  double mu = 1.0;
  double alpha = 1.0;
  double eta = 0.5;
  int rounds = 50;
  double tol_feas = 1e-6;
  double tol_int = 1e-6;
  Mode mode = Mode::EdgeSocp;
  conic::SolverOptions solver;
  bool verbose = false;
};

struct RunResult {
  Candidate best;                 // lowest-cost feasible candidate, or last iterate
  double best_cost = 0.0;         // original-model cost of `best`
  bool feasible = false;          // whether any round produced a feasible point
  std::vector<RoundLog> logs;
  std::string error;              // nonempty when the run aborted early
};

// The paper's initial anchor: flat voltages, initial commitment statuses,
// minimum active dispatch, and the flows induced by the flat profile.
Anchor default_anchor(const UcInstance& inst, const NetworkMatrices& mats);

// Sequential penalized relaxation: solve, re-anchor on the solution, repeat.
RunResult run(const UcInstance& inst, const RunOptions& opts);

// Evaluates every original constraint family at the candidate (commitments
// rounded to binary first; the rounding distance is the integrality family).
ViolationReport check(const UcInstance& inst, const NetworkMatrices& mats,
                      const Candidate& cand, double tol_feas = 1e-6);

}  // namespace ucr
