#pragma once

#include <string>
#include <vector>

#include "ucr/conic/program.hpp"

namespace ucr::conic {

enum class SolverStatus {
  Optimal,
  NearOptimal,
  Infeasible,
  Unbounded,
  NumericalFailure,
};

std::string to_string(SolverStatus s);

enum class Backend {
  Auto,  // interior point unless a PSD block is too large for it
  Ipm,
  Admm,
};

struct SolverOptions {
  Backend backend = Backend::Auto;
  double feas_tol = 1e-8;
  double rel_gap_tol = 1e-8;
  int max_iters = 100;        // interior point iterations
  int admm_max_iters = 200000;
  double admm_tol = 1e-7;
  bool verbose = false;
  // PSD side length above which Auto switches to the splitting backend.
  int ipm_psd_limit = 20;
};

struct SolveResult {
  SolverStatus status = SolverStatus::NumericalFailure;
  std::vector<double> x;       // primal values, size n (valid on (Near)Optimal)
  double objective = 0.0;      // includes the program's constant offset
  int iterations = 0;
  double solve_seconds = 0.0;
  std::string message;
};

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts = {});

}  // namespace ucr::conic
