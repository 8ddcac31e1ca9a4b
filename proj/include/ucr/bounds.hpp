#pragma once

#include "ucr/relax.hpp"

namespace ucr {

// Unpenalized relaxation lower bound on the original scheduling cost, in $.
// Full-SDP mode is restricted to networks of at most 120 buses; larger
// requests throw std::invalid_argument. Solver failures throw
// std::runtime_error.
double lower_bound(const UcInstance& inst, Mode mode,
                   const conic::SolverOptions& solver = {});

// GAP metric: 100 * (feasible - bound) / feasible. Requires feasible > 0.
double gap_percent(double feasible_cost, double bound);

}  // namespace ucr
