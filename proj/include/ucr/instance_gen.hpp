#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "ucr/types.hpp"

namespace ucr {

// Hourly demand factors, midnight through 11 PM. Peak (4 PM) is 1.0.
const std::array<double, 24>& hourly_factors();

// Randomized 24h-profile instance: per-generator cost coefficients and
// timing parameters drawn from the pinned SplitMix64 stream, ramp and
// start/stop caps tied to capacity, demand as the outer product of the base
// case demand and the hourly factors, and initial statuses from a
// single-period economic dispatch at the first hour's demand.
UcInstance generate(const PowerNetwork& net, std::uint64_t seed, int horizon);

// The economic-dispatch step on its own: solves the one-period unpenalized
// relaxation at demand column 0 and rounds commitments at 0.5. Throws
// std::runtime_error if that dispatch is not solvable.
std::vector<InitialState> initial_dispatch(const UcInstance& inst);

}  // namespace ucr
