#include "ucr/instance_gen.hpp"

#include <algorithm>
#include <stdexcept>

#include "ucr/driver.hpp"
#include "ucr/network.hpp"
#include "ucr/relax.hpp"
#include "ucr/rng.hpp"

namespace ucr {

const std::array<double, 24>& hourly_factors() {
  static const std::array<double, 24> f = {
      0.6843, 0.6451, 0.6198, 0.6044, 0.6057, 0.6269, 0.6773, 0.6937,
      0.7297, 0.8084, 0.8930, 0.9223, 0.9460, 0.9516, 0.9721, 0.9992,
      1.0000, 0.9638, 0.9608, 0.9271, 0.9270, 0.9089, 0.7654, 0.7641};
  return f;
}

std::vector<InitialState> initial_dispatch(const UcInstance& inst) {
  const int G = inst.network.n_generators();

  // One period, no startup dynamics: unit timing relaxed so only capacity
  // and the network constraints bind.
  UcInstance ed;
  ed.network = inst.network;
  ed.horizon = 1;
  ed.demand = inst.demand.col(0);
  ed.economics = inst.economics;
  ed.initial.resize(G);
  for (int g = 0; g < G; ++g) {
    UcEconomics& ec = ed.economics[g];
    ec.min_up = 1;
    ec.min_dn = 1;
    double cap = inst.network.generators[g].p_max + 1.0;
    ec.ramp = cap;
    ec.startstop = cap;
    ed.initial[g] = InitialState{0, 0.0, 1000};
  }

  NetworkMatrices mats = build_matrices(ed.network);
  PenaltyMatrix pen = build_penalty_matrix(ed.network, 0.5, 1.0);
  Anchor anchor = default_anchor(ed, mats);
  AssembledProgram asmbl = assemble(ed, mats, pen, anchor, 0.0, Mode::EdgeSocp);
  conic::SolveResult res = conic::solve(asmbl.prog);
  if (res.status != conic::SolverStatus::Optimal &&
      res.status != conic::SolverStatus::NearOptimal)
    throw std::runtime_error("initial dispatch failed: " + conic::to_string(res.status) +
                             (res.message.empty() ? "" : " (" + res.message + ")"));
  RelaxationSolution sol = extract(asmbl, res, ed, mats, pen, anchor, 0.0);

  std::vector<InitialState> out(G);
  for (int g = 0; g < G; ++g) {
    // Committed when the relaxed commitment rounds up or the dispatch
    // actually uses the unit. With relaxed binaries the commitment settles
    // at p / p_max, so a threshold on x alone would shut down large units
    // that carry a big share of the load and leave the first scheduling
    // hours infeasible once minimum-down times pin them off.
    bool on = sol.x(g, 0) >= 0.5 || sol.p(g, 0) > 1e-6;
    out[g].status = on ? 1 : 0;
    out[g].p0 = on ? sol.p(g, 0) : 0.0;
  }
  return out;
}

UcInstance generate(const PowerNetwork& net, std::uint64_t seed, int horizon) {
  if (horizon < 1) throw std::invalid_argument("horizon must be at least 1");
  const int V = net.n_buses(), G = net.n_generators();
  const auto& factors = hourly_factors();

  UcInstance inst;
  inst.network = net;
  inst.horizon = horizon;
  inst.seed = seed;

  SplitMix64 rng(seed);
  inst.economics.resize(G);
  std::vector<int> held(G);
  for (int g = 0; g < G; ++g) {
    UcEconomics& ec = inst.economics[g];
    ec.alpha = rng.uniform(0.0, 1.0);
    ec.beta = rng.uniform(0.0, 10.0);
    ec.gamma = rng.uniform(0.0, 100.0);
    ec.gamma_dn = rng.uniform(0.0, 30.0);
    ec.gamma_up = rng.uniform(0.0, 50.0);
    const Generator& gen = net.generators[g];
    ec.ramp = std::max(gen.p_max / 4.0, gen.p_min);
    ec.startstop = ec.ramp;
    ec.min_up = 1 + rng.poisson(4.0);
    ec.min_dn = 1 + rng.poisson(4.0);
    held[g] = rng.poisson(4.0);
  }

  inst.demand.resize(V, horizon);
  for (int k = 0; k < V; ++k)
    for (int t = 0; t < horizon; ++t)
      inst.demand(k, t) = net.buses[k].demand * factors[t % 24];

  inst.initial = initial_dispatch(inst);
  for (int g = 0; g < G; ++g) inst.initial[g].held_for = held[g];
  return inst;
}

}  // namespace ucr
