#include "ucr/driver.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

namespace ucr {

namespace {

double history_status(const InitialState& ini, int tau) {
  double st = static_cast<double>(ini.status);
  return tau >= -ini.held_for ? st : 1.0 - st;
}

}  // namespace

Anchor default_anchor(const UcInstance& inst, const NetworkMatrices& mats) {
  const int V = inst.network.n_buses(), G = inst.network.n_generators(),
            E = inst.network.n_branches(), T = inst.horizon;
  Anchor a;
  a.v0 = Eigen::MatrixXcd::Ones(V, T);
  a.x0.resize(G, T);
  a.s0.resize(G, T);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t) {
      a.x0(g, t) = static_cast<double>(inst.initial[g].status);
      a.s0(g, t) = Complex(inst.network.generators[g].p_min, 0.0);
    }
  // Flows induced by the flat profile: with v0 = 1, v0 v0* is all-ones, so
  // each flow is the conjugated row sum of the branch admittance matrix.
  a.sf0.resize(E, T);
  a.st0.resize(E, T);
  Eigen::VectorXcd ones = Eigen::VectorXcd::Ones(V);
  Eigen::VectorXcd fsum = mats.Y_from * ones, tsum = mats.Y_to * ones;
  for (int l = 0; l < E; ++l)
    for (int t = 0; t < T; ++t) {
      a.sf0(l, t) = std::conj(fsum(l));
      a.st0(l, t) = std::conj(tsum(l));
    }
  return a;
}

ViolationReport check(const UcInstance& inst, const NetworkMatrices& mats,
                      const Candidate& cand, double tol_feas) {
  const PowerNetwork& net = inst.network;
  const int V = net.n_buses(), G = net.n_generators(), E = net.n_branches(),
            T = inst.horizon;
  ViolationReport rep;

  // Round commitments; the distance rounded away is the integrality family.
  Eigen::MatrixXd xr(G, T);
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t) {
      double x = std::min(1.0, std::max(0.0, cand.x(g, t)));
      xr(g, t) = x >= 0.5 ? 1.0 : 0.0;
      rep.integrality = std::max(rep.integrality, std::abs(cand.x(g, t) - xr(g, t)));
    }

  std::vector<std::vector<int>> gens_at(V);
  for (int g = 0; g < G; ++g) gens_at[net.generators[g].bus].push_back(g);

  for (int t = 0; t < T; ++t) {
    Eigen::VectorXcd v = cand.v.col(t);
    Eigen::VectorXcd yv = mats.Y * v;
    for (int k = 0; k < V; ++k) {
      Complex inj(0.0, 0.0);
      for (int g : gens_at[k]) inj += Complex(cand.p(g, t), cand.q(g, t));
      Complex res = inst.demand(k, t) + v(k) * std::conj(yv(k)) - inj;
      rep.power_balance = std::max(rep.power_balance, std::abs(res));
      double mag = std::abs(v(k));
      rep.voltage_bounds = std::max(
          {rep.voltage_bounds, net.buses[k].v_min - mag, mag - net.buses[k].v_max});
    }
    Eigen::VectorXcd yfv = mats.Y_from * v, ytv = mats.Y_to * v;
    for (int l = 0; l < E; ++l) {
      const Branch& br = net.branches[l];
      if (br.unlimited) continue;
      double sf = std::abs(v(br.from) * std::conj(yfv(l)));
      double st = std::abs(v(br.to) * std::conj(ytv(l)));
      rep.flow_limit = std::max({rep.flow_limit, sf - br.f_max, st - br.f_max});
    }
  }

  for (int g = 0; g < G; ++g) {
    const Generator& gen = net.generators[g];
    const UcEconomics& ec = inst.economics[g];
    const InitialState& ini = inst.initial[g];
    auto status_at = [&](int tau) {
      return tau >= 1 ? xr(g, tau - 1) : history_status(ini, tau);
    };
    for (int t = 0; t < T; ++t) {
      double x = xr(g, t), p = cand.p(g, t), q = cand.q(g, t);
      rep.capacity = std::max({rep.capacity, gen.p_min * x - p, p - gen.p_max * x,
                               gen.q_min * x - q, q - gen.q_max * x});
      double xp = status_at(t);      // paper index t (previous period)
      double pp = t > 0 ? cand.p(g, t - 1) : ini.p0;
      rep.ramp = std::max({rep.ramp,
                           p - pp - ec.ramp * xp - ec.startstop * (1.0 - xp),
                           pp - p - ec.ramp * x - ec.startstop * (1.0 - x)});
      for (int tau = (t + 1) - ec.min_up + 1; tau <= t + 1; ++tau)
        rep.min_up_down =
            std::max(rep.min_up_down, status_at(tau) - status_at(tau - 1) - x);
      for (int tau = (t + 1) - ec.min_dn + 1; tau <= t + 1; ++tau)
        rep.min_up_down = std::max(rep.min_up_down,
                                   status_at(tau - 1) - status_at(tau) - (1.0 - x));
    }
  }

  if (cand.c) {
    double reported = cand.c->sum();
    double recomputed = cost_of(inst, xr, cand.p);
    rep.cost_identity =
        std::abs(reported - recomputed) / std::max(1.0, std::abs(recomputed));
  }

  rep.max_violation = std::max({rep.power_balance, rep.flow_limit, rep.voltage_bounds,
                                rep.integrality, rep.capacity, rep.ramp,
                                rep.min_up_down, rep.cost_identity});
  rep.feasible = rep.max_violation <= tol_feas;
  return rep;
}

RunResult run(const UcInstance& inst, const RunOptions& opts) {
  if (opts.rounds < 1) throw std::invalid_argument("rounds must be positive");
  if (opts.mu < 0.0) throw std::invalid_argument("mu must be nonnegative");
  if (opts.tol_feas <= 0.0) throw std::invalid_argument("tol_feas must be positive");
  RunResult out;
  NetworkMatrices mats = build_matrices(inst.network);
  PenaltyMatrix pen = build_penalty_matrix(inst.network, opts.eta, opts.alpha);
  Anchor anchor = default_anchor(inst, mats);

  double best_cost = 0.0;
  bool have_best = false;
  int flat_rounds = 0;
  double prev_cost = 0.0;
  Candidate last;

  for (int round = 1; round <= opts.rounds; ++round) {
    auto t0 = std::chrono::steady_clock::now();
    AssembledProgram asmbl = assemble(inst, mats, pen, anchor, opts.mu, opts.mode);
    conic::SolveResult res = conic::solve(asmbl.prog, opts.solver);
    double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    if (res.status != conic::SolverStatus::Optimal &&
        res.status != conic::SolverStatus::NearOptimal) {
      out.logs.push_back({round, 0.0, 0.0, 0.0, 0.0, res.status, wall});
      out.error = "round " + std::to_string(round) + ": " + conic::to_string(res.status) +
                  (res.message.empty() ? "" : " (" + res.message + ")");
      break;
    }
    RelaxationSolution sol =
        extract(asmbl, res, inst, mats, pen, anchor, opts.mu);

    Candidate cand{sol.v, sol.x.cwiseMax(0.0).cwiseMin(1.0), sol.p, sol.q, sol.c};
    ViolationReport rep = check(inst, mats, cand, opts.tol_feas);

    out.logs.push_back({round, sol.objective_cost, sol.penalty_value,
                        rep.max_violation, rep.integrality, res.status, wall});
    if (opts.verbose)
      std::fprintf(stderr, "round %d cost %.6e kappa %.3e viol %.3e %s\n", round,
                   sol.objective_cost, sol.penalty_value, rep.max_violation,
                   conic::to_string(res.status).c_str());

    last = cand;
    if (rep.feasible) {
      Eigen::MatrixXd xr = cand.x.unaryExpr([](double x) { return x >= 0.5 ? 1.0 : 0.0; });
      double cost = cost_of(inst, xr, cand.p);
      if (!have_best || cost < best_cost) {
        best_cost = cost;
        out.best = cand;
        have_best = true;
      }
      out.feasible = true;
    }

    // Re-anchor on the solution.
    anchor.v0 = sol.v;
    anchor.x0 = sol.x;
    anchor.s0 = sol.p.cast<Complex>() + Complex(0.0, 1.0) * sol.q.cast<Complex>();
    anchor.sf0 = sol.sf;
    anchor.st0 = sol.st;

    // Stop when feasible and the relaxed cost has settled.
    double rel = std::abs(sol.objective_cost - prev_cost) /
                 std::max(1.0, std::abs(sol.objective_cost));
    flat_rounds = (round > 1 && rel < 1e-5) ? flat_rounds + 1 : 0;
    prev_cost = sol.objective_cost;
    if (out.feasible && flat_rounds >= 3) break;
  }

  if (!have_best) {
    out.best = last;
    if (last.x.size() > 0) {
      Eigen::MatrixXd xr = last.x.unaryExpr([](double x) { return x >= 0.5 ? 1.0 : 0.0; });
      out.best_cost = cost_of(inst, xr, last.p);
    }
  } else {
    out.best_cost = best_cost;
  }
  return out;
}

}  // namespace ucr
