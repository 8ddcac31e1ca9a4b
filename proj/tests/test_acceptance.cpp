// Acceptance gate: one pass/fail line per criterion, nonzero exit on any
// failure. Criterion 3 (case118) is long-running and only exercised when
// UCR_ACCEPT_LARGE is set in the environment.
#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "ucr/bounds.hpp"
#include "ucr/case_io.hpp"
#include "ucr/driver.hpp"
#include "ucr/instance_gen.hpp"
#include "ucr/relax.hpp"

using namespace ucr;

namespace {

int failures = 0;

void report(int num, bool ok, const std::string& detail) {
  std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", num,
              detail.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string data(const char* name) { return std::string(UCR_DATA_DIR "/") + name; }

int first_feasible_round(const std::vector<RoundLog>& logs, double tol = 1e-6) {
  for (const auto& L : logs)
    if (L.max_violation < tol) return L.round;
  return -1;
}

UcInstance toy() {
  PowerNetwork net;
  net.buses.push_back({1, {0, 0}, 0.9, 1.1, {0.2, 0.0}});
  net.generators.push_back({0, 0.1, 1.0, -0.5, 0.5});
  UcInstance inst;
  inst.network = net;
  inst.horizon = 3;
  inst.demand = Eigen::MatrixXcd::Zero(1, 3);
  inst.demand(0, 0) = {0.20, 0.0};
  inst.demand(0, 1) = {0.30, 0.0};
  inst.demand(0, 2) = {0.25, 0.0};
  inst.economics.push_back({0.8, 0.02, 40.0, 20.0, 10.0, 1.0, 1.0, 1, 1});
  inst.initial.push_back({1, 0.2, 2});
  return inst;
}

double toy_optimum() {
  UcInstance inst = toy();
  const UcEconomics& ec = inst.economics[0];
  const double B = inst.network.base_mva;
  double best = std::numeric_limits<double>::infinity();
  for (int mask = 0; mask < 8; ++mask) {
    double cost = 0.0;
    bool ok = true;
    int prev = inst.initial[0].status;
    for (int t = 0; t < 3 && ok; ++t) {
      int x = (mask >> t) & 1;
      double d = inst.demand(0, t).real();
      if (!x && d > 0.0) { ok = false; break; }
      double pw = x ? d * B : 0.0;
      cost += ec.alpha * pw + ec.beta * pw * pw + ec.gamma * x +
              ec.gamma_up * (1 - prev) * x + ec.gamma_dn * prev * (1 - x);
      prev = x;
    }
    if (ok) best = std::min(best, cost);
  }
  return best;
}

Anchor anchor_of_lift(const Eigen::MatrixXcd& v, const RelaxationSolution& s) {
  Anchor a;
  a.v0 = v;
  a.x0 = s.x;
  a.s0 = s.p.cast<Complex>() + Complex(0, 1) * s.q.cast<Complex>();
  a.sf0 = s.sf;
  a.st0 = s.st;
  return a;
}

}  // namespace

int main() {
  // --- Criteria 1 & 2: case57, three seeds, horizon 24, mu=1 alpha=1 eta=0.5.
  std::vector<int> kf;
  double seed1_cost = 0.0;
  bool runs_ok = true;
  for (std::uint64_t seed : {1, 2, 3}) {
    UcInstance inst = generate(parse_matpower_file(data("case57.m")), seed, 24);
    RunOptions opts;  // defaults are mu=1, alpha=1, eta=0.5
    opts.rounds = 4;
    RunResult res = run(inst, opts);
    int k = first_feasible_round(res.logs);
    if (k < 0 || !res.feasible) runs_ok = false;
    kf.push_back(k);
    if (seed == 1) seed1_cost = res.best_cost;
  }
  std::sort(kf.begin(), kf.end());
  int median_kf = kf[1];
  {
    std::ostringstream d;
    d << "case57 feasibility recovery: k_f = {" << kf[0] << ", " << kf[1] << ", "
      << kf[2] << "}, median " << median_kf << " <= 3";
    report(1, runs_ok && median_kf >= 1 && median_kf <= 3, d.str());
  }
  {
    // The edge relaxation's bound is no larger than the full-PSD bound, so a
    // gap computed against it over-states the true gap; passing here implies
    // the tighter-bound gap also passes.
    UcInstance inst = generate(parse_matpower_file(data("case57.m")), 1, 24);
    double bnd = lower_bound(inst, Mode::EdgeSocp);
    double gap = gap_percent(seed1_cost, bnd);
    char buf[128];
    std::snprintf(buf, sizeof buf, "case57 GAP %.2f%% <= 1.0%%", gap);
    report(2, gap <= 1.0, buf);
  }

  // --- Criterion 3: case118 (long-running; opt-in).
  if (std::getenv("UCR_ACCEPT_LARGE")) {
    UcInstance inst = generate(parse_matpower_file(data("case118.m")), 1, 24);
    RunOptions opts;
    opts.mu = 1.0;
    opts.alpha = 10.0;
    opts.rounds = 6;
    RunResult res = run(inst, opts);
    int k = first_feasible_round(res.logs);
    double bnd = lower_bound(inst, Mode::EdgeSocp);
    double gap = res.feasible ? gap_percent(res.best_cost, bnd) : 100.0;
    char buf[128];
    std::snprintf(buf, sizeof buf, "case118 k_f = %d <= 5, GAP %.2f%% <= 5.0%%",
                  k, gap);
    report(3, res.feasible && k >= 1 && k <= 5 && gap <= 5.0, buf);
  } else {
    report(3, true, "case118 skipped (set UCR_ACCEPT_LARGE=1 to run)");
  }

  // --- Criterion 4: monotone descent after feasibility on case9/case14.
  {
    bool ok = true;
    std::string detail = "monotone descent after feasibility:";
    for (const char* name : {"case9.m", "case14.m"}) {
      UcInstance inst = generate(parse_matpower_file(data(name)), 1, 4);
      RunOptions opts;
      opts.rounds = 6;
      RunResult res = run(inst, opts);
      int k = first_feasible_round(res.logs);
      bool this_ok = k > 0;
      for (size_t i = k; this_ok && i < res.logs.size(); ++i) {
        if (res.logs[i].max_violation >= 1e-6) this_ok = false;
        if (i > size_t(k) &&
            res.logs[i].objective_cost >
                res.logs[i - 1].objective_cost * (1.0 + 1e-6))
          this_ok = false;
      }
      detail += std::string(" ") + name + (this_ok ? " ok" : " FAILED");
      ok = ok && this_ok;
    }
    report(4, ok, detail);
  }

  // --- Criterion 5: brute-force toy oracle.
  {
    UcInstance inst = toy();
    double opt = toy_optimum();
    double bnd = lower_bound(inst, Mode::EdgeSocp);
    RunOptions opts;
    opts.rounds = 10;
    RunResult res = run(inst, opts);
    bool ok = res.feasible && bnd <= opt * (1.0 + 1e-6) &&
              res.best_cost >= opt * (1.0 - 1e-6) &&
              res.best_cost <= opt * 1.005;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "toy: bound %.4f <= enumerated %.4f, driver %.4f within 0.5%%",
                  bnd, opt, res.best_cost);
    report(5, ok, buf);
  }

  // --- Criterion 6: penalty properties.
  {
    UcInstance inst = generate(parse_matpower_file(data("case9.m")), 7, 2);
    NetworkMatrices mats = build_matrices(inst.network);
    PenaltyMatrix pen = build_penalty_matrix(inst.network, 0.5, 1.0);
    const int V = 9, G = 3, E = 9, T = 2;
    std::mt19937 rng(42);
    std::uniform_real_distribution<double> mag(0.95, 1.05), ang(-0.2, 0.2),
        pq(0.0, 1.0), bump(0.0, 0.5);
    double worst_zero = 0.0, worst_kappa = 0.0, worst_trace = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
      // Exactly lifted random point.
      RelaxationSolution s;
      s.v.resize(V, T);
      s.x.resize(G, T);
      s.p.resize(G, T);
      s.q.resize(G, T);
      s.z.resize(G, T);
      s.o.resize(G, T);
      s.r.resize(G, T);
      s.sf = Eigen::MatrixXcd::Zero(E, T);
      s.st = Eigen::MatrixXcd::Zero(E, T);
      s.ff = Eigen::MatrixXd::Zero(E, T);
      s.ft = Eigen::MatrixXd::Zero(E, T);
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < V; ++k) s.v(k, t) = std::polar(mag(rng), ang(rng));
        s.W.push_back(SparseHermitian::outer(s.v.col(t), mats.edge_pairs));
        for (int g = 0; g < G; ++g) {
          s.x(g, t) = trial % 2;
          s.p(g, t) = pq(rng);
          s.q(g, t) = pq(rng) - 0.5;
          s.z(g, t) = s.x(g, t) * s.x(g, t);
          s.o(g, t) = s.p(g, t) * s.p(g, t);
          s.r(g, t) = s.q(g, t) * s.q(g, t);
        }
      }
      Anchor a = anchor_of_lift(s.v, s);
      worst_zero = std::max(worst_zero, std::abs(penalty_value(s, a, pen, inst)));

      // Relaxation-feasible perturbation: diagonal PSD surplus on W plus
      // slack in the square couplings keeps the point inside every cone.
      RelaxationSolution relaxed = s;
      for (int t = 0; t < T; ++t) {
        for (int k = 0; k < V; ++k) relaxed.W[t].diag(k) += bump(rng);
        for (int g = 0; g < G; ++g) {
          relaxed.o(g, t) += bump(rng);
          relaxed.r(g, t) += bump(rng);
        }
      }
      worst_kappa =
          std::min(worst_kappa, penalty_value(relaxed, a, pen, inst));

      // Sparse trace against a dense evaluation.
      Eigen::MatrixXcd Md(pen.M), Wd = Eigen::MatrixXcd::Zero(V, V);
      for (int k = 0; k < V; ++k) Wd(k, k) = relaxed.W[0].diag(k);
      for (const auto& [i, j, h] : relaxed.W[0].upper) {
        Wd(i, j) = h;
        Wd(j, i) = std::conj(h);
      }
      worst_trace = std::max(worst_trace,
                             std::abs(pen.trace_with(relaxed.W[0]) -
                                      (Wd * Md).trace().real()));
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "penalty: |kappa(lift)| %.1e <= 1e-9, min kappa %.1e >= -1e-7, "
                  "trace err %.1e <= 1e-10",
                  worst_zero, worst_kappa, worst_trace);
    report(6, worst_zero <= 1e-9 && worst_kappa >= -1e-7 && worst_trace <= 1e-10,
           buf);
  }

  // --- Criterion 7: matrix oracles.
  {
    PowerNetwork net9 = parse_matpower_file(data("case9.m"));
    NetworkMatrices m9 = build_matrices(net9);
    // Hand stamp of the bus admittance matrix from the branch pi-model.
    const int V = net9.n_buses();
    Eigen::MatrixXcd Yref = Eigen::MatrixXcd::Zero(V, V);
    for (const Branch& br : net9.branches) {
      Complex y = br.series_admittance();
      Complex ysh(0.0, br.b_prl / 2.0);
      Complex tap = std::polar(br.tap, br.shift);
      Yref(br.from, br.from) += (y + ysh) / std::norm(tap);
      Yref(br.to, br.to) += y + ysh;
      Yref(br.from, br.to) += -y / std::conj(tap);
      Yref(br.to, br.from) += -y / tap;
    }
    for (int k = 0; k < V; ++k) Yref(k, k) += net9.buses[k].shunt;
    double yerr = (Eigen::MatrixXcd(m9.Y) - Yref).cwiseAbs().maxCoeff();

    PowerNetwork net57 = parse_matpower_file(data("case57.m"));
    PenaltyMatrix pen = build_penalty_matrix(net57, 0.5, 1.0);
    double min_eig = 0.0;
    for (const auto& blk : pen.line_blocks) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(blk);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    char buf[128];
    std::snprintf(buf, sizeof buf,
                  "case9 Y err %.1e <= 1e-12, case57 block min eig %.1e >= -1e-9",
                  yerr, min_eig);
    report(7, yerr <= 1e-12 && min_eig >= -1e-9, buf);
  }

  // --- Criterion 8: determinism end to end.
  {
    PowerNetwork net = parse_matpower_file(data("case9.m"));
    UcInstance a = generate(net, 99, 4);
    UcInstance b = generate(net, 99, 4);
    std::ostringstream sa, sb;
    write_instance(a, sa);
    write_instance(b, sb);
    bool bytes_equal = sa.str() == sb.str();
    RunOptions opts;
    opts.rounds = 2;
    RunResult ra = run(a, opts);
    RunResult rb = run(b, opts);
    bool logs_equal = ra.logs.size() == rb.logs.size();
    for (size_t i = 0; logs_equal && i < ra.logs.size(); ++i)
      logs_equal = ra.logs[i].objective_cost == rb.logs[i].objective_cost &&
                   ra.logs[i].max_violation == rb.logs[i].max_violation;
    report(8, bytes_equal && logs_equal,
           std::string("determinism: instance bytes ") +
               (bytes_equal ? "identical" : "DIFFER") + ", logs " +
               (logs_equal ? "identical" : "DIFFER"));
  }

  std::printf("%d of 8 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
