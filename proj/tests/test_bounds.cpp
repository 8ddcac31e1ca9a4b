#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "ucr/bounds.hpp"
#include "ucr/case_io.hpp"
#include "ucr/driver.hpp"
#include "ucr/instance_gen.hpp"

using namespace ucr;

namespace {

std::string data(const char* name) { return std::string(UCR_DATA_DIR "/") + name; }

// One bus, one generator, three periods: small enough to enumerate the
// 2^3 commitment patterns and grid-search each dispatch by hand.
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

// Brute-force optimum of the toy: with a single bus the dispatch must track
// demand exactly whenever the unit is on, so each of the eight commitment
// patterns either fails to serve load or has a closed-form cost.
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

}  // namespace

TEST_CASE("gap_percent formula") {
  CHECK(gap_percent(100.0, 95.0) == doctest::Approx(5.0));
  CHECK(gap_percent(100.0, 100.0) == doctest::Approx(0.0));
  // Scale invariance.
  CHECK(gap_percent(2e7, 1.9e7) == doctest::Approx(gap_percent(200.0, 190.0)));
  CHECK_THROWS_AS(gap_percent(0.0, -1.0), std::invalid_argument);
  CHECK_THROWS_AS(gap_percent(-5.0, -6.0), std::invalid_argument);
}

TEST_CASE("toy bound is at most the brute-force optimum") {
  UcInstance inst = toy();
  double opt = toy_optimum();
  REQUIRE(opt < std::numeric_limits<double>::infinity());
  double socp = lower_bound(inst, Mode::EdgeSocp);
  double sdp = lower_bound(inst, Mode::FullSdp);
  CHECK(socp <= opt * (1.0 + 1e-6));
  CHECK(sdp <= opt * (1.0 + 1e-6));
  CHECK(sdp >= socp - 1e-6 * std::abs(socp));
}

TEST_CASE("case9 bound sits below the sequential method's feasible cost") {
  UcInstance inst = generate(parse_matpower_file(data("case9.m")), 1, 3);
  RunOptions opts;
  opts.rounds = 3;
  RunResult res = run(inst, opts);
  REQUIRE(res.feasible);
  double socp = lower_bound(inst, Mode::EdgeSocp);
  CHECK(socp <= res.best_cost * (1.0 + 1e-6));
  double sdp = lower_bound(inst, Mode::FullSdp);
  CHECK(sdp <= res.best_cost * (1.0 + 1e-6));
  // The full PSD cone is contained in the edge relaxation's cone.
  CHECK(sdp >= socp - 1e-6 * std::abs(socp));
  CHECK(gap_percent(res.best_cost, sdp) <= gap_percent(res.best_cost, socp) + 1e-9);
}

TEST_CASE("full-sdp bound refuses networks above 120 buses") {
  UcInstance inst = generate(parse_matpower_file(data("case300.m")), 1, 2);
  CHECK_THROWS_AS(lower_bound(inst, Mode::FullSdp), std::invalid_argument);
}
