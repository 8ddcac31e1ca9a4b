#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

namespace ucr {

using Complex = std::complex<double>;

struct Bus {
  int id = 0;                 // external bus number from the case file
  Complex shunt{0.0, 0.0};    // shunt admittance Gs + i*Bs, p.u.
  double v_min = 0.0;         // voltage magnitude bounds, p.u.
  double v_max = 0.0;
  Complex demand{0.0, 0.0};   // base complex demand Pd + i*Qd, p.u.
};

struct Branch {
  int from = 0;               // internal bus indices (0-based)
  int to = 0;
  double r = 0.0;             // series resistance, p.u.
  double x = 0.0;             // series reactance, p.u.
  double b_prl = 0.0;         // total line charging susceptance, p.u.
  double tap = 1.0;           // tap ratio magnitude, 1 if absent
  double shift = 0.0;         // phase shift angle, radians
  double f_max = 0.0;         // apparent power flow limit, p.u.
  bool unlimited = false;     // set when the case rating is 0

  Complex series_admittance() const {
    if (r == 0.0 && x == 0.0)
      throw std::domain_error("branch has zero series impedance");
    return 1.0 / Complex(r, x);
  }
};

struct Generator {
  int bus = 0;                // internal bus index (0-based)
  double p_min = 0.0;
  double p_max = 0.0;
  double q_min = 0.0;
  double q_max = 0.0;
};

struct PowerNetwork {
  double base_mva = 100.0;
  std::vector<Bus> buses;
  std::vector<Branch> branches;
  std::vector<Generator> generators;

  int n_buses() const { return static_cast<int>(buses.size()); }
  int n_branches() const { return static_cast<int>(branches.size()); }
  int n_generators() const { return static_cast<int>(generators.size()); }

  // Throws std::invalid_argument on a broken invariant.
  void validate() const;
};

// Per-generator scheduling economics. Powers in p.u., costs in $ with
// coefficients applied to MW quantities.
struct UcEconomics {
  double alpha = 0.0;      // linear production cost, $/MWh
  double beta = 0.0;       // quadratic production cost
  double gamma = 0.0;      // fixed cost while committed, $
  double gamma_up = 0.0;   // start-up cost, $
  double gamma_dn = 0.0;   // shutdown cost, $
  double ramp = 0.0;       // ramp limit r_g, p.u.
  double startstop = 0.0;  // start-up/shutdown power cap s_g, p.u.
  int min_up = 1;          // minimum up time, hours
  int min_dn = 1;          // minimum down time, hours
};

struct InitialState {
  int status = 0;          // commitment at t = 0
  double p0 = 0.0;         // active power at t = 0, p.u.
  int held_for = 0;        // hours the status has been maintained
};

struct UcInstance {
  PowerNetwork network;
  int horizon = 0;
  Eigen::MatrixXcd demand;            // |V| x T, p.u.
  std::vector<UcEconomics> economics; // per generator
  std::vector<InitialState> initial;  // per generator
  std::uint64_t seed = 0;

  void validate() const;
};

}  // namespace ucr
