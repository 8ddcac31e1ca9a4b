#pragma once

#include <vector>

#include "ucr/conic/program.hpp"
#include "ucr/conic/solve.hpp"
#include "ucr/network.hpp"
#include "ucr/types.hpp"

namespace ucr {

enum class Mode { EdgeSocp, FullSdp };

// Reference point entering the penalty term; updated every round.
struct Anchor {
  Eigen::MatrixXcd v0;   // |V| x T
  Eigen::MatrixXd x0;    // |G| x T
  Eigen::MatrixXcd s0;   // |G| x T, p + i q
  Eigen::MatrixXcd sf0;  // |E| x T
  Eigen::MatrixXcd st0;  // |E| x T
};

// Index map from named quantities to positions in the flat decision vector.
// Layout: per-generator blocks, then per-bus blocks, then W edge entries,
// then per-branch blocks, then the shared 1/2 constant, then (full-sdp only)
// fill entries for non-edge W pairs.
struct VarMap {
  int G = 0, V = 0, E = 0, P = 0, T = 0;
  int gen_off = 0, bus_off = 0, pair_off = 0, branch_off = 0, half = 0,
      fill_off = 0, n = 0;
  bool full = false;

  // Per (g,t): x, p, q, c, z, o, r, u, b.
  int x(int g, int t) const { return gen_off + 9 * (t * G + g) + 0; }
  int p(int g, int t) const { return gen_off + 9 * (t * G + g) + 1; }
  int q(int g, int t) const { return gen_off + 9 * (t * G + g) + 2; }
  int c(int g, int t) const { return gen_off + 9 * (t * G + g) + 3; }
  int z(int g, int t) const { return gen_off + 9 * (t * G + g) + 4; }
  int o(int g, int t) const { return gen_off + 9 * (t * G + g) + 5; }
  int r(int g, int t) const { return gen_off + 9 * (t * G + g) + 6; }
  int u(int g, int t) const { return gen_off + 9 * (t * G + g) + 7; }
  int b(int g, int t) const { return gen_off + 9 * (t * G + g) + 8; }
  // Per (k,t): W_kk, Re v_k, Im v_k.
  int wd(int k, int t) const { return bus_off + 3 * (t * V + k) + 0; }
  int vre(int k, int t) const { return bus_off + 3 * (t * V + k) + 1; }
  int vim(int k, int t) const { return bus_off + 3 * (t * V + k) + 2; }
  // Per (edge pair e, t): Re W_ij, Im W_ij with i < j canonical.
  int wre(int e, int t) const { return pair_off + 2 * (t * P + e) + 0; }
  int wim(int e, int t) const { return pair_off + 2 * (t * P + e) + 1; }
  // Per (branch l, t): Re/Im of forward and reverse flow, then f_fwd, f_rev.
  int sfre(int l, int t) const { return branch_off + 6 * (t * E + l) + 0; }
  int sfim(int l, int t) const { return branch_off + 6 * (t * E + l) + 1; }
  int stre(int l, int t) const { return branch_off + 6 * (t * E + l) + 2; }
  int stim(int l, int t) const { return branch_off + 6 * (t * E + l) + 3; }
  int ff(int l, int t) const { return branch_off + 6 * (t * E + l) + 4; }
  int ft(int l, int t) const { return branch_off + 6 * (t * E + l) + 5; }
  // Full-sdp fill entries, indexed by a dense pair id (valid when full).
  int fill_re(int pair_id, int t) const {
    return fill_off + 2 * (t * fill_count + pair_id) + 0;
  }
  int fill_im(int pair_id, int t) const {
    return fill_off + 2 * (t * fill_count + pair_id) + 1;
  }
  int fill_count = 0;
  // Dense (i,j) -> edge-pair id, or -1; only populated in full-sdp mode.
  Eigen::MatrixXi fill_id;
};

struct RelaxationSolution {
  Eigen::MatrixXd x, p, q, c, z, o, r, u, b;  // |G| x T
  Eigen::MatrixXcd v;                         // |V| x T
  std::vector<SparseHermitian> W;             // per t, edge-sparse
  Eigen::MatrixXcd sf, st;                    // |E| x T
  Eigen::MatrixXd ff, ft;                     // |E| x T
  double objective_cost = 0.0;                // g(c), $
  double penalty_value = 0.0;                 // kappa, p.u.
  conic::SolverStatus status = conic::SolverStatus::NumericalFailure;
};

struct AssembledProgram {
  conic::ConicProgram prog;
  VarMap map;
};

// Builds the penalized lifted program: cost identity and scheduling rows,
// the two 3x3 PSD coupling blocks per generator-period, the network balance
// and flow rows on the sparse W entries, the voltage coupling cones
// (per-edge 3x3 Hermitian blocks in edge-socp mode, one (|V|+1) Hermitian
// block per period in full-sdp mode), and the objective sum(c) + mu * kappa
// expanded around the anchor.
AssembledProgram assemble(const UcInstance& inst, const NetworkMatrices& mats,
                          const PenaltyMatrix& pen, const Anchor& anchor, double mu,
                          Mode mode);

// Maps a raw solver vector back to named fields and recomputes the objective
// from them; throws std::logic_error if the recomputation disagrees with the
// solver's objective beyond 1e-6 relative.
RelaxationSolution extract(const AssembledProgram& asmbl, const conic::SolveResult& res,
                           const UcInstance& inst, const NetworkMatrices& mats,
                           const PenaltyMatrix& pen, const Anchor& anchor, double mu);

// The penalty kappa evaluated by its literal definition (trace term plus the
// grouped quadratic-completion terms for x/z, p/o, q/r and both flow pairs).
double penalty_value(const RelaxationSolution& sol, const Anchor& anchor,
                     const PenaltyMatrix& pen, const UcInstance& inst);

// Production cost sum over (g,t) by the original cost identity, on MW scale.
double cost_of(const UcInstance& inst, const Eigen::MatrixXd& x,
               const Eigen::MatrixXd& p);

}  // namespace ucr
