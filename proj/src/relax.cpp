#include "ucr/relax.hpp"

#include <cmath>
#include <map>
#include <stdexcept>

namespace ucr {

using conic::LinExpr;

namespace {

// Commitment history X(tau) for paper indices tau <= 0: the initial status
// has been held exactly since -held_for, and was the opposite before that.
double history(const InitialState& ini, int tau) {
  double st = static_cast<double>(ini.status);
  return tau >= -ini.held_for ? st : 1.0 - st;
}

struct WLookup {
  const VarMap& m;
  std::map<std::pair<int, int>, int> edge_id;

  WLookup(const VarMap& map, const NetworkMatrices& mats) : m(map) {
    for (int e = 0; e < static_cast<int>(mats.edge_pairs.size()); ++e)
      edge_id.emplace(mats.edge_pairs[e], e);
  }

  // Adds W_kj * a to the given real/imaginary expressions, resolving W_kj
  // through the canonical (i < j) variable or its conjugate.
  void add_W_times(LinExpr& re, LinExpr& im, int k, int j, Complex a, int t) const {
    double ar = a.real(), ai = a.imag();
    if (k == j) {
      re.add(m.wd(k, t), ar);
      im.add(m.wd(k, t), ai);
      return;
    }
    int lo = std::min(k, j), hi = std::max(k, j);
    int wre, wim;
    auto it = edge_id.find({lo, hi});
    if (it != edge_id.end()) {
      wre = m.wre(it->second, t);
      wim = m.wim(it->second, t);
    } else {
      if (!m.full) throw std::logic_error("W entry outside the edge support");
      int id = m.fill_id(lo, hi);
      wre = m.fill_re(id, t);
      wim = m.fill_im(id, t);
    }
    double sgn = k < j ? 1.0 : -1.0;  // W_kj = conj(W_jk) for k > j
    re.add(wre, ar);
    re.add(wim, -sgn * ai);
    im.add(wre, ai);
    im.add(wim, sgn * ar);
  }
};

}  // namespace

AssembledProgram assemble(const UcInstance& inst, const NetworkMatrices& mats,
                          const PenaltyMatrix& pen, const Anchor& anchor, double mu,
                          Mode mode) {
  const PowerNetwork& net = inst.network;
  const int G = net.n_generators(), V = net.n_buses(), E = net.n_branches();
  const int T = inst.horizon;
  const int P = static_cast<int>(mats.edge_pairs.size());
  const double B = net.base_mva;

  if (anchor.v0.rows() != V || anchor.v0.cols() != T || anchor.x0.rows() != G ||
      anchor.s0.rows() != G || anchor.sf0.rows() != E || anchor.st0.rows() != E)
    throw std::invalid_argument("anchor dimensions do not match the instance");

  AssembledProgram out;
  VarMap& m = out.map;
  m.G = G;
  m.V = V;
  m.E = E;
  m.P = P;
  m.T = T;
  m.full = mode == Mode::FullSdp;
  m.gen_off = 0;
  m.bus_off = 9 * G * T;
  m.pair_off = m.bus_off + 3 * V * T;
  m.branch_off = m.pair_off + 2 * P * T;
  m.half = m.branch_off + 6 * E * T;
  m.n = m.half + 1;
  if (m.full) {
    m.fill_id = Eigen::MatrixXi::Constant(V, V, -1);
    for (auto [i, j] : mats.edge_pairs) m.fill_id(i, j) = -2;  // taken by an edge
    int id = 0;
    for (int i = 0; i < V; ++i)
      for (int j = i + 1; j < V; ++j)
        if (m.fill_id(i, j) == -1) m.fill_id(i, j) = id++;
    m.fill_count = id;
    m.fill_off = m.n;
    m.n += 2 * m.fill_count * T;
  }

  conic::ConicProgram& prog = out.prog;
  prog.n = m.n;
  prog.add_eq(LinExpr::var(m.half) + LinExpr(-0.5));

  WLookup W(m, mats);

  // --- Unit constraints, per generator and period. ---
  for (int g = 0; g < G; ++g) {
    const Generator& gen = net.generators[g];
    const UcEconomics& ec = inst.economics[g];
    const InitialState& ini = inst.initial[g];
    for (int t = 0; t < T; ++t) {
      // Previous-period commitment and dispatch: variables, or initial-state
      // constants at the first period.
      LinExpr x_prev = t > 0 ? LinExpr::var(m.x(g, t - 1)) : LinExpr(history(ini, 0));
      LinExpr z_prev = t > 0 ? LinExpr::var(m.z(g, t - 1)) : LinExpr(history(ini, 0));
      LinExpr p_prev = t > 0 ? LinExpr::var(m.p(g, t - 1)) : LinExpr(ini.p0);

      // z = x.
      prog.add_eq(LinExpr::var(m.z(g, t)) + LinExpr::var(m.x(g, t), -1.0));

      // Cost identity, with coefficients applied to MW quantities.
      LinExpr cost;
      cost.add(m.p(g, t), ec.alpha * B);
      cost.add(m.o(g, t), ec.beta * B * B);
      cost.add(m.x(g, t), ec.gamma + ec.gamma_up);
      cost.add(m.u(g, t), -(ec.gamma_up + ec.gamma_dn));
      cost += ec.gamma_dn * x_prev;
      cost.add(m.c(g, t), -1.0);
      prog.add_eq(cost);

      // Minimum up/down windows; paper period index is t+1 here.
      auto status_at = [&](int tau) {
        return tau >= 1 ? LinExpr::var(m.x(g, tau - 1)) : LinExpr(history(ini, tau));
      };
      for (int tau = (t + 1) - ec.min_up + 1; tau <= t + 1; ++tau) {
        LinExpr row = status_at(tau) + (-1.0) * status_at(tau - 1) +
                      LinExpr::var(m.x(g, t), -1.0);
        if (!row.terms.empty() || row.constant > 0.0) prog.add_ineq(row);
      }
      for (int tau = (t + 1) - ec.min_dn + 1; tau <= t + 1; ++tau) {
        LinExpr row = status_at(tau - 1) + (-1.0) * status_at(tau) +
                      LinExpr::var(m.x(g, t)) + LinExpr(-1.0);
        if (!row.terms.empty() || row.constant > 0.0) prog.add_ineq(row);
      }

      // Capacity: p_min x <= p <= p_max x, likewise for q.
      prog.add_ineq(LinExpr::var(m.x(g, t), gen.p_min) + LinExpr::var(m.p(g, t), -1.0));
      prog.add_ineq(LinExpr::var(m.p(g, t)) + LinExpr::var(m.x(g, t), -gen.p_max));
      prog.add_ineq(LinExpr::var(m.x(g, t), gen.q_min) + LinExpr::var(m.q(g, t), -1.0));
      prog.add_ineq(LinExpr::var(m.q(g, t)) + LinExpr::var(m.x(g, t), -gen.q_max));

      // Ramp limits against the previous period.
      prog.add_ineq(LinExpr::var(m.p(g, t)) + (-1.0) * p_prev +
                    (ec.startstop - ec.ramp) * x_prev + LinExpr(-ec.startstop));
      prog.add_ineq(p_prev + LinExpr::var(m.p(g, t), -1.0) +
                    LinExpr::var(m.x(g, t), ec.startstop - ec.ramp) +
                    LinExpr(-ec.startstop));

      // 0 <= x <= 1.
      prog.add_nonneg({LinExpr::var(m.x(g, t)),
                       LinExpr(1.0) + LinExpr::var(m.x(g, t), -1.0)});

      // Commitment coupling block over (x_{t-1}, x_t). With a binary
      // constant in the x_{t-1} slot the block loses its interior and
      // collapses exactly to u_t = x_{t-1} * x_t (the remaining 2x2 minor is
      // implied by z = x and 0 <= x <= 1), so encode that form at t = 0.
      if (t == 0)
        prog.add_eq(LinExpr::var(m.u(g, t)) +
                    LinExpr::var(m.x(g, t), -history(ini, 0)));
      else
        prog.add_psd(3, {LinExpr(1.0), x_prev, LinExpr::var(m.x(g, t)), z_prev,
                         LinExpr::var(m.u(g, t)), LinExpr::var(m.z(g, t))});
      // Dispatch coupling block over (x_t, p_t).
      prog.add_psd(3, {LinExpr(1.0), LinExpr::var(m.x(g, t)), LinExpr::var(m.p(g, t)),
                       LinExpr::var(m.z(g, t)), LinExpr::var(m.b(g, t)),
                       LinExpr::var(m.o(g, t))});
      // r >= q^2, with the valid cap max(q_min^2, q_max^2) (and a matching
      // one on o) so the costless lifted squares cannot recede.
      prog.add_rotated(LinExpr::var(m.r(g, t)), LinExpr::var(m.half),
                       {LinExpr::var(m.q(g, t))});
      double rcap = std::max(gen.q_min * gen.q_min, gen.q_max * gen.q_max) + 1.0;
      double ocap = gen.p_max * gen.p_max + 1.0;
      prog.add_nonneg({LinExpr(rcap) + LinExpr::var(m.r(g, t), -1.0),
                       LinExpr(ocap) + LinExpr::var(m.o(g, t), -1.0)});
    }
  }

  // --- Network constraints, per period. ---
  std::vector<std::vector<int>> gens_at(V);
  for (int g = 0; g < G; ++g) gens_at[net.generators[g].bus].push_back(g);
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> Yr(mats.Y);
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> Yf(mats.Y_from);
  const Eigen::SparseMatrix<Complex, Eigen::RowMajor> Yt(mats.Y_to);

  for (int t = 0; t < T; ++t) {
    // Nodal balance: d + diag{W Y*} = C'(p + i q).
    for (int k = 0; k < V; ++k) {
      LinExpr re(inst.demand(k, t).real()), im(inst.demand(k, t).imag());
      for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Yr, k); it;
           ++it)
        W.add_W_times(re, im, k, static_cast<int>(it.col()), std::conj(it.value()), t);
      for (int g : gens_at[k]) {
        re.add(m.p(g, t), -1.0);
        im.add(m.q(g, t), -1.0);
      }
      prog.add_eq(re);
      prog.add_eq(im);
    }
    // Flow definitions and flow cones per branch.
    for (int l = 0; l < E; ++l) {
      const Branch& br = net.branches[l];
      LinExpr fre, fim, tre, tim;
      for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Yf, l); it;
           ++it)
        W.add_W_times(fre, fim, br.from, static_cast<int>(it.col()),
                      std::conj(it.value()), t);
      for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Yt, l); it;
           ++it)
        W.add_W_times(tre, tim, br.to, static_cast<int>(it.col()), std::conj(it.value()),
                      t);
      prog.add_eq(fre + LinExpr::var(m.sfre(l, t), -1.0));
      prog.add_eq(fim + LinExpr::var(m.sfim(l, t), -1.0));
      prog.add_eq(tre + LinExpr::var(m.stre(l, t), -1.0));
      prog.add_eq(tim + LinExpr::var(m.stim(l, t), -1.0));
      prog.add_rotated(LinExpr::var(m.ff(l, t)), LinExpr::var(m.half),
                       {LinExpr::var(m.sfre(l, t)), LinExpr::var(m.sfim(l, t))});
      prog.add_rotated(LinExpr::var(m.ft(l, t)), LinExpr::var(m.half),
                       {LinExpr::var(m.stre(l, t)), LinExpr::var(m.stim(l, t))});
      // Rating-free branches still get a (loose but valid) cap so the
      // squared-flow variables cannot recede; |s_l| <= vmax_i sum_k |Y_lk|
      // vmax_k for any voltage within bounds. Without some upper bound the
      // feasible set has costless rays and the dual loses its interior.
      double fcap = br.f_max * br.f_max, tcap = fcap;
      if (br.unlimited) {
        double rowf = 0.0, rowt = 0.0;
        for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Yf, l); it;
             ++it)
          rowf += std::abs(it.value()) * net.buses[it.col()].v_max;
        for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Yt, l); it;
             ++it)
          rowt += std::abs(it.value()) * net.buses[it.col()].v_max;
        rowf *= net.buses[br.from].v_max;
        rowt *= net.buses[br.to].v_max;
        fcap = rowf * rowf + 1.0;
        tcap = rowt * rowt + 1.0;
      }
      prog.add_nonneg({LinExpr(fcap) + LinExpr::var(m.ff(l, t), -1.0),
                       LinExpr(tcap) + LinExpr::var(m.ft(l, t), -1.0)});
    }
    // Voltage-square bounds.
    for (int k = 0; k < V; ++k) {
      const Bus& bus = net.buses[k];
      prog.add_nonneg(
          {LinExpr::var(m.wd(k, t)) + LinExpr(-bus.v_min * bus.v_min),
           LinExpr(bus.v_max * bus.v_max) + LinExpr::var(m.wd(k, t), -1.0)});
    }

    if (mode == Mode::EdgeSocp) {
      // Per-bus |v_k|^2 <= W_kk.
      for (int k = 0; k < V; ++k)
        prog.add_rotated(LinExpr::var(m.wd(k, t)), LinExpr::var(m.half),
                         {LinExpr::var(m.vre(k, t)), LinExpr::var(m.vim(k, t))});
      // Per-edge 3x3 Hermitian coupling block [[1, v_i*, v_j*], [v_i, W_ii,
      // W_ij], [v_j, W_ij*, W_jj]], as a real 6x6 PSD block.
      for (int e = 0; e < P; ++e) {
        auto [i, j] = mats.edge_pairs[e];
        LinExpr ri = LinExpr::var(m.vre(i, t)), ii = LinExpr::var(m.vim(i, t));
        LinExpr rj = LinExpr::var(m.vre(j, t)), ij = LinExpr::var(m.vim(j, t));
        LinExpr wdi = LinExpr::var(m.wd(i, t)), wdj = LinExpr::var(m.wd(j, t));
        LinExpr wre = LinExpr::var(m.wre(e, t)), wim = LinExpr::var(m.wim(e, t));
        prog.add_psd(
            6, {LinExpr(1.0), ri, rj, LinExpr(0.0), ii, ij,
                wdi, wre, (-1.0) * ii, LinExpr(0.0), (-1.0) * wim,
                wdj, (-1.0) * ij, wim, LinExpr(0.0),
                LinExpr(1.0), ri, rj,
                wdi, wre,
                wdj});
      }
    } else {
      // One (|V|+1)-dimensional Hermitian block [[1, v*], [v, W]] per period,
      // realized through the real 2(|V|+1) embedding.
      const int N = V + 1;
      auto reH = [&](int a, int b) -> LinExpr {
        if (a > b) std::swap(a, b);
        if (a == 0) return b == 0 ? LinExpr(1.0) : LinExpr::var(m.vre(b - 1, t));
        int i = a - 1, j = b - 1;
        if (i == j) return LinExpr::var(m.wd(i, t));
        auto it = W.edge_id.find({i, j});
        if (it != W.edge_id.end()) return LinExpr::var(m.wre(it->second, t));
        return LinExpr::var(m.fill_re(m.fill_id(i, j), t));
      };
      auto imH = [&](int a, int b) -> LinExpr {  // Im H(a,b), skew-symmetric
        double sgn = 1.0;
        if (a > b) {
          std::swap(a, b);
          sgn = -1.0;
        }
        if (a == b) return LinExpr(0.0);
        if (a == 0) return LinExpr::var(m.vim(b - 1, t), -sgn);  // H(0,k) = conj(v_k)
        int i = a - 1, j = b - 1;
        auto it = W.edge_id.find({i, j});
        if (it != W.edge_id.end()) return LinExpr::var(m.wim(it->second, t), sgn);
        return LinExpr::var(m.fill_im(m.fill_id(i, j), t), sgn);
      };
      std::vector<LinExpr> entries;
      entries.reserve(N * (2 * N + 1));
      for (int col = 0; col < 2 * N; ++col)
        for (int row = col; row < 2 * N; ++row) {
          bool rb = row >= N, cb = col >= N;
          int a = row - (rb ? N : 0), b = col - (cb ? N : 0);
          if (rb == cb)
            entries.push_back(reH(a, b));
          else  // lower-left block of [[Re, -Im], [Im, Re]]
            entries.push_back(imH(a, b));
        }
      prog.add_psd(2 * N, std::move(entries));
    }
  }

  // --- Objective: sum of production costs plus the anchored penalty. ---
  LinExpr obj;
  for (int g = 0; g < G; ++g)
    for (int t = 0; t < T; ++t) obj.add(m.c(g, t), 1.0);

  if (mu > 0.0) {
    // The production costs are in dollars on MW quantities while the
    // penalty lives on per-unit quantities; weighting kappa by base_mva^2
    // puts the two on the same scale, so the headline mu values stay O(1).
    const double mu_w = mu * net.base_mva * net.base_mva;
    // Pair lookup for the trace term's off-diagonal support.
    const Eigen::SparseMatrix<Complex, Eigen::RowMajor> Mr(pen.M);
    for (int t = 0; t < T; ++t) {
      // tr{W M}: diagonal plus twice the real part over canonical pairs.
      for (int k = 0; k < V; ++k) obj.add(m.wd(k, t), mu_w * Mr.coeff(k, k).real());
      for (int k = 0; k < V; ++k)
        for (Eigen::SparseMatrix<Complex, Eigen::RowMajor>::InnerIterator it(Mr, k); it;
             ++it) {
          int j = static_cast<int>(it.col());
          if (j <= k) continue;
          auto eid = W.edge_id.find({k, j});
          if (eid == W.edge_id.end())
            throw std::logic_error("penalty matrix support outside the edge set");
          obj.add(m.wre(eid->second, t), mu_w * 2.0 * it.value().real());
          obj.add(m.wim(eid->second, t), mu_w * 2.0 * it.value().imag());
        }
      // -2 Re(v0* M v) + v0* M v0.
      Eigen::VectorXcd mv0 = pen.apply(anchor.v0.col(t));
      for (int k = 0; k < V; ++k) {
        obj.add(m.vre(k, t), -mu_w * 2.0 * mv0(k).real());
        obj.add(m.vim(k, t), -mu_w * 2.0 * mv0(k).imag());
      }
      obj.constant += mu_w * pen.quad_form(anchor.v0.col(t));
      // Quadratic completions for (x, z), (p, o), (q, r).
      for (int g = 0; g < G; ++g) {
        double x0 = anchor.x0(g, t), p0 = anchor.s0(g, t).real(),
               q0 = anchor.s0(g, t).imag();
        obj.add(m.z(g, t), mu_w);
        obj.add(m.x(g, t), -mu_w * 2.0 * x0);
        obj.add(m.o(g, t), mu_w);
        obj.add(m.p(g, t), -mu_w * 2.0 * p0);
        obj.add(m.r(g, t), mu_w);
        obj.add(m.q(g, t), -mu_w * 2.0 * q0);
        obj.constant += mu_w * (x0 * x0 + p0 * p0 + q0 * q0);
      }
      // Flow completions for both directions.
      for (int l = 0; l < E; ++l) {
        Complex f0 = anchor.sf0(l, t), t0 = anchor.st0(l, t);
        obj.add(m.ff(l, t), mu_w);
        obj.add(m.sfre(l, t), -mu_w * 2.0 * f0.real());
        obj.add(m.sfim(l, t), -mu_w * 2.0 * f0.imag());
        obj.add(m.ft(l, t), mu_w);
        obj.add(m.stre(l, t), -mu_w * 2.0 * t0.real());
        obj.add(m.stim(l, t), -mu_w * 2.0 * t0.imag());
        obj.constant += mu_w * (std::norm(f0) + std::norm(t0));
      }
    }
  }
  prog.objective = std::move(obj);
  return out;
}

RelaxationSolution extract(const AssembledProgram& asmbl, const conic::SolveResult& res,
                           const UcInstance& inst, const NetworkMatrices& mats,
                           const PenaltyMatrix& pen, const Anchor& anchor, double mu) {
  const VarMap& m = asmbl.map;
  const auto& xv = res.x;
  if (static_cast<int>(xv.size()) != m.n)
    throw std::logic_error("solver vector length does not match the variable map");

  RelaxationSolution sol;
  sol.status = res.status;
  auto mat = [&](auto idx) {
    Eigen::MatrixXd out(m.G, m.T);
    for (int g = 0; g < m.G; ++g)
      for (int t = 0; t < m.T; ++t) out(g, t) = xv[idx(g, t)];
    return out;
  };
  sol.x = mat([&](int g, int t) { return m.x(g, t); });
  sol.p = mat([&](int g, int t) { return m.p(g, t); });
  sol.q = mat([&](int g, int t) { return m.q(g, t); });
  sol.c = mat([&](int g, int t) { return m.c(g, t); });
  sol.z = mat([&](int g, int t) { return m.z(g, t); });
  sol.o = mat([&](int g, int t) { return m.o(g, t); });
  sol.r = mat([&](int g, int t) { return m.r(g, t); });
  sol.u = mat([&](int g, int t) { return m.u(g, t); });
  sol.b = mat([&](int g, int t) { return m.b(g, t); });

  sol.v.resize(m.V, m.T);
  std::vector<bool> has_branch(m.V, false);
  for (const Branch& br : inst.network.branches)
    has_branch[br.from] = has_branch[br.to] = true;
  for (int k = 0; k < m.V; ++k)
    for (int t = 0; t < m.T; ++t) {
      sol.v(k, t) = Complex(xv[m.vre(k, t)], xv[m.vim(k, t)]);
      // An isolated bus has no penalty support, so vre/vim float free; the
      // lifted diagonal still pins the magnitude, and the phase is arbitrary.
      if (!has_branch[k])
        sol.v(k, t) = std::sqrt(std::max(0.0, xv[m.wd(k, t)]));
    }

  sol.W.resize(m.T);
  for (int t = 0; t < m.T; ++t) {
    SparseHermitian& W = sol.W[t];
    W.n = m.V;
    W.diag.resize(m.V);
    for (int k = 0; k < m.V; ++k) W.diag(k) = xv[m.wd(k, t)];
    for (int e = 0; e < m.P; ++e)
      W.upper.emplace_back(mats.edge_pairs[e].first, mats.edge_pairs[e].second,
                           Complex(xv[m.wre(e, t)], xv[m.wim(e, t)]));
  }

  sol.sf.resize(m.E, m.T);
  sol.st.resize(m.E, m.T);
  sol.ff.resize(m.E, m.T);
  sol.ft.resize(m.E, m.T);
  for (int l = 0; l < m.E; ++l)
    for (int t = 0; t < m.T; ++t) {
      sol.sf(l, t) = Complex(xv[m.sfre(l, t)], xv[m.sfim(l, t)]);
      sol.st(l, t) = Complex(xv[m.stre(l, t)], xv[m.stim(l, t)]);
      sol.ff(l, t) = xv[m.ff(l, t)];
      sol.ft(l, t) = xv[m.ft(l, t)];
    }

  sol.objective_cost = sol.c.sum();
  sol.penalty_value = mu > 0.0 ? penalty_value(sol, anchor, pen, inst) : 0.0;

  double recomputed = sol.objective_cost +
                      mu * inst.network.base_mva * inst.network.base_mva *
                          sol.penalty_value;
  double scale = std::max({1.0, std::abs(recomputed), std::abs(res.objective)});
  if (std::abs(recomputed - res.objective) > 1e-6 * scale)
    throw std::logic_error("objective bookkeeping mismatch between solver and fields");
  return sol;
}

double penalty_value(const RelaxationSolution& sol, const Anchor& anchor,
                     const PenaltyMatrix& pen, const UcInstance& inst) {
  const int T = inst.horizon, G = inst.network.n_generators(),
            E = inst.network.n_branches();
  double kappa = 0.0;
  for (int t = 0; t < T; ++t) {
    Eigen::VectorXcd v = sol.v.col(t), v0 = anchor.v0.col(t);
    kappa += pen.trace_with(sol.W[t]);
    kappa -= 2.0 * (v0.adjoint() * pen.apply(v))(0).real();
    kappa += pen.quad_form(v0);
    for (int g = 0; g < G; ++g) {
      double x0 = anchor.x0(g, t), p0 = anchor.s0(g, t).real(),
             q0 = anchor.s0(g, t).imag();
      kappa += sol.z(g, t) - 2.0 * sol.x(g, t) * x0 + x0 * x0;
      kappa += sol.o(g, t) - 2.0 * sol.p(g, t) * p0 + p0 * p0;
      kappa += sol.r(g, t) - 2.0 * sol.q(g, t) * q0 + q0 * q0;
    }
    for (int l = 0; l < E; ++l) {
      kappa += sol.ff(l, t) -
               2.0 * (std::conj(anchor.sf0(l, t)) * sol.sf(l, t)).real() +
               std::norm(anchor.sf0(l, t));
      kappa += sol.ft(l, t) -
               2.0 * (std::conj(anchor.st0(l, t)) * sol.st(l, t)).real() +
               std::norm(anchor.st0(l, t));
    }
  }
  return kappa;
}

double cost_of(const UcInstance& inst, const Eigen::MatrixXd& x,
               const Eigen::MatrixXd& p) {
  const double B = inst.network.base_mva;
  double total = 0.0;
  for (int g = 0; g < inst.network.n_generators(); ++g) {
    const UcEconomics& ec = inst.economics[g];
    for (int t = 0; t < inst.horizon; ++t) {
      double xp = t > 0 ? x(g, t - 1) : history(inst.initial[g], 0);
      double pw = p(g, t) * B;
      total += ec.alpha * pw + ec.beta * pw * pw + ec.gamma * x(g, t) +
               ec.gamma_up * (1.0 - xp) * x(g, t) + ec.gamma_dn * xp * (1.0 - x(g, t));
    }
  }
  return total;
}

}  // namespace ucr
