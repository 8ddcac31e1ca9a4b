#include "ucr/conic/solve.hpp"

#include <cmath>

#include "ucr/conic/standard_form.hpp"

namespace ucr::conic {

namespace {

// Ruiz equilibration of the standard form in place. Rows of A scale freely;
// rows of G scale uniformly within each cone block so membership is
// preserved. Returns the column scales and the objective normalizer needed
// to map a solution of the scaled problem back.
struct Equilibration {
  Eigen::VectorXd col;   // x = col .* x_scaled
  double cost = 1.0;     // true objective = cost * scaled objective
};

Equilibration equilibrate(StandardForm& sf) {
  const int n = sf.n;
  const int p = static_cast<int>(sf.b.size());
  const int m = sf.cone_rows();

  std::vector<std::pair<int, int>> blocks;
  for (int i = 0; i < sf.nn_dim; ++i) blocks.emplace_back(i, 1);
  int off = sf.nn_dim;
  for (int d : sf.soc_dims) {
    blocks.emplace_back(off, d);
    off += d;
  }
  for (int d : sf.psd_dims) {
    blocks.emplace_back(off, svec_dim(d));
    off += svec_dim(d);
  }

  Equilibration eq;
  eq.col = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd da = Eigen::VectorXd::Ones(p), dg = Eigen::VectorXd::Ones(m);
  for (int pass = 0; pass < 10; ++pass) {
    Eigen::VectorXd ra = Eigen::VectorXd::Zero(p), rg = Eigen::VectorXd::Zero(m);
    for (int k = 0; k < sf.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.A, k); it; ++it)
        ra(it.row()) = std::max(ra(it.row()), std::abs(it.value()));
    for (int k = 0; k < sf.G.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.G, k); it; ++it)
        rg(it.row()) = std::max(rg(it.row()), std::abs(it.value()));
    Eigen::VectorXd sa = Eigen::VectorXd::Ones(p), sg = Eigen::VectorXd::Ones(m);
    for (int i = 0; i < p; ++i)
      if (ra(i) > 0) sa(i) = 1.0 / std::sqrt(ra(i));
    for (auto [o, len] : blocks) {
      double mx = rg.segment(o, len).maxCoeff();
      if (mx > 0) sg.segment(o, len).setConstant(1.0 / std::sqrt(mx));
    }
    sf.A = sa.asDiagonal() * sf.A;
    sf.G = sg.asDiagonal() * sf.G;
    da = da.cwiseProduct(sa);
    dg = dg.cwiseProduct(sg);

    Eigen::VectorXd cn = Eigen::VectorXd::Zero(n);
    for (int k = 0; k < sf.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.A, k); it; ++it)
        cn(it.col()) = std::max(cn(it.col()), std::abs(it.value()));
    for (int k = 0; k < sf.G.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf.G, k); it; ++it)
        cn(it.col()) = std::max(cn(it.col()), std::abs(it.value()));
    Eigen::VectorXd sc = Eigen::VectorXd::Ones(n);
    for (int j = 0; j < n; ++j)
      if (cn(j) > 0) sc(j) = 1.0 / std::sqrt(cn(j));
    sf.A = sf.A * sc.asDiagonal();
    sf.G = sf.G * sc.asDiagonal();
    eq.col = eq.col.cwiseProduct(sc);
  }
  sf.b = da.asDiagonal() * sf.b;
  sf.h = dg.asDiagonal() * sf.h;
  sf.c = eq.col.asDiagonal() * sf.c;
  eq.cost = std::max(1.0, sf.c.lpNorm<Eigen::Infinity>());
  sf.c /= eq.cost;
  return eq;
}

}  // namespace

SolveResult solve_ipm(const StandardForm& sf, const SolverOptions& opts);
SolveResult solve_admm(const StandardForm& sf, const SolverOptions& opts);

std::string to_string(SolverStatus st) {
  switch (st) {
    case SolverStatus::Optimal: return "optimal";
    case SolverStatus::NearOptimal: return "near_optimal";
    case SolverStatus::Infeasible: return "infeasible";
    case SolverStatus::Unbounded: return "unbounded";
    case SolverStatus::NumericalFailure: return "numerical_failure";
  }
  return "unknown";
}

SolveResult solve(const ConicProgram& prog, const SolverOptions& opts) {
  prog.check_valid();
  StandardForm sf = to_standard_form(prog);
  const double obj_const = sf.obj_const;
  sf.obj_const = 0.0;
  Equilibration eq = equilibrate(sf);
  Backend backend = opts.backend;
  if (backend == Backend::Auto)
    backend = sf.max_psd_dim() > opts.ipm_psd_limit ? Backend::Admm : Backend::Ipm;
  SolveResult res = backend == Backend::Admm ? solve_admm(sf, opts) : solve_ipm(sf, opts);
  for (int j = 0; j < sf.n; ++j)
    if (!res.x.empty()) res.x[j] *= eq.col(j);
  res.objective = eq.cost * res.objective + obj_const;
  return res;
}

}  // namespace ucr::conic
