#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "ucr/conic/solve.hpp"
#include "ucr/conic/standard_form.hpp"

using namespace ucr::conic;

namespace {

SolveResult solve_with(ConicProgram& p, Backend be) {
  SolverOptions opts;
  opts.backend = be;
  return solve(p, opts);
}

}  // namespace

TEST_CASE("lp: single bound") {
  // minimize x subject to x >= 3
  ConicProgram p;
  int x = p.add_var();
  p.objective = LinExpr::var(x);
  p.add_nonneg({LinExpr::var(x) + LinExpr(-3.0)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.x[x] == doctest::Approx(3.0).epsilon(1e-6));
    CHECK(r.objective == doctest::Approx(3.0).epsilon(1e-6));
  }
}

TEST_CASE("lp: infeasible box") {
  // x <= 0 and x >= 1 cannot both hold
  ConicProgram p;
  int x = p.add_var();
  p.objective = LinExpr::var(x);
  p.add_ineq(LinExpr::var(x));
  p.add_nonneg({LinExpr::var(x) + LinExpr(-1.0)});
  auto r = solve_with(p, Backend::Ipm);
  CHECK(r.status == SolverStatus::Infeasible);
}

TEST_CASE("lp: unbounded") {
  ConicProgram p;
  int x = p.add_var();
  p.objective = LinExpr::var(x);
  p.add_ineq(LinExpr::var(x));  // x <= 0, objective unbounded below
  auto r = solve_with(p, Backend::Ipm);
  CHECK(r.status == SolverStatus::Unbounded);
}

TEST_CASE("lp: simplex face") {
  // minimize -x - 2y subject to x + y = 1, x, y >= 0  ->  y = 1
  ConicProgram p;
  int x = p.add_var();
  int y = p.add_var();
  p.objective = LinExpr::var(x, -1.0) + LinExpr::var(y, -2.0);
  p.add_eq(LinExpr::var(x) + LinExpr::var(y) + LinExpr(-1.0));
  p.add_nonneg({LinExpr::var(x), LinExpr::var(y)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.objective == doctest::Approx(-2.0).epsilon(1e-6));
    CHECK(r.x[y] == doctest::Approx(1.0).epsilon(1e-5));
  }
}

TEST_CASE("socp: squared norm bound") {
  // minimize t subject to 2 * t * 0.5 >= 3^2 + 4^2  ->  t = 25
  ConicProgram p;
  int t = p.add_var();
  int half = p.add_var();
  p.objective = LinExpr::var(t);
  p.add_eq(LinExpr::var(half) + LinExpr(-0.5));
  p.add_rotated(LinExpr::var(t), LinExpr::var(half), {LinExpr(3.0), LinExpr(4.0)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.x[t] == doctest::Approx(25.0).epsilon(1e-5));
  }
}

TEST_CASE("socp: projection onto a line") {
  // minimize t with 2 t (1/2) >= (x-1)^2 + (x-3)^2 over free x: x = 2, t = 2
  ConicProgram p;
  int t = p.add_var();
  int x = p.add_var();
  int half = p.add_var();
  p.objective = LinExpr::var(t);
  p.add_eq(LinExpr::var(half) + LinExpr(-0.5));
  p.add_rotated(LinExpr::var(t), LinExpr::var(half),
                {LinExpr::var(x) + LinExpr(-1.0), LinExpr::var(x) + LinExpr(-3.0)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.x[x] == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-5));
  }
}

TEST_CASE("sdp: arithmetic-geometric mean") {
  // minimize a + c subject to [[a, 1], [1, c]] PSD  ->  a = c = 1
  ConicProgram p;
  int a = p.add_var();
  int c = p.add_var();
  p.objective = LinExpr::var(a) + LinExpr::var(c);
  p.add_psd(2, {LinExpr::var(a), LinExpr(1.0), LinExpr::var(c)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.objective == doctest::Approx(2.0).epsilon(1e-5));
    CHECK(r.x[a] == doctest::Approx(1.0).epsilon(1e-4));
  }
}

TEST_CASE("sdp: smallest eigenvalue via trace constraint") {
  // minimize s subject to s I - M PSD for M = [[2, 1], [1, 2]] -> s = 3
  ConicProgram p;
  int s = p.add_var();
  p.objective = LinExpr::var(s);
  p.add_psd(2, {LinExpr::var(s) + LinExpr(-2.0), LinExpr(-1.0),
                LinExpr::var(s) + LinExpr(-2.0)});
  for (Backend be : {Backend::Ipm, Backend::Admm}) {
    auto r = solve_with(p, be);
    CHECK(r.status == SolverStatus::Optimal);
    CHECK(r.x[s] == doctest::Approx(3.0).epsilon(1e-5));
  }
}

TEST_CASE("mixed: lp + socp + sdp cross-backend agreement") {
  // minimize x + y + s with x + y >= 2, x^2 <= y (rotated with 1/2),
  // [[s, x], [x, 1]] PSD (s >= x^2); optimum drives x towards balance.
  ConicProgram p;
  int x = p.add_var();
  int y = p.add_var();
  int s = p.add_var();
  int half = p.add_var();
  p.objective = LinExpr::var(x) + LinExpr::var(y) + LinExpr::var(s);
  p.add_eq(LinExpr::var(half) + LinExpr(-0.5));
  p.add_nonneg({LinExpr::var(x) + LinExpr::var(y) + LinExpr(-2.0)});
  p.add_rotated(LinExpr::var(y), LinExpr::var(half), {LinExpr::var(x)});
  p.add_psd(2, {LinExpr::var(s), LinExpr::var(x), LinExpr(1.0)});
  auto ri = solve_with(p, Backend::Ipm);
  auto ra = solve_with(p, Backend::Admm);
  REQUIRE(ri.status == SolverStatus::Optimal);
  REQUIRE(ra.status == SolverStatus::Optimal);
  CHECK(ri.objective == doctest::Approx(ra.objective).epsilon(1e-5));
  CHECK(ri.x[x] == doctest::Approx(ra.x[x]).epsilon(1e-4));
}

TEST_CASE("standard form: svec round trip") {
  Eigen::MatrixXd M(3, 3);
  M << 4, 1, 2, 1, 5, 3, 2, 3, 6;
  Eigen::VectorXd v = mat_to_svec(M);
  CHECK(v.size() == 6);
  Eigen::MatrixXd back = svec_to_mat(v, 3);
  CHECK((back - M).cwiseAbs().maxCoeff() < 1e-14);
  // Frobenius inner product preserved under the svec scaling.
  CHECK(v.squaredNorm() == doctest::Approx(M.squaredNorm()).epsilon(1e-12));
}
