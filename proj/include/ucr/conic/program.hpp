#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ucr::conic {

// Sparse affine expression a.x + constant.
struct LinExpr {
  std::vector<std::pair<int, double>> terms;
  double constant = 0.0;

  LinExpr() = default;
  LinExpr(double c) : constant(c) {}  // NOLINT: implicit constant lift
  static LinExpr var(int i, double coeff = 1.0) {
    LinExpr e;
    e.terms.emplace_back(i, coeff);
    return e;
  }
  LinExpr& add(int i, double coeff) {
    if (coeff != 0.0) terms.emplace_back(i, coeff);
    return *this;
  }
  LinExpr& operator+=(const LinExpr& o) {
    terms.insert(terms.end(), o.terms.begin(), o.terms.end());
    constant += o.constant;
    return *this;
  }
  LinExpr& operator*=(double k) {
    for (auto& [i, c] : terms) c *= k;
    constant *= k;
    return *this;
  }
  double eval(const std::vector<double>& x) const {
    double v = constant;
    for (auto [i, c] : terms) v += c * x[i];
    return v;
  }
};

inline LinExpr operator*(double k, LinExpr e) {
  e *= k;
  return e;
}
inline LinExpr operator+(LinExpr a, const LinExpr& b) {
  a += b;
  return a;
}

enum class ConeType {
  NonNeg,       // each entry >= 0
  RotatedQuad,  // entries (u, w, z...): 2 u w >= ||z||^2, u, w >= 0
  PsdReal,      // lower-triangular column-major entries of a symmetric
                // dim x dim matrix required PSD
};

struct Cone {
  ConeType type = ConeType::NonNeg;
  int dim = 0;  // matrix side for PsdReal, unused otherwise
  std::vector<LinExpr> entries;
};

// Linear conic program: minimize objective subject to equality rows
// (a.x = rhs), inequality rows (a.x <= rhs), and cone memberships over
// affine expressions of the variables.
struct ConicProgram {
  int n = 0;
  LinExpr objective;  // includes any constant offset
  struct Row {
    std::vector<std::pair<int, double>> a;
    double rhs = 0.0;
  };
  std::vector<Row> equalities;
  std::vector<Row> inequalities;
  std::vector<Cone> cones;

  int add_var() { return n++; }
  int add_vars(int k) {
    int first = n;
    n += k;
    return first;
  }
  void add_eq(LinExpr e) {  // e == 0
    Row r;
    r.a = std::move(e.terms);
    r.rhs = -e.constant;
    equalities.push_back(std::move(r));
  }
  void add_ineq(LinExpr e) {  // e <= 0
    Row r;
    r.a = std::move(e.terms);
    r.rhs = -e.constant;
    inequalities.push_back(std::move(r));
  }
  void add_nonneg(std::vector<LinExpr> entries) {
    cones.push_back({ConeType::NonNeg, 0, std::move(entries)});
  }
  void add_rotated(LinExpr u, LinExpr w, std::vector<LinExpr> z) {
    Cone c;
    c.type = ConeType::RotatedQuad;
    c.entries.push_back(std::move(u));
    c.entries.push_back(std::move(w));
    for (auto& e : z) c.entries.push_back(std::move(e));
    cones.push_back(std::move(c));
  }
  // entries: lower triangle, column-major, of a dim x dim symmetric matrix.
  void add_psd(int dim, std::vector<LinExpr> entries);

  void check_valid() const;  // throws std::invalid_argument

  // Writes a row/cone listing in a plain text format for cross-checking.
  void dump(std::ostream& out) const;
};

}  // namespace ucr::conic
