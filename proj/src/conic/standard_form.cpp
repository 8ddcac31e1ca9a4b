#include "ucr/conic/standard_form.hpp"

#include <cmath>
#include <ostream>
#include <stdexcept>

namespace ucr::conic {

namespace {
constexpr double kSqrt2 = 1.4142135623730951;
}

void ConicProgram::add_psd(int dim, std::vector<LinExpr> entries) {
  if (static_cast<int>(entries.size()) != dim * (dim + 1) / 2)
    throw std::invalid_argument("psd cone entry count does not match dimension");
  Cone c;
  c.type = ConeType::PsdReal;
  c.dim = dim;
  c.entries = std::move(entries);
  cones.push_back(std::move(c));
}

void ConicProgram::check_valid() const {
  auto check_terms = [&](const std::vector<std::pair<int, double>>& terms) {
    for (auto [i, v] : terms) {
      if (i < 0 || i >= n) throw std::invalid_argument("variable index out of range");
      if (!std::isfinite(v)) throw std::invalid_argument("non-finite coefficient");
    }
  };
  check_terms(objective.terms);
  for (const Row& r : equalities) check_terms(r.a);
  for (const Row& r : inequalities) check_terms(r.a);
  for (const Cone& c : cones) {
    if (c.type == ConeType::RotatedQuad && c.entries.size() < 3)
      throw std::invalid_argument("rotated cone needs at least 3 entries");
    if (c.type == ConeType::PsdReal &&
        static_cast<int>(c.entries.size()) != c.dim * (c.dim + 1) / 2)
      throw std::invalid_argument("psd cone entry count mismatch");
    for (const LinExpr& e : c.entries) check_terms(e.terms);
  }
}

void ConicProgram::dump(std::ostream& out) const {
  auto put_expr = [&](const LinExpr& e) {
    for (auto [i, v] : e.terms) out << " " << i << ":" << v;
    out << " const:" << e.constant;
  };
  out << "vars " << n << "\n";
  out << "objective";
  put_expr(objective);
  out << "\n";
  for (const Row& r : equalities) {
    out << "eq";
    for (auto [i, v] : r.a) out << " " << i << ":" << v;
    out << " = " << r.rhs << "\n";
  }
  for (const Row& r : inequalities) {
    out << "ineq";
    for (auto [i, v] : r.a) out << " " << i << ":" << v;
    out << " <= " << r.rhs << "\n";
  }
  for (const Cone& c : cones) {
    switch (c.type) {
      case ConeType::NonNeg: out << "cone nonneg"; break;
      case ConeType::RotatedQuad: out << "cone rquad"; break;
      case ConeType::PsdReal: out << "cone psd " << c.dim; break;
    }
    out << "\n";
    for (const LinExpr& e : c.entries) {
      out << "  entry";
      put_expr(e);
      out << "\n";
    }
  }
}

int StandardForm::degree() const {
  int deg = nn_dim + static_cast<int>(soc_dims.size());
  for (int d : psd_dims) deg += d;
  return deg;
}

int StandardForm::max_psd_dim() const {
  int m = 0;
  for (int d : psd_dims) m = std::max(m, d);
  return m;
}

Eigen::MatrixXd svec_to_mat(const Eigen::Ref<const Eigen::VectorXd>& v, int d) {
  Eigen::MatrixXd m(d, d);
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i, ++k) {
      double val = i == j ? v(k) : v(k) / kSqrt2;
      m(i, j) = val;
      m(j, i) = val;
    }
  return m;
}

Eigen::VectorXd mat_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& m) {
  const int d = static_cast<int>(m.rows());
  Eigen::VectorXd v(svec_dim(d));
  int k = 0;
  for (int j = 0; j < d; ++j)
    for (int i = j; i < d; ++i, ++k) v(k) = i == j ? m(i, j) : m(i, j) * kSqrt2;
  return v;
}

StandardForm to_standard_form(const ConicProgram& prog) {
  prog.check_valid();
  StandardForm sf;
  sf.n = prog.n;
  sf.c = Eigen::VectorXd::Zero(prog.n);
  for (auto [i, v] : prog.objective.terms) sf.c(i) += v;
  sf.obj_const = prog.objective.constant;

  std::vector<Eigen::Triplet<double>> at;
  sf.b.resize(prog.equalities.size());
  for (size_t r = 0; r < prog.equalities.size(); ++r) {
    for (auto [i, v] : prog.equalities[r].a) at.emplace_back(static_cast<int>(r), i, v);
    sf.b(r) = prog.equalities[r].rhs;
  }
  sf.A.resize(static_cast<int>(prog.equalities.size()), prog.n);
  sf.A.setFromTriplets(at.begin(), at.end());

  // Cone rows: s = h - G x must equal the cone-entry expressions, so each
  // expression e contributes G row = -e.terms, h = e.constant.
  std::vector<Eigen::Triplet<double>> gt;
  std::vector<double> h;
  auto push_expr = [&](const LinExpr& e, double scale) {
    int row = static_cast<int>(h.size());
    for (auto [i, v] : e.terms) gt.emplace_back(row, i, -v * scale);
    h.push_back(e.constant * scale);
  };

  // Nonnegative block: inequality rows then NonNeg cone entries.
  for (const auto& r : prog.inequalities) {
    int row = static_cast<int>(h.size());
    for (auto [i, v] : r.a) gt.emplace_back(row, i, v);
    h.push_back(r.rhs);
  }
  for (const Cone& c : prog.cones)
    if (c.type == ConeType::NonNeg)
      for (const LinExpr& e : c.entries) push_expr(e, 1.0);
  sf.nn_dim = static_cast<int>(h.size());

  // Second-order cones: rotated (u, w, z) -> ((u+w)/sqrt2, (u-w)/sqrt2, z).
  for (const Cone& c : prog.cones) {
    if (c.type != ConeType::RotatedQuad) continue;
    LinExpr top = (1.0 / kSqrt2) * c.entries[0] + (1.0 / kSqrt2) * c.entries[1];
    LinExpr second = (1.0 / kSqrt2) * c.entries[0] + (-1.0 / kSqrt2) * c.entries[1];
    push_expr(top, 1.0);
    push_expr(second, 1.0);
    for (size_t k = 2; k < c.entries.size(); ++k) push_expr(c.entries[k], 1.0);
    sf.soc_dims.push_back(static_cast<int>(c.entries.size()));
  }

  // PSD blocks in svec coordinates.
  for (const Cone& c : prog.cones) {
    if (c.type != ConeType::PsdReal) continue;
    int k = 0;
    for (int j = 0; j < c.dim; ++j)
      for (int i = j; i < c.dim; ++i, ++k) push_expr(c.entries[k], i == j ? 1.0 : kSqrt2);
    sf.psd_dims.push_back(c.dim);
  }

  sf.G.resize(static_cast<int>(h.size()), prog.n);
  sf.G.setFromTriplets(gt.begin(), gt.end());
  sf.h = Eigen::Map<Eigen::VectorXd>(h.data(), static_cast<Eigen::Index>(h.size()));
  return sf;
}

}  // namespace ucr::conic
