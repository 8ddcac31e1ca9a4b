#include "ucr/network.hpp"

#include <cmath>
#include <map>

namespace ucr {

SparseHermitian SparseHermitian::outer(const Eigen::VectorXcd& v,
                                       const std::vector<std::pair<int, int>>& pairs) {
  SparseHermitian W;
  W.n = static_cast<int>(v.size());
  W.diag = v.cwiseAbs2();
  W.upper.reserve(pairs.size());
  for (auto [i, j] : pairs) W.upper.emplace_back(i, j, v(i) * std::conj(v(j)));
  return W;
}

NetworkMatrices build_matrices(const PowerNetwork& net) {
  const int nv = net.n_buses();
  const int ne = net.n_branches();
  const int ng = net.n_generators();
  NetworkMatrices m;

  using Td = Eigen::Triplet<double>;
  using Tc = Eigen::Triplet<Complex>;

  std::vector<Td> cg;
  cg.reserve(ng);
  for (int g = 0; g < ng; ++g) cg.emplace_back(g, net.generators[g].bus, 1.0);
  m.C.resize(ng, nv);
  m.C.setFromTriplets(cg.begin(), cg.end());

  std::vector<Td> cf, ct;
  std::vector<Tc> yf, yt;
  std::map<std::pair<int, int>, int> pair_index;
  m.branch_pair.resize(ne);
  m.branch_reversed.resize(ne);
  for (int l = 0; l < ne; ++l) {
    const Branch& br = net.branches[l];
    if (br.r == 0.0 && br.x == 0.0)
      throw std::invalid_argument("branch " + std::to_string(l) +
                                  " has zero series impedance");
    const Complex y = br.series_admittance();
    const Complex yc = y + Complex(0.0, br.b_prl / 2.0);
    const double tau = br.tap;
    const Complex rot = std::polar(1.0, br.shift);  // e^{i theta}

    cf.emplace_back(l, br.from, 1.0);
    ct.emplace_back(l, br.to, 1.0);
    yf.emplace_back(l, br.from, yc / (tau * tau));
    yf.emplace_back(l, br.to, -y / (tau * std::conj(rot)));
    yt.emplace_back(l, br.from, -y / (tau * rot));
    yt.emplace_back(l, br.to, yc);

    auto pair = std::minmax(br.from, br.to);
    auto key = std::make_pair(pair.first, pair.second);
    auto [it, inserted] = pair_index.try_emplace(key, static_cast<int>(m.edge_pairs.size()));
    if (inserted) m.edge_pairs.push_back(key);
    m.branch_pair[l] = it->second;
    m.branch_reversed[l] = br.from > br.to;
  }
  m.C_from.resize(ne, nv);
  m.C_from.setFromTriplets(cf.begin(), cf.end());
  m.C_to.resize(ne, nv);
  m.C_to.setFromTriplets(ct.begin(), ct.end());
  m.Y_from.resize(ne, nv);
  m.Y_from.setFromTriplets(yf.begin(), yf.end());
  m.Y_to.resize(ne, nv);
  m.Y_to.setFromTriplets(yt.begin(), yt.end());

  Eigen::SparseMatrix<Complex> shunt(nv, nv);
  std::vector<Tc> sh;
  for (int k = 0; k < nv; ++k)
    if (net.buses[k].shunt != Complex(0.0, 0.0)) sh.emplace_back(k, k, net.buses[k].shunt);
  shunt.setFromTriplets(sh.begin(), sh.end());

  m.Y = Eigen::SparseMatrix<Complex>(m.C_from.transpose().cast<Complex>()) * m.Y_from +
        Eigen::SparseMatrix<Complex>(m.C_to.transpose().cast<Complex>()) * m.Y_to + shunt;
  m.Y.prune(Complex(0.0, 0.0));
  return m;
}

int zeta_sign(const Branch& branch) {
  return branch.series_admittance().imag() <= 0.0 ? +1 : -1;
}

PenaltyMatrix build_penalty_matrix(const PowerNetwork& net, double eta, double alpha) {
  if (!(eta > 0.0 && eta < 1.0)) throw std::invalid_argument("eta must be in (0,1)");
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");

  PenaltyMatrix pen;
  pen.eta = eta;
  pen.alpha = alpha;
  const int nv = net.n_buses();
  std::vector<Eigen::Triplet<Complex>> trips;
  const Complex I(0.0, 1.0);

  for (const Branch& br : net.branches) {
    const Complex y = br.series_admittance();
    const double g = y.real();
    const double b = y.imag();
    const double tau = br.tap;
    const Complex rot = std::polar(1.0, br.shift);

    Eigen::Matrix2cd Yp_f, Yq_f, Yp_t, Yq_t;
    Yp_f << g / (tau * tau), rot * y / (-2.0 * tau),
            std::conj(y) / (-2.0 * tau * rot), 0.0;
    Yq_f << -b / (tau * tau), rot * y / (2.0 * tau * I),
            std::conj(y) / (-2.0 * tau * I * rot), 0.0;
    Yp_t << 0.0, rot * std::conj(y) / (-2.0 * tau),
            y / (-2.0 * tau * rot), g;
    Yq_t << 0.0, rot * std::conj(y) / (-2.0 * tau * I),
            y / (2.0 * tau * I * rot), -b;

    const int zeta = zeta_sign(br);
    Eigen::Matrix2cd block =
        static_cast<double>(zeta) * (Yq_f + Yq_t) + eta / (1.0 - eta) * (Yp_f + Yp_t);
    block += alpha * Eigen::Matrix2cd::Identity();

    pen.zeta.push_back(zeta);
    pen.line_blocks.push_back(block);

    const int i = br.from, j = br.to;
    trips.emplace_back(i, i, block(0, 0));
    trips.emplace_back(i, j, block(0, 1));
    trips.emplace_back(j, i, block(1, 0));
    trips.emplace_back(j, j, block(1, 1));
  }

  pen.M.resize(nv, nv);
  pen.M.setFromTriplets(trips.begin(), trips.end());
  return pen;
}

double PenaltyMatrix::trace_with(const SparseHermitian& W) const {
  // tr(W M) = sum_k W_kk M_kk + 2 sum_{i<j} Re(W_ij conj(M_ij))
  double total = 0.0;
  for (int k = 0; k < W.n; ++k) total += W.diag(k) * M.coeff(k, k).real();
  for (const auto& [i, j, w] : W.upper) {
    const Complex mij = M.coeff(i, j);
    total += 2.0 * (w.real() * mij.real() + w.imag() * mij.imag());
  }
  return total;
}

double PenaltyMatrix::quad_form(const Eigen::VectorXcd& v) const {
  return (v.adjoint() * (M * v))(0).real();
}

Eigen::VectorXcd PenaltyMatrix::apply(const Eigen::VectorXcd& v) const { return M * v; }

}  // namespace ucr
