// Primal-dual interior point method for the standard form
//   min c.x  s.t.  A x = b,  G x + s = h,  s in K,
// with K a product of the nonnegative orthant, second-order cones, and
// small PSD blocks. Nesterov-Todd scaling with a Mehrotra
// predictor-corrector step, in the style of conelp solvers. The reduced
// KKT system is solved by a regularized sparse LDLT with iterative
// refinement against the unregularized matrix.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include "ucr/conic/solve.hpp"
#include "ucr/conic/standard_form.hpp"

namespace ucr::conic {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Block {
  enum Kind { SOC, PSD } kind;
  int offset = 0;   // first row in s/z
  int dim = 0;      // row count (svec dim for PSD)
  int mat_dim = 0;  // matrix side for PSD
};

double soc_res(const Eigen::Ref<const Eigen::VectorXd>& u) {
  return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm();
}

class ConeSet {
 public:
  explicit ConeSet(const StandardForm& sf) : nn_(sf.nn_dim), degree_(sf.degree()) {
    int off = sf.nn_dim;
    for (int d : sf.soc_dims) {
      blocks_.push_back({Block::SOC, off, d, 0});
      off += d;
    }
    for (int d : sf.psd_dims) {
      blocks_.push_back({Block::PSD, off, svec_dim(d), d});
      off += svec_dim(d);
    }
    total_ = off;
  }

  int total() const { return total_; }
  int degree() const { return degree_; }
  int nn() const { return nn_; }
  const std::vector<Block>& blocks() const { return blocks_; }

  Eigen::VectorXd identity() const {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(total_);
    e.head(nn_).setOnes();
    for (const Block& blk : blocks_) {
      if (blk.kind == Block::SOC) {
        e(blk.offset) = 1.0;
      } else {
        int k = blk.offset;
        for (int j = 0; j < blk.mat_dim; ++j)
          for (int i = j; i < blk.mat_dim; ++i, ++k)
            if (i == j) e(k) = 1.0;
      }
    }
    return e;
  }

  // Smallest t such that u + t*identity lies in the cone.
  double max_step(const Eigen::VectorXd& u) const {
    double t = nn_ > 0 ? -u.head(nn_).minCoeff() : -kInf;
    for (const Block& blk : blocks_) {
      auto seg = u.segment(blk.offset, blk.dim);
      if (blk.kind == Block::SOC) {
        t = std::max(t, seg.tail(blk.dim - 1).norm() - seg(0));
      } else {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
            svec_to_mat(seg, blk.mat_dim), Eigen::EigenvaluesOnly);
        t = std::max(t, -es.eigenvalues().minCoeff());
      }
    }
    return t;
  }

  // Largest alpha with u + alpha*du staying in the cone (u strictly interior).
  double step_length(const Eigen::VectorXd& u, const Eigen::VectorXd& du) const {
    double alpha = kInf;
    for (int i = 0; i < nn_; ++i)
      if (du(i) < 0.0) alpha = std::min(alpha, -u(i) / du(i));
    for (const Block& blk : blocks_) {
      auto s = u.segment(blk.offset, blk.dim);
      auto d = du.segment(blk.offset, blk.dim);
      if (blk.kind == Block::SOC) {
        // Boundary roots of (s0 + a d0)^2 - ||s1 + a d1||^2, with s0 + a d0 >= 0.
        const int m = blk.dim - 1;
        double a = d(0) * d(0) - d.tail(m).squaredNorm();
        double b = 2.0 * (s(0) * d(0) - s.tail(m).dot(d.tail(m)));
        double cc = std::max(soc_res(s), 0.0);
        double bound = kInf;
        if (std::abs(a) < 1e-300) {
          if (b < 0.0) bound = -cc / b;
        } else {
          double disc = b * b - 4.0 * a * cc;
          if (disc >= 0.0) {
            double sq = std::sqrt(disc);
            double r1 = (-b - sq) / (2.0 * a);
            double r2 = (-b + sq) / (2.0 * a);
            if (r1 > r2) std::swap(r1, r2);
            if (r1 > 0.0)
              bound = r1;
            else if (r2 > 0.0 && a < 0.0)
              bound = r2;
          }
        }
        if (d(0) < 0.0) bound = std::min(bound, -s(0) / d(0));
        alpha = std::min(alpha, bound);
      } else {
        Eigen::MatrixXd S = svec_to_mat(s, blk.mat_dim);
        Eigen::MatrixXd D = svec_to_mat(d, blk.mat_dim);
        Eigen::LLT<Eigen::MatrixXd> llt(S);
        if (llt.info() != Eigen::Success) return 0.0;
        Eigen::MatrixXd L = llt.matrixL();
        Eigen::MatrixXd T = L.triangularView<Eigen::Lower>().solve(D);
        T = L.triangularView<Eigen::Lower>().solve(T.transpose().eval());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T, Eigen::EigenvaluesOnly);
        double lam_min = es.eigenvalues().minCoeff();
        if (lam_min < 0.0) alpha = std::min(alpha, -1.0 / lam_min);
      }
    }
    return alpha;
  }

 private:
  int nn_ = 0;
  int degree_ = 0;
  int total_ = 0;
  std::vector<Block> blocks_;
};

// Nesterov-Todd scaling state, recomputed every iteration.
struct Scaling {
  Eigen::VectorXd nn_w;                // sqrt(s_i / z_i)
  std::vector<Eigen::MatrixXd> soc_W;  // dense per SOC block
  std::vector<Eigen::MatrixXd> soc_Hinv;
  std::vector<Eigen::MatrixXd> psd_R;
  std::vector<Eigen::MatrixXd> psd_Rinv;
  std::vector<Eigen::MatrixXd> psd_Hinv;  // dense on svec coordinates
  Eigen::VectorXd lambda;

  bool compute(const ConeSet& cones, const Eigen::VectorXd& s, const Eigen::VectorXd& z);
  Eigen::VectorXd apply_Hinv(const ConeSet& cones, const Eigen::VectorXd& u) const;
  // W' u (adjoint of the scaling).
  Eigen::VectorXd apply_Wt(const ConeSet& cones, const Eigen::VectorXd& u) const;
  // W^{-T} u and W u, used for the Mehrotra correction term.
  Eigen::VectorXd apply_WinvT(const ConeSet& cones, const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_W(const ConeSet& cones, const Eigen::VectorXd& u) const;
  Eigen::VectorXd apply_Winv(const ConeSet& cones, const Eigen::VectorXd& u) const;
};

bool Scaling::compute(const ConeSet& cones, const Eigen::VectorXd& s,
                      const Eigen::VectorXd& z) {
  const int nn = cones.nn();
  nn_w.resize(nn);
  lambda.resize(cones.total());
  for (int i = 0; i < nn; ++i) {
    if (s(i) <= 0.0 || z(i) <= 0.0) return false;
    nn_w(i) = std::sqrt(s(i) / z(i));
    lambda(i) = std::sqrt(s(i) * z(i));
  }
  soc_W.clear();
  soc_Hinv.clear();
  psd_R.clear();
  psd_Rinv.clear();
  psd_Hinv.clear();
  for (const Block& blk : cones.blocks()) {
    auto sseg = s.segment(blk.offset, blk.dim);
    auto zseg = z.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      const int d = blk.dim;
      double sres = soc_res(sseg), zres = soc_res(zseg);
      if (sres <= 0.0 || zres <= 0.0 || sseg(0) <= 0.0 || zseg(0) <= 0.0) return false;
      Eigen::VectorXd sbar = sseg / std::sqrt(sres);
      Eigen::VectorXd zbar = zseg / std::sqrt(zres);
      double gamma = std::sqrt((1.0 + sbar.dot(zbar)) / 2.0);
      Eigen::VectorXd w(d);
      w(0) = (sbar(0) + zbar(0)) / (2.0 * gamma);
      w.tail(d - 1) = (sbar.tail(d - 1) - zbar.tail(d - 1)) / (2.0 * gamma);
      double beta = std::pow(sres / zres, 0.25);
      Eigen::MatrixXd W(d, d);
      W(0, 0) = w(0);
      W.block(0, 1, 1, d - 1) = w.tail(d - 1).transpose();
      W.block(1, 0, d - 1, 1) = w.tail(d - 1);
      W.block(1, 1, d - 1, d - 1) =
          Eigen::MatrixXd::Identity(d - 1, d - 1) +
          w.tail(d - 1) * w.tail(d - 1).transpose() / (1.0 + w(0));
      W *= beta;
      Eigen::MatrixXd H = W * W;
      soc_W.push_back(W);
      soc_Hinv.push_back(H.inverse());
      lambda.segment(blk.offset, d) = W.llt().solve(sseg);
    } else {
      const int d = blk.mat_dim;
      Eigen::MatrixXd S = svec_to_mat(sseg, d);
      Eigen::MatrixXd Z = svec_to_mat(zseg, d);
      Eigen::LLT<Eigen::MatrixXd> ls(S), lz(Z);
      if (ls.info() != Eigen::Success || lz.info() != Eigen::Success) return false;
      Eigen::MatrixXd Ls = ls.matrixL();
      Eigen::MatrixXd Lz = lz.matrixL();
      Eigen::JacobiSVD<Eigen::MatrixXd> svd(Lz.transpose() * Ls,
                                            Eigen::ComputeFullU | Eigen::ComputeFullV);
      Eigen::VectorXd sig = svd.singularValues();
      if (sig.minCoeff() <= 0.0) return false;
      Eigen::MatrixXd R =
          Ls * svd.matrixV() * sig.cwiseSqrt().cwiseInverse().asDiagonal();
      Eigen::MatrixXd Rinv =
          sig.cwiseSqrt().asDiagonal() * svd.matrixV().transpose() *
          Ls.triangularView<Eigen::Lower>().solve(Eigen::MatrixXd::Identity(d, d));
      psd_R.push_back(R);
      psd_Rinv.push_back(Rinv);
      // H^{-1} u = svec(Q mat(u) Q), Q = R^{-T} R^{-1}.
      Eigen::MatrixXd Q = Rinv.transpose() * Rinv;
      const int m = blk.dim;
      Eigen::MatrixXd Hinv(m, m);
      Eigen::VectorXd basis = Eigen::VectorXd::Zero(m);
      for (int k = 0; k < m; ++k) {
        basis(k) = 1.0;
        Hinv.col(k) = mat_to_svec(Q * svec_to_mat(basis, d) * Q);
        basis(k) = 0.0;
      }
      psd_Hinv.push_back(std::move(Hinv));
      Eigen::VectorXd lam(blk.dim);
      lam.setZero();
      int k = blk.offset, kk = 0;
      for (int j = 0; j < d; ++j)
        for (int i = j; i < d; ++i, ++kk) lambda(k + kk) = i == j ? sig(j) : 0.0;
    }
  }
  return true;
}

Eigen::VectorXd Scaling::apply_Hinv(const ConeSet& cones, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const int nn = cones.nn();
  out.head(nn) = u.head(nn).cwiseQuotient(nn_w.cwiseAbs2());
  int si = 0, pi = 0;
  for (const Block& blk : cones.blocks()) {
    auto seg = u.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC)
      out.segment(blk.offset, blk.dim) = soc_Hinv[si++] * seg;
    else
      out.segment(blk.offset, blk.dim) = psd_Hinv[pi++] * seg;
  }
  return out;
}

Eigen::VectorXd Scaling::apply_Wt(const ConeSet& cones, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const int nn = cones.nn();
  out.head(nn) = u.head(nn).cwiseProduct(nn_w);
  int si = 0, pi = 0;
  for (const Block& blk : cones.blocks()) {
    auto seg = u.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      out.segment(blk.offset, blk.dim) = soc_W[si++] * seg;  // W symmetric
    } else {
      const Eigen::MatrixXd& R = psd_R[pi++];
      out.segment(blk.offset, blk.dim) =
          mat_to_svec(R * svec_to_mat(seg, blk.mat_dim) * R.transpose());
    }
  }
  return out;
}

Eigen::VectorXd Scaling::apply_WinvT(const ConeSet& cones, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const int nn = cones.nn();
  out.head(nn) = u.head(nn).cwiseQuotient(nn_w);
  int si = 0, pi = 0;
  for (const Block& blk : cones.blocks()) {
    auto seg = u.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      out.segment(blk.offset, blk.dim) = soc_W[si++].llt().solve(seg);
    } else {
      const Eigen::MatrixXd& Rinv = psd_Rinv[pi++];
      out.segment(blk.offset, blk.dim) =
          mat_to_svec(Rinv * svec_to_mat(seg, blk.mat_dim) * Rinv.transpose());
    }
  }
  return out;
}

Eigen::VectorXd Scaling::apply_W(const ConeSet& cones, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const int nn = cones.nn();
  out.head(nn) = u.head(nn).cwiseProduct(nn_w);
  int si = 0, pi = 0;
  for (const Block& blk : cones.blocks()) {
    auto seg = u.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      out.segment(blk.offset, blk.dim) = soc_W[si++] * seg;
    } else {
      const Eigen::MatrixXd& R = psd_R[pi++];
      out.segment(blk.offset, blk.dim) =
          mat_to_svec(R.transpose() * svec_to_mat(seg, blk.mat_dim) * R);
    }
  }
  return out;
}

Eigen::VectorXd Scaling::apply_Winv(const ConeSet& cones, const Eigen::VectorXd& u) const {
  Eigen::VectorXd out(u.size());
  const int nn = cones.nn();
  out.head(nn) = u.head(nn).cwiseQuotient(nn_w);
  int si = 0, pi = 0;
  for (const Block& blk : cones.blocks()) {
    auto seg = u.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      out.segment(blk.offset, blk.dim) = soc_W[si++].llt().solve(seg);
    } else {
      const Eigen::MatrixXd& Rinv = psd_Rinv[pi++];
      out.segment(blk.offset, blk.dim) =
          mat_to_svec(Rinv.transpose() * svec_to_mat(seg, blk.mat_dim) * Rinv);
    }
  }
  return out;
}

// Jordan-algebra pieces used by the corrector.
Eigen::VectorXd jordan_product(const ConeSet& cones, const Eigen::VectorXd& a,
                               const Eigen::VectorXd& b) {
  Eigen::VectorXd out(a.size());
  const int nn = cones.nn();
  out.head(nn) = a.head(nn).cwiseProduct(b.head(nn));
  for (const Block& blk : cones.blocks()) {
    auto as = a.segment(blk.offset, blk.dim);
    auto bs = b.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      out(blk.offset) = as.dot(bs);
      out.segment(blk.offset + 1, blk.dim - 1) =
          as(0) * bs.tail(blk.dim - 1) + bs(0) * as.tail(blk.dim - 1);
    } else {
      Eigen::MatrixXd A = svec_to_mat(as, blk.mat_dim);
      Eigen::MatrixXd B = svec_to_mat(bs, blk.mat_dim);
      out.segment(blk.offset, blk.dim) = mat_to_svec(0.5 * (A * B + B * A));
    }
  }
  return out;
}

// Solves lambda o x = v.
Eigen::VectorXd jordan_solve(const ConeSet& cones, const Eigen::VectorXd& lambda,
                             const Eigen::VectorXd& v) {
  Eigen::VectorXd out(v.size());
  const int nn = cones.nn();
  out.head(nn) = v.head(nn).cwiseQuotient(lambda.head(nn));
  for (const Block& blk : cones.blocks()) {
    auto ls = lambda.segment(blk.offset, blk.dim);
    auto vs = v.segment(blk.offset, blk.dim);
    if (blk.kind == Block::SOC) {
      const int d = blk.dim;
      Eigen::MatrixXd arw(d, d);
      arw.setZero();
      arw(0, 0) = ls(0);
      arw.block(0, 1, 1, d - 1) = ls.tail(d - 1).transpose();
      arw.block(1, 0, d - 1, 1) = ls.tail(d - 1);
      arw.block(1, 1, d - 1, d - 1).diagonal().setConstant(ls(0));
      out.segment(blk.offset, d) = arw.fullPivLu().solve(vs);
    } else {
      // lambda is diagonal (sigma) in the scaled space.
      const int d = blk.mat_dim;
      Eigen::VectorXd sig(d);
      {
        int kk = 0;
        for (int j = 0; j < d; ++j)
          for (int i = j; i < d; ++i, ++kk)
            if (i == j) sig(j) = ls(kk);
      }
      Eigen::MatrixXd V = svec_to_mat(vs, d);
      Eigen::MatrixXd X(d, d);
      for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) X(i, j) = 2.0 * V(i, j) / (sig(i) + sig(j));
      out.segment(blk.offset, blk.dim) = mat_to_svec(X);
    }
  }
  return out;
}

// Reduced KKT solver:
//   [ G' H^-1 G + eps I   A' ] [ux]   [bx + G' H^-1 bz]
//   [ A                -eps I ] [uy] = [by]
// then uz = H^-1 (G ux - bz).
class KktSolver {
 public:
  KktSolver(const StandardForm& sf, const ConeSet& cones)
      : sf_(sf),
        cones_(cones),
        p_(static_cast<int>(sf.b.size())),
        m_(static_cast<int>(sf.h.size())),
        dim_(sf.n + static_cast<int>(sf.b.size()) + static_cast<int>(sf.h.size())),
        Grm_(sf.G) {
    // Dense view of each cone block's rows of G on their column support,
    // so the per-iteration W^-T G block transform is a small dense product.
    for (const Block& blk : cones.blocks()) {
      Local loc;
      std::vector<int> cols;
      for (int r = blk.offset; r < blk.offset + blk.dim; ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm_, r);
             it; ++it)
          cols.push_back(static_cast<int>(it.col()));
      std::sort(cols.begin(), cols.end());
      cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
      loc.cols = cols;
      loc.Gloc = Eigen::MatrixXd::Zero(blk.dim, static_cast<int>(cols.size()));
      for (int r = blk.offset; r < blk.offset + blk.dim; ++r)
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm_, r);
             it; ++it) {
          int lc = static_cast<int>(
              std::lower_bound(cols.begin(), cols.end(), it.col()) - cols.begin());
          loc.Gloc(r - blk.offset, lc) = it.value();
        }
      block_locals_.push_back(std::move(loc));
    }
  }

  bool factor(const Scaling& sc) {
    // Quasidefinite system in the scaled slack variable uz~ = W uz:
    //   [ eps I    A'    Gb'    ] [ux ]   [bx      ]
    //   [  A    -eps I    0     ] [uy ] = [by      ]
    //   [  Gb      0   -(1+eps)I] [uz~]   [W^-T bz ]
    // with Gb = W^-T G. Keeping the (3,3) block at -I instead of -W'W is
    // what preserves factorization accuracy once the scaling degenerates:
    // the ill-conditioning moves into Gb, where sparse LDLT pivoting
    // handles it far better than a diagonal block spanning 1e16.
    std::vector<Eigen::Triplet<double>> trips;
    const int n = sf_.n;
    const int zoff = n + p_;
    for (int k = 0; k < sf_.A.outerSize(); ++k)
      for (Eigen::SparseMatrix<double>::InnerIterator it(sf_.A, k); it; ++it) {
        trips.emplace_back(n + static_cast<int>(it.row()), static_cast<int>(it.col()),
                           it.value());
        trips.emplace_back(static_cast<int>(it.col()), n + static_cast<int>(it.row()),
                           it.value());
      }
    for (int r = 0; r < sf_.nn_dim; ++r) {
      double inv = 1.0 / sc.nn_w(r);
      for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(Grm_, r); it;
           ++it) {
        trips.emplace_back(zoff + r, static_cast<int>(it.col()), inv * it.value());
        trips.emplace_back(static_cast<int>(it.col()), zoff + r, inv * it.value());
      }
    }
    int si = 0, pi = 0, bi = 0;
    for (const Block& blk : cones_.blocks()) {
      const Local& loc = block_locals_[bi++];
      Eigen::MatrixXd Winvt;
      if (blk.kind == Block::SOC) {
        Winvt = sc.soc_W[si++].inverse();
      } else {
        const Eigen::MatrixXd& Rinv = sc.psd_Rinv[pi++];
        Winvt.resize(blk.dim, blk.dim);
        Eigen::VectorXd basis = Eigen::VectorXd::Zero(blk.dim);
        for (int k = 0; k < blk.dim; ++k) {
          basis(k) = 1.0;
          Winvt.col(k) =
              mat_to_svec(Rinv * svec_to_mat(basis, blk.mat_dim) * Rinv.transpose());
          basis(k) = 0.0;
        }
      }
      Eigen::MatrixXd Gbar = Winvt * loc.Gloc;
      for (int i = 0; i < blk.dim; ++i)
        for (size_t j = 0; j < loc.cols.size(); ++j) {
          trips.emplace_back(zoff + blk.offset + i, loc.cols[j], Gbar(i, j));
          trips.emplace_back(loc.cols[j], zoff + blk.offset + i, Gbar(i, j));
        }
    }
    for (int i = 0; i < n; ++i) trips.emplace_back(i, i, reg_);
    for (int i = n; i < zoff; ++i) trips.emplace_back(i, i, -reg_);
    for (int i = zoff; i < dim_; ++i) trips.emplace_back(i, i, -1.0 - reg_);
    Kreg_.resize(dim_, dim_);
    Kreg_.setFromTriplets(trips.begin(), trips.end());
    if (!analyzed_) {
      ldlt_.analyzePattern(Kreg_);
      analyzed_ = true;
    }
    ldlt_.factorize(Kreg_);
    return ldlt_.info() == Eigen::Success;
  }

  // Solves the 3x3 KKT system; returns (ux, uy, uz). The factorization is
  // regularized and works on the scaled slack, so each solve is refined
  // against the exact residuals in the original variables.
  void solve(const Scaling& sc, const Eigen::VectorXd& bx, const Eigen::VectorXd& by,
             const Eigen::VectorXd& bz, Eigen::VectorXd& ux, Eigen::VectorXd& uy,
             Eigen::VectorXd& uz) const {
    auto raw = [&](const Eigen::VectorXd& cx, const Eigen::VectorXd& cy,
                   const Eigen::VectorXd& cz, Eigen::VectorXd& vx, Eigen::VectorXd& vy,
                   Eigen::VectorXd& vz) {
      Eigen::VectorXd rhs(dim_);
      rhs.head(sf_.n) = cx;
      rhs.segment(sf_.n, p_) = cy;
      rhs.tail(m_) = sc.apply_WinvT(cones_, cz);
      Eigen::VectorXd u = ldlt_.solve(rhs);
      vx = u.head(sf_.n);
      vy = u.segment(sf_.n, p_);
      vz = sc.apply_Winv(cones_, u.tail(m_));
    };
    raw(bx, by, bz, ux, uy, uz);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < 8; ++it) {
      Eigen::VectorXd rx = bx - sf_.A.transpose() * uy - sf_.G.transpose() * uz;
      Eigen::VectorXd ry = by - sf_.A * ux;
      Eigen::VectorXd rz =
          bz - sf_.G * ux + sc.apply_Wt(cones_, sc.apply_W(cones_, uz));
      double err = std::max({rx.norm(), ry.norm(), rz.norm()});
      if (!(err < prev) || err < 1e-13) break;
      prev = err;
      Eigen::VectorXd dx, dy, dz;
      raw(rx, ry, rz, dx, dy, dz);
      ux += dx;
      uy += dy;
      uz += dz;
    }
  }

 private:
  struct Local {
    std::vector<int> cols;
    Eigen::MatrixXd Gloc;
  };

  const StandardForm& sf_;
  const ConeSet& cones_;
  int p_, m_, dim_;
  double reg_ = 1e-8;
  Eigen::SparseMatrix<double, Eigen::RowMajor> Grm_;
  std::vector<Local> block_locals_;
  Eigen::SparseMatrix<double> Kreg_;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt_;
  bool analyzed_ = false;
};

}  // namespace

SolveResult solve_ipm(const StandardForm& sf, const SolverOptions& opts) {
  const auto t0 = std::chrono::steady_clock::now();
  SolveResult res;
  auto finish = [&](SolverStatus st, const std::string& msg) {
    res.status = st;
    res.message = msg;
    res.solve_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return res;
  };

  const int n = sf.n;
  const int p = static_cast<int>(sf.b.size());
  const int m = sf.cone_rows();
  if (m == 0) return finish(SolverStatus::NumericalFailure, "no cone rows");

  ConeSet cones(sf);
  KktSolver kkt(sf, cones);
  const Eigen::VectorXd e = cones.identity();
  const double deg = cones.degree();

  // Initialization from two KKT solves with identity scaling.
  Scaling sc;
  sc.nn_w = Eigen::VectorXd::Ones(sf.nn_dim);
  for (int d : sf.soc_dims) {
    sc.soc_W.push_back(Eigen::MatrixXd::Identity(d, d));
    sc.soc_Hinv.push_back(Eigen::MatrixXd::Identity(d, d));
  }
  for (int d : sf.psd_dims) {
    sc.psd_R.push_back(Eigen::MatrixXd::Identity(d, d));
    sc.psd_Rinv.push_back(Eigen::MatrixXd::Identity(d, d));
    sc.psd_Hinv.push_back(Eigen::MatrixXd::Identity(svec_dim(d), svec_dim(d)));
  }
  if (!kkt.factor(sc))
    return finish(SolverStatus::NumericalFailure, "initial KKT factorization failed");

  Eigen::VectorXd x(n), y(p), z(m), s(m), tmp(n);
  {
    Eigen::VectorXd uy, uz, ux;
    kkt.solve(sc, Eigen::VectorXd::Zero(n), sf.b, -sf.h, x, uy, uz);
    s = -uz;
    double ts = cones.max_step(s);
    if (ts >= -1e-8) s += (1.0 + ts) * e;
    kkt.solve(sc, -sf.c, Eigen::VectorXd::Zero(p), Eigen::VectorXd::Zero(m), ux, y, z);
    double tz = cones.max_step(z);
    if (tz >= -1e-8) z += (1.0 + tz) * e;
  }

  const double bnorm = std::max(1.0, sf.b.norm());
  const double hnorm = std::max(1.0, sf.h.norm());
  const double cnorm = std::max(1.0, sf.c.norm());

  // Best iterate seen, by worst-of residual measures; late iterations can
  // degrade once the scaling gets ill-conditioned, and any breakdown then
  // falls back on this point.
  Eigen::VectorXd best_x;
  double best_score = std::numeric_limits<double>::infinity();
  double best_pcost = 0.0;
  auto finish_best = [&](const std::string& msg) {
    if (best_score <= 1e-2) {
      res.x.assign(best_x.data(), best_x.data() + n);
      res.objective = best_pcost + sf.obj_const;
      return finish(SolverStatus::NearOptimal, msg);
    }
    // With no decent iterate, a stall usually means divergence along a
    // certificate ray; accept a cruder certificate here than mid-course.
    double dual_level = -(sf.b.dot(y) + sf.h.dot(z));
    if (dual_level > 1e-6) {
      double cert = (sf.A.transpose() * y + sf.G.transpose() * z).norm() / dual_level;
      if (cert < 1e-4)
        return finish(SolverStatus::Infeasible, "primal infeasibility certificate");
    }
    double pcost = sf.c.dot(x);
    if (pcost < -1e-6 && (sf.G * x + s).norm() < -1e-4 * pcost &&
        (sf.A * x).norm() < -1e-4 * pcost)
      return finish(SolverStatus::Unbounded, "dual infeasibility certificate");
    return finish(SolverStatus::NumericalFailure, msg);
  };

  for (int iter = 0; iter < opts.max_iters; ++iter) {
    res.iterations = iter;
    Eigen::VectorXd rx = sf.c + sf.A.transpose() * y + sf.G.transpose() * z;
    Eigen::VectorXd ry = sf.A * x - sf.b;
    Eigen::VectorXd rz = sf.G * x + s - sf.h;
    double gap = s.dot(z);
    double pcost = sf.c.dot(x);
    double dcost = -sf.b.dot(y) - sf.h.dot(z);
    double pres = std::max(ry.norm() / bnorm, rz.norm() / hnorm);
    double dres = rx.norm() / cnorm;
    double relgap = std::abs(pcost - dcost) /
                    std::max({1.0, std::abs(pcost), std::abs(dcost)});
    if (opts.verbose) {
      std::ostringstream os;
      os << "ipm iter " << iter << " pcost " << pcost << " gap " << gap << " pres "
         << pres << " dres " << dres;
      res.message = os.str();
      std::fputs((res.message + "\n").c_str(), stderr);
    }
    double score = std::max({pres, dres, relgap});
    if (score < best_score) {
      best_score = score;
      best_x = x;
      best_pcost = pcost;
    }
    if (pres <= opts.feas_tol && dres <= opts.feas_tol && relgap <= opts.rel_gap_tol) {
      res.x.assign(x.data(), x.data() + n);
      res.objective = pcost + sf.obj_const;
      return finish(SolverStatus::Optimal, "converged");
    }
    // Certificate checks on the raw iterates: (y, z) with b'y + h'z < 0 and
    // A'y + G'z ~ 0 proves primal infeasibility; x with Ax ~ 0, Gx + s ~ 0
    // and c'x < 0 proves unboundedness. Both are scale-normalized.
    double dual_level = -(sf.b.dot(y) + sf.h.dot(z));
    if (dual_level > 1e-8 && pres > opts.feas_tol) {
      double cert = (sf.A.transpose() * y + sf.G.transpose() * z).norm() / dual_level;
      if (cert < 1e-6)
        return finish(SolverStatus::Infeasible, "primal infeasibility certificate");
    }
    if (pcost < -1e-8) {
      double cert = (sf.G * x + s).norm() / (-pcost);
      double certa = (sf.A * x).norm() / (-pcost);
      if (cert < 1e-6 && certa < 1e-6)
        return finish(SolverStatus::Unbounded, "dual infeasibility certificate");
    }

    if (!sc.compute(cones, s, z)) return finish_best("scaling breakdown");
    if (!kkt.factor(sc)) return finish_best("KKT factorization failed");

    // Affine (predictor) direction.
    Eigen::VectorXd dxa, dya, dza;
    kkt.solve(sc, -rx, -ry, -rz + s, dxa, dya, dza);
    Eigen::VectorXd dsa = -rz - sf.G * dxa;
    double alpha_a =
        std::min({1.0, cones.step_length(s, dsa), cones.step_length(z, dza)});
    double gap_a = (s + alpha_a * dsa).dot(z + alpha_a * dza);
    double sigma = std::pow(std::clamp(gap_a / gap, 0.0, 1.0), 3.0);

    // Combined (corrector) direction.
    double mu = gap / deg;
    Eigen::VectorXd corr = jordan_product(cones, sc.apply_WinvT(cones, dsa),
                                          sc.apply_W(cones, dza));
    Eigen::VectorXd dvec = jordan_solve(
        cones, sc.lambda,
        sigma * mu * e - jordan_product(cones, sc.lambda, sc.lambda) - corr);
    Eigen::VectorXd bz = -rz - sc.apply_Wt(cones, dvec);
    Eigen::VectorXd dx, dy, dz;
    kkt.solve(sc, -rx, -ry, bz, dx, dy, dz);
    Eigen::VectorXd ds = -rz - sf.G * dx;

    double alpha =
        std::min(1.0, 0.99 * std::min(cones.step_length(s, ds), cones.step_length(z, dz)));
    if (alpha < 0.1 * alpha_a) {
      // The second-order correction term blows up when a block sits near the
      // cone boundary; drop it and take a plain centering step instead.
      dvec = jordan_solve(cones, sc.lambda,
                          sigma * mu * e - jordan_product(cones, sc.lambda, sc.lambda));
      bz = -rz - sc.apply_Wt(cones, dvec);
      kkt.solve(sc, -rx, -ry, bz, dx, dy, dz);
      ds = -rz - sf.G * dx;
      alpha = std::min(
          1.0, 0.99 * std::min(cones.step_length(s, ds), cones.step_length(z, dz)));
    }
    if (opts.verbose)
      std::fprintf(stderr, "    alpha_a %.2e alpha %.2e sigma %.2e\n", alpha_a, alpha,
                   sigma);
    if (!std::isfinite(alpha) || alpha <= 1e-12) return finish_best("step length collapsed");
    x += alpha * dx;
    y += alpha * dy;
    s += alpha * ds;
    z += alpha * dz;
  }

  // Out of iterations: accept the best iterate when its residuals are small.
  return finish_best("iteration limit reached");
}

}  // namespace ucr::conic
