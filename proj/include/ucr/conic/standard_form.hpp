#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ucr/conic/program.hpp"

namespace ucr::conic {

// Slack-based standard form shared by both backends:
//   minimize    c.x + obj_const
//   subject to  A x = b,   G x + s = h,   s in K
// with K ordered as: nonnegative orthant (first nn_dim rows of s), then
// second-order cones (soc_dims), then PSD blocks in scaled-vector (svec)
// coordinates (psd_dims are matrix side lengths).
//
// Rotated quadratic cones are rewritten as plain second-order cones and PSD
// entries carry the sqrt(2) off-diagonal svec scaling.
struct StandardForm {
  int n = 0;
  Eigen::VectorXd c;
  double obj_const = 0.0;
  Eigen::SparseMatrix<double> A;
  Eigen::VectorXd b;
  Eigen::SparseMatrix<double> G;
  Eigen::VectorXd h;
  int nn_dim = 0;
  std::vector<int> soc_dims;
  std::vector<int> psd_dims;

  int cone_rows() const { return static_cast<int>(h.size()); }
  // Barrier degree: nn_dim + #soc + sum(psd side lengths).
  int degree() const;
  int max_psd_dim() const;
};

StandardForm to_standard_form(const ConicProgram& prog);

inline int svec_dim(int d) { return d * (d + 1) / 2; }

// svec packing: lower triangle column-major with off-diagonal * sqrt(2).
Eigen::MatrixXd svec_to_mat(const Eigen::Ref<const Eigen::VectorXd>& v, int d);
Eigen::VectorXd mat_to_svec(const Eigen::Ref<const Eigen::MatrixXd>& m);

}  // namespace ucr::conic
