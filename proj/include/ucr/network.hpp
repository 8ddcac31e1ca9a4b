#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include "ucr/types.hpp"

namespace ucr {

// Hermitian matrix stored as a real diagonal plus upper-triangular entries
// keyed by (i, j) with i < j. This is the representation shared by the lifted
// W variables and the penalty-matrix trace.
struct SparseHermitian {
  int n = 0;
  Eigen::VectorXd diag;
  std::vector<std::tuple<int, int, Complex>> upper;  // (i, j, H_ij), i < j

  static SparseHermitian outer(const Eigen::VectorXcd& v,
                               const std::vector<std::pair<int, int>>& pairs);
};

struct NetworkMatrices {
  Eigen::SparseMatrix<double> C;       // |G| x |V| generator incidence
  Eigen::SparseMatrix<double> C_from;  // |E| x |V|
  Eigen::SparseMatrix<double> C_to;    // |E| x |V|
  Eigen::SparseMatrix<Complex> Y;      // |V| x |V| nodal admittance
  Eigen::SparseMatrix<Complex> Y_from; // |E| x |V|
  Eigen::SparseMatrix<Complex> Y_to;   // |E| x |V|

  // Distinct branch endpoint pairs, canonically ordered i < j.
  std::vector<std::pair<int, int>> edge_pairs;
  // Branch index -> index into edge_pairs.
  std::vector<int> branch_pair;
  // True when the branch runs j -> i relative to its canonical pair.
  std::vector<bool> branch_reversed;
};

NetworkMatrices build_matrices(const PowerNetwork& net);

// +1 for an inductive series admittance (b_srs <= 0), -1 otherwise.
int zeta_sign(const Branch& branch);

struct PenaltyMatrix {
  double eta = 0.5;
  double alpha = 1.0;
  Eigen::SparseMatrix<Complex> M;                // |V| x |V| Hermitian
  std::vector<Eigen::Matrix2cd> line_blocks;     // M_ij + alpha*I per branch
  std::vector<int> zeta;                         // per branch

  double trace_with(const SparseHermitian& W) const;
  // v^* M v for a complex voltage vector.
  double quad_form(const Eigen::VectorXcd& v) const;
  // M v, used for the penalty's linear terms.
  Eigen::VectorXcd apply(const Eigen::VectorXcd& v) const;
};

PenaltyMatrix build_penalty_matrix(const PowerNetwork& net, double eta, double alpha);

}  // namespace ucr
