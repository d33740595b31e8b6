#ifndef RDOT_PATH_GRAPH_HPP
#define RDOT_PATH_GRAPH_HPP

#include <utility>
#include <vector>

#include "rdot/mat.hpp"

namespace rdot {

/// Path graph over N nodes with an optional self-loop at node 1 (index 0).
/// Unit edge weights with no self-loop give the DCT; adding a unit
/// self-loop gives the ADST.
struct PathGraphParams {
  int n_nodes = 0;
  std::vector<double> edge_weights;  // w[i] joins nodes i and i+1; each > 0
  double self_loop = 0.0;            // alpha >= 0 at node 1
};

/// Closed-form path-graph learning from vector samples:
///   w_i   = [ mean_p (x_p(i) - x_p(i+1))^2 + beta ]^-1
///   alpha = [ mean_p x_p(1)^2 ]^-1
/// Degenerate cases: alpha falls back to 0 when the mean square at node 1
/// is below 1e-12 (flat data carries no DC-anchoring evidence), weights are
/// clamped to [1e-8, 1e8], and all-zero data yields the unit-weight path
/// (i.e. the DCT) as a safe default.
///
/// Per-edge sums accumulate over samples in their given order, so the
/// result is independent of thread count.
PathGraphParams learn_path_graph(const std::vector<std::vector<double>>& samples, double beta);

/// Generalized Laplacian: degree minus adjacency, with the self-loop weight
/// added to entry (0,0).
Mat laplacian(const PathGraphParams& g);

/// Graph-based transform: columns are the eigenvectors of laplacian(g) in
/// ascending-eigenvalue order, sign-fixed per the linalg convention.
Mat gbt(const PathGraphParams& g);

/// DCT-II basis, realized as the GBT of the unit-weight path.
Mat dct_basis(int n);

/// ADST basis: GBT of the unit-weight path with a unit self-loop at node 1.
Mat adst_basis(int n);

/// Learns one path graph from the columns of all blocks and one from the
/// rows (each block contributes N column-vectors and N row-vectors), and
/// returns (column transform, row transform).
std::pair<Mat, Mat> learn_spgt(const std::vector<Mat>& blocks, double beta);

}  // namespace rdot

#endif  // RDOT_PATH_GRAPH_HPP
