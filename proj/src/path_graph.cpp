#include "rdot/path_graph.hpp"

#include <cmath>

#include "kernels.hpp"
#include "rdot/error.hpp"
#include "rdot/parallel.hpp"

namespace rdot {

using detail::params_from_stats;

namespace {

void check_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw Error(ErrorCode::kInvalidBeta, "beta must be a positive finite number");
  }
}

}  // namespace

PathGraphParams learn_path_graph(const std::vector<std::vector<double>>& samples, double beta) {
  check_beta(beta);
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "learn_path_graph requires at least one sample");
  }
  const int n = int(samples.front().size());
  if (n < 2) {
    throw Error(ErrorCode::kDimensionMismatch, "samples must have length >= 2");
  }
  for (const auto& s : samples) {
    if (int(s.size()) != n) {
      throw Error(ErrorCode::kDimensionMismatch, "samples must all have the same length");
    }
  }

  const double inv_p = 1.0 / double(samples.size());
  std::vector<double> edge_mean_sq(size_t(n) - 1, 0.0);
  // Each edge accumulator sums over samples in their given order, so the
  // split across threads cannot change the result.
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int i = 0; i < n - 1; ++i) {
    double s = 0.0;
    for (const auto& x : samples) {
      const double d = x[i] - x[i + 1];
      s += d * d;
    }
    edge_mean_sq[i] = s * inv_p;
  }

  double node1 = 0.0;
  double energy = 0.0;
  for (const auto& x : samples) {
    node1 += x[0] * x[0];
    for (double v : x) energy += v * v;
  }
  return params_from_stats(n, edge_mean_sq, node1 * inv_p, energy, beta);
}

Mat laplacian(const PathGraphParams& g) {
  const int n = g.n_nodes;
  Mat l(n, n);
  for (int i = 0; i < n - 1; ++i) {
    const double w = g.edge_weights[i];
    l(i, i) += w;
    l(i + 1, i + 1) += w;
    l(i, i + 1) = -w;
    l(i + 1, i) = -w;
  }
  l(0, 0) += g.self_loop;
  return l;
}

Mat gbt(const PathGraphParams& g) { return sym_eig(laplacian(g)).vectors; }

Mat dct_basis(int n) {
  PathGraphParams g{n, std::vector<double>(size_t(n) - 1, 1.0), 0.0};
  return gbt(g);
}

Mat adst_basis(int n) {
  PathGraphParams g{n, std::vector<double>(size_t(n) - 1, 1.0), 1.0};
  return gbt(g);
}

std::pair<Mat, Mat> learn_spgt(const std::vector<Mat>& blocks, double beta) {
  check_beta(beta);
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "learn_spgt requires at least one block");
  }
  const int n = blocks.front().rows();
  if (n < 2 || blocks.front().cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "blocks must be square with size >= 2");
  }
  for (const Mat& b : blocks) {
    if (b.rows() != n || b.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "blocks must all have the same size");
    }
  }

  // Each block contributes its N columns as column samples and its N rows
  // as row samples; per-edge sums run over blocks in order.
  const double inv_p = 1.0 / (double(blocks.size()) * n);
  std::vector<double> col_edge(size_t(n) - 1, 0.0), row_edge(size_t(n) - 1, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int i = 0; i < n - 1; ++i) {
    double sc = 0.0, sr = 0.0;
    for (const Mat& b : blocks) {
      for (int k = 0; k < n; ++k) {
        const double dc = b(i, k) - b(i + 1, k);
        const double dr = b(k, i) - b(k, i + 1);
        sc += dc * dc;
        sr += dr * dr;
      }
    }
    col_edge[i] = sc * inv_p;
    row_edge[i] = sr * inv_p;
  }

  double col_node1 = 0.0, row_node1 = 0.0, energy = 0.0;
  for (const Mat& b : blocks) {
    for (int k = 0; k < n; ++k) {
      col_node1 += b(0, k) * b(0, k);
      row_node1 += b(k, 0) * b(k, 0);
    }
    for (double v : b.data()) energy += v * v;
  }

  const PathGraphParams col_g = params_from_stats(n, col_edge, col_node1 * inv_p, energy, beta);
  const PathGraphParams row_g = params_from_stats(n, row_edge, row_node1 * inv_p, energy, beta);
  return {gbt(col_g), gbt(row_g)};
}

}  // namespace rdot
