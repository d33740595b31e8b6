#include "rdot/reference.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "kernels.hpp"
#include "rdot/error.hpp"

namespace rdot::ref {

CovEstimate sample_covariance(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) {
    throw Error(ErrorCode::kEmptyInput, "sample_covariance requires at least one sample");
  }
  const int d = int(vectors.front().size());
  const double inv_p = 1.0 / double(vectors.size());
  Mat s(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = i; j < d; ++j) {
      double acc = 0.0;
      for (const auto& v : vectors) acc += v[size_t(i)] * v[size_t(j)];
      s(i, j) = acc * inv_p;
      s(j, i) = s(i, j);
    }
  }
  return CovEstimate{d, std::move(s), vectors.size()};
}

std::pair<Mat, Mat> separable_klt(const std::vector<Mat>& blocks) {
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "separable_klt requires at least one block");
  }
  const int n = blocks.front().rows();
  const double inv_p = 1.0 / (double(blocks.size()) * n);
  Mat s_col(n, n), s_row(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) {
      double ac = 0.0, ar = 0.0;
      for (const Mat& b : blocks) {
        for (int k = 0; k < n; ++k) {
          ac += b(i, k) * b(j, k);
          ar += b(k, i) * b(k, j);
        }
      }
      s_col(i, j) = ac * inv_p;
      s_col(j, i) = s_col(i, j);
      s_row(i, j) = ar * inv_p;
      s_row(j, i) = s_row(i, j);
    }
  }
  return {descending_eigvecs(s_col), descending_eigvecs(s_row)};
}

PathGraphParams learn_path_graph(const std::vector<std::vector<double>>& samples, double beta) {
  if (samples.empty()) {
    throw Error(ErrorCode::kEmptyInput, "learn_path_graph requires at least one sample");
  }
  const int n = int(samples.front().size());
  const double inv_p = 1.0 / double(samples.size());
  std::vector<double> edge_mean_sq(size_t(n) - 1, 0.0);
  for (int i = 0; i < n - 1; ++i) {
    double s = 0.0;
    for (const auto& x : samples) {
      const double d = x[size_t(i)] - x[size_t(i) + 1];
      s += d * d;
    }
    edge_mean_sq[size_t(i)] = s * inv_p;
  }
  double node1 = 0.0;
  double energy = 0.0;
  for (const auto& x : samples) {
    node1 += x[0] * x[0];
    for (double v : x) energy += v * v;
  }
  return detail::params_from_stats(n, edge_mean_sq, node1 * inv_p, energy, beta);
}

std::pair<Mat, Mat> learn_spgt(const std::vector<Mat>& blocks, double beta) {
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "learn_spgt requires at least one block");
  }
  const int n = blocks.front().rows();
  const double inv_p = 1.0 / (double(blocks.size()) * n);
  std::vector<double> col_edge(size_t(n) - 1, 0.0), row_edge(size_t(n) - 1, 0.0);
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
    col_edge[size_t(i)] = sc * inv_p;
    row_edge[size_t(i)] = sr * inv_p;
  }
  double col_node1 = 0.0, row_node1 = 0.0, energy = 0.0;
  for (const Mat& b : blocks) {
    for (int k = 0; k < n; ++k) {
      col_node1 += b(0, k) * b(0, k);
      row_node1 += b(k, 0) * b(k, 0);
    }
    for (double v : b.data()) energy += v * v;
  }
  const PathGraphParams col_g =
      detail::params_from_stats(n, col_edge, col_node1 * inv_p, energy, beta);
  const PathGraphParams row_g =
      detail::params_from_stats(n, row_edge, row_node1 * inv_p, energy, beta);
  return {gbt(col_g), gbt(row_g)};
}

ScanOrder scan_order_from_variance(const std::vector<Mat>& blocks, const PrimaryKind& primary) {
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "scan_order_from_variance requires blocks");
  }
  const int n = blocks.front().rows();
  const size_t nn = size_t(n) * n;
  const int64_t m = int64_t(blocks.size());

  std::vector<double> coeffs(size_t(m) * nn);
  for (int64_t b = 0; b < m; ++b) {
    const Mat xh = apply_primary(blocks[size_t(b)], primary);
    double* dst = coeffs.data() + size_t(b) * nn;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) dst[size_t(j) * n + i] = xh(i, j);
  }
  std::vector<double> variance(nn, 0.0);
  for (int64_t p = 0; p < int64_t(nn); ++p) {
    double s = 0.0;
    for (int64_t b = 0; b < m; ++b) {
      const double v = coeffs[size_t(b) * nn + size_t(p)];
      s += v * v;
    }
    variance[size_t(p)] = s / double(m);
  }
  ScanOrder scan;
  scan.perm.resize(nn);
  std::iota(scan.perm.begin(), scan.perm.end(), 0u);
  std::stable_sort(scan.perm.begin(), scan.perm.end(),
                   [&](uint32_t a, uint32_t b) { return variance[a] > variance[b]; });
  return scan;
}

ClusterAssign assign_clusters(const std::vector<Mat>& blocks, const TransformBank& bank,
                              const QuantConfig& q) {
  ClusterAssign out;
  out.assignment.resize(blocks.size());
  for (size_t b = 0; b < blocks.size(); ++b) {
    int best = 0;
    double best_cost = rd_cost(blocks[b], bank.specs[0], q).cost;
    for (int s = 1; s < kNumSlots; ++s) {
      const double c = rd_cost(blocks[b], bank.specs[size_t(s)], q).cost;
      if (c < best_cost) {
        best_cost = c;
        best = s;
      }
    }
    out.assignment[b] = best;
  }
  return out;
}

double rd_total(const std::vector<Mat>& blocks, const TransformBank& bank,
                const ClusterAssign& assign, const QuantConfig& q) {
  double total = 0.0;
  for (size_t b = 0; b < blocks.size(); ++b) {
    total += rd_cost(blocks[b], bank.specs[size_t(assign.assignment[b])], q).cost;
  }
  return total;
}

ResidualDataset synth_residuals(ModeLabel mode, int count, int block_size,
                                const SynthParams& params, uint64_t seed) {
  const Mat chol_main = detail::chol_psd(detail::synth_covariance(params.main, block_size));
  Mat chol_second;
  if (params.second) {
    chol_second = detail::chol_psd(detail::synth_covariance(*params.second, block_size));
  }
  const Mat* second = params.second ? &chol_second : nullptr;

  ResidualDataset ds;
  ds.block_size = block_size;
  ds.mode = mode;
  ds.blocks.resize(size_t(count));
  for (int64_t b = 0; b < int64_t(count); ++b) {
    ds.blocks[size_t(b)] =
        detail::synth_block(chol_main, second, params.weight, seed, uint64_t(b), block_size);
  }
  char buf[128];
  std::snprintf(buf, sizeof buf, "SYNTH(mode=%s, M=%d, N=%d, seed=%llu)",
                std::string(mode_name(mode)).c_str(), count, block_size,
                static_cast<unsigned long long>(seed));
  ds.source = buf;
  return ds;
}

std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, std::span<const TransformSpec> specs,
                              int signal_bits, std::span<const int> qps) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "no blocks to evaluate");
  const int nb = blocks.front().rows();
  const int64_t m = int64_t(blocks.size());
  std::vector<RDPoint> points;
  points.reserve(qps.size());
  for (int qp : qps) {
    const QuantConfig q = QuantConfig::from_qp(qp);
    int64_t total_bits = 0;
    double total_sse = 0.0;
    for (int64_t b = 0; b < m; ++b) {
      const BlockCode code = encode_block(blocks[size_t(b)], specs, signal_bits, q);
      total_bits += code.coeff_bits + code.signal_bits;
      total_sse += code.distortion;
    }
    RDPoint p;
    p.qp = qp;
    p.bits_per_block = double(total_bits) / double(m);
    p.sse = total_sse / double(m);
    p.psnr = 10.0 * std::log10(255.0 * 255.0 * double(nb) * double(nb) /
                               std::max(p.sse, 1e-12));
    points.push_back(p);
  }
  return points;
}

}  // namespace rdot::ref
