#include "rdot/codec.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>

#include "rdot/error.hpp"
#include "rdot/parallel.hpp"

namespace rdot {

int64_t eg0_bits(uint64_t value) { return 2 * (std::bit_width(value + 1) - 1) + 1; }

namespace {

template <typename Index>
int64_t run_level_bits_impl(std::span<const int32_t> levels, Index at) {
  int64_t bits = 0;
  uint64_t run = 0;
  for (size_t k = 0; k < levels.size(); ++k) {
    const int32_t v = levels[at(k)];
    if (v == 0) {
      ++run;
      continue;
    }
    const uint64_t mag = v < 0 ? uint64_t(-int64_t(v)) : uint64_t(v);
    bits += eg0_bits(run) + eg0_bits(mag - 1) + 1;
    run = 0;
  }
  return bits + eg0_bits(run);
}

}  // namespace

int64_t run_level_bits(std::span<const int32_t> levels) {
  return run_level_bits_impl(levels, [](size_t k) { return k; });
}

int64_t entropy_bits(std::span<const int32_t> levels, const ScanOrder& scan) {
  if (scan.perm.size() != levels.size() || !scan.is_permutation()) {
    throw Error(ErrorCode::kInvalidParams, "scan does not cover the level vector");
  }
  return run_level_bits_impl(levels, [&scan](size_t k) { return size_t(scan.perm[k]); });
}

BlockCode encode_block(const Mat& x, std::span<const TransformSpec> specs, int signal_bits,
                       const QuantConfig& q) {
  if (specs.empty()) throw Error(ErrorCode::kEmptyInput, "no transform specs to choose from");
  BlockCode best;
  double best_cost = 0.0;
  for (size_t s = 0; s < specs.size(); ++s) {
    std::vector<int32_t> levels = quantize(forward(x, specs[s]), q);
    const int64_t coeff_bits = run_level_bits(levels);
    const Mat xr = inverse(dequantize(levels, q), specs[s]);
    double sse = 0.0;
    for (int i = 0; i < x.rows(); ++i)
      for (int j = 0; j < x.cols(); ++j) {
        const double d = x(i, j) - xr(i, j);
        sse += d * d;
      }
    const double cost = sse + q.lambda * double(coeff_bits + signal_bits);
    if (s == 0 || cost < best_cost) {
      best_cost = cost;
      best.chosen_slot = int(s);
      best.levels = std::move(levels);
      best.signal_bits = signal_bits;
      best.coeff_bits = coeff_bits;
      best.distortion = sse;
    }
  }
  return best;
}

BlockCode encode_block(const Mat& x, const TransformBank& bank, const QuantConfig& q) {
  return encode_block(x, std::span<const TransformSpec>(bank.specs), 3, q);
}

std::vector<TransformSpec> baseline_specs(int n) {
  std::vector<TransformSpec> specs(2);
  specs[0] = TransformSpec{dct_primary(n), diagonal_scan(n), std::nullopt, 0};
  specs[1] = TransformSpec{adst_primary(n), diagonal_scan(n), std::nullopt, 0};
  return specs;
}

std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, std::span<const TransformSpec> specs,
                              int signal_bits, std::span<const int> qps) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "no blocks to evaluate");
  const int nb = blocks.front().rows();
  const int64_t m = int64_t(blocks.size());
  std::vector<RDPoint> points;
  points.reserve(qps.size());
  std::vector<int64_t> bits(blocks.size());
  std::vector<double> sse(blocks.size());
  for (int qp : qps) {
    const QuantConfig q = QuantConfig::from_qp(qp);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
    for (int64_t b = 0; b < m; ++b) {
      const BlockCode code = encode_block(blocks[size_t(b)], specs, signal_bits, q);
      bits[size_t(b)] = code.coeff_bits + code.signal_bits;
      sse[size_t(b)] = code.distortion;
    }
    int64_t total_bits = 0;
    double total_sse = 0.0;
    for (size_t b = 0; b < blocks.size(); ++b) {
      total_bits += bits[b];
      total_sse += sse[b];
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

std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, const TransformBank& bank,
                              std::span<const int> qps) {
  return evaluate(blocks, std::span<const TransformSpec>(bank.specs), 3, qps);
}

std::vector<RDPoint> evaluate_baseline(const std::vector<Mat>& blocks, std::span<const int> qps) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "no blocks to evaluate");
  const std::vector<TransformSpec> specs = baseline_specs(blocks.front().rows());
  return evaluate(blocks, specs, 1, qps);
}

namespace {

// Least-squares cubic fit of log10(bits) against PSNR, in coordinates
// centered and scaled to the fitted curve's own PSNR range.
struct CubicFit {
  double center = 0.0;
  double scale = 1.0;
  std::array<double, 4> coeff{};

  double integral(double lo, double hi) const {
    // antiderivative of sum_k coeff[k] * u^k with u = (x - center)/scale
    const auto anti = [&](double x) {
      const double u = (x - center) / scale;
      double s = 0.0;
      for (int k = 3; k >= 0; --k) s = s * u + coeff[size_t(k)] / double(k + 1);
      return s * u * scale;
    };
    return anti(hi) - anti(lo);
  }
};

CubicFit fit_log_rate(std::span<const RDPoint> points) {
  double lo = points[0].psnr, hi = points[0].psnr;
  for (const RDPoint& p : points) {
    lo = std::min(lo, p.psnr);
    hi = std::max(hi, p.psnr);
  }
  CubicFit fit;
  fit.center = 0.5 * (lo + hi);
  fit.scale = hi > lo ? 0.5 * (hi - lo) : 1.0;

  std::array<std::array<double, 5>, 4> m{};  // normal equations, augmented
  for (const RDPoint& p : points) {
    if (!(p.bits_per_block > 0.0)) {
      throw Error(ErrorCode::kInvalidParams, "RD point with non-positive bitrate");
    }
    const double u = (p.psnr - fit.center) / fit.scale;
    const double y = std::log10(p.bits_per_block);
    std::array<double, 4> basis{1.0, u, u * u, u * u * u};
    for (int r = 0; r < 4; ++r) {
      for (int c = 0; c < 4; ++c) m[size_t(r)][size_t(c)] += basis[size_t(r)] * basis[size_t(c)];
      m[size_t(r)][4] += basis[size_t(r)] * y;
    }
  }

  for (int col = 0; col < 4; ++col) {  // Gaussian elimination, partial pivoting
    int pivot = col;
    for (int r = col + 1; r < 4; ++r) {
      if (std::abs(m[size_t(r)][size_t(col)]) > std::abs(m[size_t(pivot)][size_t(col)])) pivot = r;
    }
    if (std::abs(m[size_t(pivot)][size_t(col)]) < 1e-12) {
      throw Error(ErrorCode::kInvalidParams, "degenerate RD curve (coincident PSNR values)");
    }
    std::swap(m[size_t(col)], m[size_t(pivot)]);
    for (int r = col + 1; r < 4; ++r) {
      const double f = m[size_t(r)][size_t(col)] / m[size_t(col)][size_t(col)];
      for (int c = col; c < 5; ++c) m[size_t(r)][size_t(c)] -= f * m[size_t(col)][size_t(c)];
    }
  }
  for (int r = 3; r >= 0; --r) {
    double s = m[size_t(r)][4];
    for (int c = r + 1; c < 4; ++c) s -= m[size_t(r)][size_t(c)] * fit.coeff[size_t(c)];
    fit.coeff[size_t(r)] = s / m[size_t(r)][size_t(r)];
  }
  return fit;
}

}  // namespace

BDRateResult bd_rate(std::span<const RDPoint> reference, std::span<const RDPoint> test) {
  if (reference.size() < 4 || test.size() < 4) {
    throw Error(ErrorCode::kInvalidParams, "BD-rate needs at least 4 RD points per curve");
  }
  const auto psnr_range = [](std::span<const RDPoint> pts) {
    double lo = pts[0].psnr, hi = pts[0].psnr;
    for (const RDPoint& p : pts) {
      lo = std::min(lo, p.psnr);
      hi = std::max(hi, p.psnr);
    }
    return std::pair<double, double>(lo, hi);
  };
  const auto [ref_lo, ref_hi] = psnr_range(reference);
  const auto [test_lo, test_hi] = psnr_range(test);
  const double lo = std::max(ref_lo, test_lo);
  const double hi = std::min(ref_hi, test_hi);
  if (!(hi > lo)) {
    throw Error(ErrorCode::kNoOverlap, "RD curves do not overlap in PSNR");
  }
  const CubicFit ref_fit = fit_log_rate(reference);
  const CubicFit test_fit = fit_log_rate(test);
  const double avg_diff = (test_fit.integral(lo, hi) - ref_fit.integral(lo, hi)) / (hi - lo);
  BDRateResult r;
  r.percent = (std::pow(10.0, avg_diff) - 1.0) * 100.0;
  r.psnr_low = lo;
  r.psnr_high = hi;
  return r;
}

}  // namespace rdot
