#ifndef RDOT_CODEC_HPP
#define RDOT_CODEC_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rdot/mat.hpp"
#include "rdot/trainer.hpp"
#include "rdot/transform.hpp"

namespace rdot {

/// Order-0 exp-Golomb code length: 2*floor(log2(v + 1)) + 1 bits.
int64_t eg0_bits(uint64_t value);

/// Run-level rate model over levels already in transmission order: per
/// nonzero, EG0(preceding zero run) + EG0(|level| - 1) + one sign bit; the
/// block ends with EG0(count of trailing zeros). An all-zero vector of
/// length L therefore costs EG0(L) bits.
int64_t run_level_bits(std::span<const int32_t> levels);

/// Same model for levels held in natural coefficient order: positions are
/// visited through the scan permutation first.
int64_t entropy_bits(std::span<const int32_t> levels, const ScanOrder& scan);

/// Outcome of coding one block: the winning slot, its quantized levels (in
/// transmission order), the bit split, and the reconstruction SSE.
struct BlockCode {
  int chosen_slot = 0;
  std::vector<int32_t> levels;
  int signal_bits = 0;
  int64_t coeff_bits = 0;
  double distortion = 0.0;
};

/// Exhaustive per-block RDO: every spec is coded and the one minimizing
/// SSE + lambda * (coeff_bits + signal_bits) wins; ties break toward the
/// lowest slot index.
BlockCode encode_block(const Mat& x, std::span<const TransformSpec> specs, int signal_bits,
                       const QuantConfig& q);

/// Six-slot bank RDO; charges the 3 signaling bits (2 for the primary, 1
/// for the secondary flag).
BlockCode encode_block(const Mat& x, const TransformBank& bank, const QuantConfig& q);

/// The two-transform anchor: DCT and ADST with the fixed diagonal scan and
/// no secondary; coded with 1 signaling bit.
std::vector<TransformSpec> baseline_specs(int n);

struct RDPoint {
  int qp = 0;
  double bits_per_block = 0.0;
  double psnr = 0.0;  // 10*log10(255^2 * N^2 / average SSE)
  double sse = 0.0;   // average per-block SSE
};

/// One RDPoint per QP: per-block coding is parallel, the bit/SSE sums fold
/// in block order.
std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, std::span<const TransformSpec> specs,
                              int signal_bits, std::span<const int> qps);
std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, const TransformBank& bank,
                              std::span<const int> qps);
std::vector<RDPoint> evaluate_baseline(const std::vector<Mat>& blocks, std::span<const int> qps);

struct BDRateResult {
  double percent = 0.0;  // negative = test cheaper than reference
  double psnr_low = 0.0;
  double psnr_high = 0.0;
};

/// Bjontegaard delta-rate: cubic least-squares fits of log10(bits) vs PSNR
/// for both curves, integrated over the overlapping PSNR interval;
/// percent = (10^(average log-rate difference) - 1) * 100.
BDRateResult bd_rate(std::span<const RDPoint> reference, std::span<const RDPoint> test);

}  // namespace rdot

#endif  // RDOT_CODEC_HPP
