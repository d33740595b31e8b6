#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "rdot/codec.hpp"
#include "rdot/dataset.hpp"
#include "rdot/error.hpp"
#include "rdot/mat.hpp"
#include "rdot/path_graph.hpp"
#include "rdot/rng.hpp"
#include "rdot/trainer.hpp"
#include "rdot/transform.hpp"
#include "test_util.hpp"

using rdot::Mat;
using rdot::QuantConfig;
using rdot::RDPoint;
using rdot::TransformBank;
using rdot::TransformSpec;

TEST_CASE("order-0 exp-Golomb code lengths") {
  CHECK(rdot::eg0_bits(0) == 1);
  CHECK(rdot::eg0_bits(1) == 3);
  CHECK(rdot::eg0_bits(2) == 3);
  CHECK(rdot::eg0_bits(3) == 5);
  CHECK(rdot::eg0_bits(6) == 5);
  CHECK(rdot::eg0_bits(7) == 7);
  CHECK(rdot::eg0_bits(62) == 11);
  CHECK(rdot::eg0_bits(63) == 13);
  CHECK(rdot::eg0_bits(64) == 13);
}

TEST_CASE("run-level bit accounting on hand examples") {
  // All-zero length-64 block signals one terminator: EG0(64) = 13 bits.
  std::vector<int32_t> zeros64(64, 0);
  CHECK(rdot::run_level_bits(zeros64) == 13);

  // Single +1 leading a length-4 block:
  //   run 0 (1) + magnitude EG0(0) (1) + sign (1) + trailing EG0(3) (5).
  std::vector<int32_t> one = {1, 0, 0, 0};
  CHECK(rdot::run_level_bits(one) == 8);

  // [0, 3, 0, 0, -1, 0, 0, 0]:
  //   3:  run EG0(1)=3, magnitude EG0(2)=3, sign 1 -> 7
  //   -1: run EG0(2)=3, magnitude EG0(0)=1, sign 1 -> 5
  //   terminator EG0(3) = 5; total 17.
  std::vector<int32_t> mixed = {0, 3, 0, 0, -1, 0, 0, 0};
  CHECK(rdot::run_level_bits(mixed) == 17);
}

TEST_CASE("turning any zero into a nonzero strictly increases the bit count") {
  rdot::Xoshiro256pp rng(61);
  for (int trial = 0; trial < 30; ++trial) {
    std::vector<int32_t> levels(16, 0);
    for (auto& l : levels)
      if (rng.uniform() < 0.3) l = int32_t(rng.next() % 9) - 4;
    const int64_t base = rdot::run_level_bits(levels);
    for (size_t p = 0; p < levels.size(); ++p) {
      if (levels[p] != 0) continue;
      auto bumped = levels;
      bumped[p] = (rng.next() & 1) ? 1 : -1;
      CHECK(rdot::run_level_bits(bumped) > base);
    }
  }
}

TEST_CASE("entropy_bits visits natural-order levels through the scan") {
  rdot::Xoshiro256pp rng(62);
  std::vector<int32_t> natural(16);
  for (auto& l : natural) l = int32_t(rng.next() % 7) - 3;
  rdot::ScanOrder scan = testutil::random_scan(16, rng);

  std::vector<int32_t> gathered(16);
  for (size_t k = 0; k < 16; ++k) gathered[k] = natural[scan.perm[k]];
  CHECK(rdot::entropy_bits(natural, scan) == rdot::run_level_bits(gathered));

  rdot::ScanOrder wrong_len = testutil::random_scan(9, rng);
  try {
    rdot::entropy_bits(natural, wrong_len);
    FAIL("expected InvalidParams");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kInvalidParams);
  }
  rdot::ScanOrder dupe = scan;
  dupe.perm[0] = dupe.perm[1];
  try {
    rdot::entropy_bits(natural, dupe);
    FAIL("expected InvalidParams");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kInvalidParams);
  }
}

TEST_CASE("encode_block on a zero block picks slot 0 and codes only the terminator") {
  const QuantConfig q = QuantConfig::from_qp(28);
  auto specs = rdot::baseline_specs(4);
  auto code = rdot::encode_block(Mat(4, 4), specs, 1, q);
  CHECK(code.chosen_slot == 0);
  CHECK(code.distortion == 0.0);
  CHECK(code.signal_bits == 1);
  CHECK(code.coeff_bits == rdot::eg0_bits(16));
  for (int32_t l : code.levels) CHECK(l == 0);
}

TEST_CASE("encode_block compacts a scaled DCT basis function into one level") {
  const int n = 4;
  const QuantConfig q = QuantConfig::from_qp(28);
  Mat c = rdot::dct_basis(n);
  Mat x(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) x(i, j) = 100.0 * c(i, 0) * c(j, 0);
  auto code = rdot::encode_block(x, rdot::baseline_specs(n), 1, q);
  CHECK(code.chosen_slot == 0);
  int nonzeros = 0;
  for (int32_t l : code.levels) nonzeros += (l != 0);
  CHECK(nonzeros == 1);
  CHECK(code.levels[0] == 16);  // round(100 / 6.3496)
}

TEST_CASE("encode_block is an exhaustive minimum over slots") {
  const QuantConfig q = QuantConfig::from_qp(28);
  std::vector<Mat> blocks =
      rdot::synth_residuals(rdot::ModeLabel::kD45, 30, 4,
                            rdot::default_synth_params(rdot::ModeLabel::kD45), 7)
          .blocks;
  TransformBank bank = rdot::make_initial_bank(blocks, rdot::Learner::kSpgt, {});

  for (const Mat& x : blocks) {
    auto code = rdot::encode_block(x, bank, q);
    CHECK(code.signal_bits == 3);

    double best = 0.0;
    int best_slot = -1;
    for (int s = 0; s < rdot::kNumSlots; ++s) {
      const TransformSpec& spec = bank.specs[size_t(s)];
      auto y = rdot::forward(x, spec);
      auto levels = rdot::quantize(y, q);
      const int64_t bits = rdot::run_level_bits(levels);
      Mat rec = rdot::inverse(rdot::dequantize(levels, q), spec);
      double sse = 0.0;
      for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
          const double d = x(i, j) - rec(i, j);
          sse += d * d;
        }
      const double cost = sse + q.lambda * double(bits + 3);
      if (best_slot < 0 || cost < best) {
        best = cost;
        best_slot = s;
      }
    }
    CHECK(code.chosen_slot == best_slot);
    const double chosen_cost =
        code.distortion + q.lambda * double(code.coeff_bits + code.signal_bits);
    CHECK(chosen_cost == best);
  }
}

TEST_CASE("evaluate emits one point per QP with sane monotone trends") {
  std::vector<Mat> blocks =
      rdot::synth_residuals(rdot::ModeLabel::kV, 400, 4,
                            rdot::default_synth_params(rdot::ModeLabel::kV), 11)
          .blocks;
  const std::vector<int> qps = {26, 27, 28, 29, 30, 31};
  auto curve = rdot::evaluate_baseline(blocks, qps);
  REQUIRE(curve.size() == 6);
  for (size_t i = 0; i < curve.size(); ++i) {
    CHECK(curve[i].qp == qps[i]);
    CHECK(curve[i].bits_per_block > 0.0);
    CHECK(curve[i].psnr > 0.0);
  }
  for (size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].sse >= curve[i - 1].sse - 1e-9);
    CHECK(curve[i].bits_per_block <= curve[i - 1].bits_per_block + 1e-9);
    CHECK(curve[i].psnr <= curve[i - 1].psnr + 1e-9);
  }
  // PSNR definition: 10*log10(255^2 * N^2 / avg SSE).
  for (const auto& pt : curve) {
    const double want = 10.0 * std::log10(255.0 * 255.0 * 16.0 / std::max(pt.sse, 1e-12));
    CHECK(pt.psnr == doctest::Approx(want).epsilon(1e-12));
  }
}

TEST_CASE("a bank that duplicates the baseline costs exactly 2 extra bits per block") {
  const int n = 4;
  std::vector<Mat> blocks =
      rdot::synth_residuals(rdot::ModeLabel::kH, 200, n,
                            rdot::default_synth_params(rdot::ModeLabel::kH), 13)
          .blocks;

  TransformBank bank;
  bank.block_size = n;
  const rdot::PrimaryKind primaries[3] = {
      rdot::dct_primary(n), rdot::adst_primary(n),
      rdot::learned_primary(rdot::dct_basis(n), rdot::dct_basis(n))};
  for (int k = 0; k < 3; ++k) {
    TransformSpec base;
    base.primary = primaries[k];
    base.scan = rdot::diagonal_scan(n);
    bank.specs[size_t(k)] = base;
    TransformSpec sec = base;
    sec.n = 1;
    sec.secondary = Mat::identity(1);
    bank.specs[size_t(k) + 3] = sec;
  }
  bank.validate();

  const std::vector<int> qps = {26, 28, 30, 31};
  auto bank_curve = rdot::evaluate(blocks, bank, qps);
  auto base_curve = rdot::evaluate_baseline(blocks, qps);
  for (size_t i = 0; i < qps.size(); ++i) {
    CHECK(bank_curve[i].bits_per_block ==
          doctest::Approx(base_curve[i].bits_per_block + 2.0).epsilon(1e-12));
    CHECK(bank_curve[i].sse == base_curve[i].sse);
  }
}

namespace {

std::vector<RDPoint> synthetic_curve(double scale) {
  // Smooth convex-ish RD curve: rate grows exponentially with PSNR.
  std::vector<RDPoint> pts;
  const double psnrs[6] = {32.0, 34.0, 36.0, 38.0, 40.0, 42.0};
  for (int i = 0; i < 6; ++i) {
    RDPoint p;
    p.qp = 31 - i;
    p.psnr = psnrs[i];
    p.bits_per_block = scale * std::pow(10.0, 0.08 * (psnrs[i] - 30.0));
    p.sse = 255.0 * 255.0 * 16.0 / std::pow(10.0, psnrs[i] / 10.0);
    pts.push_back(p);
  }
  return pts;
}

}  // namespace

TEST_CASE("bd_rate is zero on identical curves") {
  auto curve = synthetic_curve(100.0);
  auto r = rdot::bd_rate(curve, curve);
  CHECK(std::abs(r.percent) <= 1e-9);
  CHECK(r.psnr_low == 32.0);
  CHECK(r.psnr_high == 42.0);
}

TEST_CASE("bd_rate reports -50% when the test curve halves the rate") {
  auto ref = synthetic_curve(100.0);
  auto half = synthetic_curve(50.0);
  auto r = rdot::bd_rate(ref, half);
  CHECK(r.percent == doctest::Approx(-50.0).epsilon(1e-6));
  auto inv = rdot::bd_rate(half, ref);
  CHECK(inv.percent == doctest::Approx(100.0).epsilon(1e-6));
}

TEST_CASE("bd_rate is antisymmetric within tolerance for nearby curves") {
  auto ref = synthetic_curve(100.0);
  auto test = synthetic_curve(99.0);
  // Perturb the test curve's shape slightly so the fits are not identical.
  for (size_t i = 0; i < test.size(); ++i)
    test[i].bits_per_block *= 1.0 + 0.002 * double(i % 2);
  auto ab = rdot::bd_rate(ref, test);
  auto ba = rdot::bd_rate(test, ref);
  CHECK(std::abs(ab.percent + ba.percent) <= 0.05);
}

TEST_CASE("bd_rate input validation") {
  auto ref = synthetic_curve(100.0);

  std::vector<RDPoint> three(ref.begin(), ref.begin() + 3);
  try {
    rdot::bd_rate(three, ref);
    FAIL("expected InvalidParams");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kInvalidParams);
  }

  auto shifted = synthetic_curve(100.0);
  for (auto& p : shifted) p.psnr += 50.0;  // disjoint PSNR ranges
  try {
    rdot::bd_rate(ref, shifted);
    FAIL("expected NoOverlap");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kNoOverlap);
  }

  auto degenerate = synthetic_curve(100.0);
  degenerate[2].bits_per_block = 0.0;
  try {
    rdot::bd_rate(ref, degenerate);
    FAIL("expected InvalidParams");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kInvalidParams);
  }
}
