#ifndef RDOT_TRANSFORM_HPP
#define RDOT_TRANSFORM_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "rdot/mat.hpp"

namespace rdot {

enum class PrimaryTag : uint8_t { kDct = 0, kAdst = 1, kLearned = 2 };

/// Separable primary transform: X_hat = C^T X R. DCT/ADST carry canonical
/// bases generated from their path graphs; LEARNED carries trained ones.
struct PrimaryKind {
  PrimaryTag tag = PrimaryTag::kDct;
  Mat col_transform;  // C
  Mat row_transform;  // R
};

PrimaryKind dct_primary(int n);
PrimaryKind adst_primary(int n);
PrimaryKind learned_primary(Mat col_transform, Mat row_transform);

/// X_hat = C^T X R.
Mat apply_primary(const Mat& x, const PrimaryKind& primary);

/// Permutation over coefficient positions: perm[k] is the index (into the
/// column-stacked coefficient vector) visited k-th.
struct ScanOrder {
  std::vector<uint32_t> perm;

  bool is_permutation() const;
  bool operator==(const ScanOrder&) const = default;
};

ScanOrder identity_scan(int count);

/// Fixed low-frequency-first scan for the DCT/ADST baselines: positions
/// sorted by anti-diagonal i+j, ties by row index i.
ScanOrder diagonal_scan(int n);

/// Applies the primary to every block, measures each coefficient
/// position's sample variance (about zero, matching the zero-mean residual
/// model), and sorts positions by descending variance; ties break toward
/// the lower coefficient index.
ScanOrder scan_order_from_variance(const std::vector<Mat>& blocks, const PrimaryKind& primary);

/// Full composed transform F = G P T: separable primary G = R (x) C, scan
/// permutation P, and an optional secondary T = blockdiag(T_tilde, I)
/// applied to the first n scanned coefficients.
struct TransformSpec {
  PrimaryKind primary;
  ScanOrder scan;
  std::optional<Mat> secondary;  // T_tilde, n x n orthonormal
  int n = 0;                     // secondary span (meaningful when secondary is set)

  int block_size() const;
  void validate() const;  // throws on violated invariants
};

/// y_hat = T^T P^T G^T vec(x).
std::vector<double> forward(const Mat& x, const TransformSpec& spec);

/// x = F y_hat; inverse(forward(x)) round-trips within 1e-9.
Mat inverse(std::span<const double> y, const TransformSpec& spec);

/// Explicit N^2 x N^2 matrix F with forward(x) = F^T vec(x).
Mat compose_flat(const TransformSpec& spec);

inline constexpr int kNumSlots = 6;

/// The six-slot transform set: DCT, ADST, LEARNED, then the same three
/// primaries again with a secondary. Slot k+3 shares slot k's primary and
/// scan.
struct TransformBank {
  std::array<TransformSpec, kNumSlots> specs;
  std::string mode_label;
  int block_size = 0;

  void validate() const;
};

/// Binary bank container (magic "TBK1"); see README for the field layout.
void save_bank(const TransformBank& bank, const std::filesystem::path& path);
TransformBank load_bank(const std::filesystem::path& path);

}  // namespace rdot

#endif  // RDOT_TRANSFORM_HPP
