#ifndef RDOT_DATASET_HPP
#define RDOT_DATASET_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rdot/mat.hpp"

namespace rdot {

/// The twelve intra-prediction mode labels transforms are trained per.
enum class ModeLabel {
  kDc,
  kV,
  kH,
  kD45,
  kD135,
  kD113,
  kD157,
  kD203,
  kD67,
  kS,
  kSV,
  kSH,
};

inline constexpr std::array<ModeLabel, 12> kAllModes = {
    ModeLabel::kDc,   ModeLabel::kV,    ModeLabel::kH,  ModeLabel::kD45,
    ModeLabel::kD135, ModeLabel::kD113, ModeLabel::kD157, ModeLabel::kD203,
    ModeLabel::kD67,  ModeLabel::kS,    ModeLabel::kSV, ModeLabel::kSH,
};

std::string_view mode_name(ModeLabel mode);
ModeLabel mode_from_name(std::string_view name);  // throws InvalidParams

/// One Gauss-Markov component: exponential covariance rotated to the
/// mode's angle, cov = sigma^2 * rho_along^|d_par| * rho_across^|d_perp|.
struct SynthComponent {
  double angle_degrees = 0.0;
  double rho_along = 0.9;   // in (0,1)
  double rho_across = 0.9;  // in (0,1)
  double sigma = 10.0;
};

/// Generator settings; an optional second component drawn with the given
/// probability turns the dataset into a two-cluster mixture.
struct SynthParams {
  SynthComponent main;
  std::optional<SynthComponent> second;
  double weight = 0.0;  // probability of the second component
};

/// Per-mode defaults: directional modes get an anisotropic component plus
/// an isotropic contaminant; DC/S modes are isotropic with distinct sigma.
SynthParams default_synth_params(ModeLabel mode);

struct ResidualDataset {
  int block_size = 0;
  ModeLabel mode = ModeLabel::kDc;
  std::vector<Mat> blocks;  // integer-valued entries, range +/-1023
  std::string source;       // provenance note: SYNTH(...) or INGESTED(path)
};

/// Seeded synthetic residual generator. Blocks are sampled independently
/// with a per-(seed, index) counter RNG, so output is identical for any
/// thread count; values are rounded and clamped to +/-1023.
ResidualDataset synth_residuals(ModeLabel mode, int count, int block_size,
                                const SynthParams& params, uint64_t seed);

/// RSD1 container: magic "RSD1", version u8, N u32 LE, M u32 LE, mode name
/// (u16 length + UTF-8), then M*N^2 samples as i16 LE, row-major per block.
void write_dataset(const ResidualDataset& ds, const std::filesystem::path& path);
ResidualDataset read_dataset(const std::filesystem::path& path);

/// Reads a headerless dump of consecutive row-major i16 blocks.
ResidualDataset ingest_raw(const std::filesystem::path& path, int block_size, ModeLabel mode);

}  // namespace rdot

#endif  // RDOT_DATASET_HPP
