#include "rdot/dataset.hpp"

#include <cmath>
#include <cstdio>

#include "kernels.hpp"
#include "rdot/error.hpp"
#include "rdot/io_util.hpp"
#include "rdot/parallel.hpp"

namespace rdot {

std::string_view mode_name(ModeLabel mode) {
  switch (mode) {
    case ModeLabel::kDc: return "DC";
    case ModeLabel::kV: return "V";
    case ModeLabel::kH: return "H";
    case ModeLabel::kD45: return "D_45";
    case ModeLabel::kD135: return "D_135";
    case ModeLabel::kD113: return "D_113";
    case ModeLabel::kD157: return "D_157";
    case ModeLabel::kD203: return "D_203";
    case ModeLabel::kD67: return "D_67";
    case ModeLabel::kS: return "S";
    case ModeLabel::kSV: return "S_V";
    case ModeLabel::kSH: return "S_H";
  }
  throw Error(ErrorCode::kInvalidParams, "unknown mode label");
}

ModeLabel mode_from_name(std::string_view name) {
  for (ModeLabel m : kAllModes) {
    if (mode_name(m) == name) return m;
  }
  throw Error(ErrorCode::kInvalidParams, "unknown mode name: " + std::string(name));
}

namespace {

SynthComponent directional(double angle, double sigma) {
  return SynthComponent{angle, 0.92, 0.55, sigma};
}

SynthComponent isotropic(double rho, double sigma) {
  return SynthComponent{0.0, rho, rho, sigma};
}

}  // namespace

SynthParams default_synth_params(ModeLabel mode) {
  SynthParams p;
  switch (mode) {
    case ModeLabel::kDc: p.main = isotropic(0.60, 8.0); return p;
    case ModeLabel::kS: p.main = isotropic(0.85, 5.0); return p;
    case ModeLabel::kSV: p.main = isotropic(0.75, 6.0); return p;
    case ModeLabel::kSH: p.main = isotropic(0.75, 12.0); return p;
    case ModeLabel::kV: p.main = directional(90.0, 14.0); break;
    case ModeLabel::kH: p.main = directional(0.0, 14.0); break;
    case ModeLabel::kD45: p.main = directional(45.0, 14.0); break;
    case ModeLabel::kD135: p.main = directional(135.0, 14.0); break;
    case ModeLabel::kD113: p.main = directional(113.0, 14.0); break;
    case ModeLabel::kD157: p.main = directional(157.0, 14.0); break;
    case ModeLabel::kD203: p.main = directional(23.0, 14.0); break;
    case ModeLabel::kD67: p.main = directional(67.0, 14.0); break;
  }
  // Isotropic contaminant keeps the directional fixtures multi-cluster and
  // the learned banks' gains in a realistic range.
  p.second = isotropic(0.65, 11.0);
  p.weight = 0.36;
  return p;
}

namespace {

void check_component(const SynthComponent& c) {
  if (!(c.rho_along > 0.0 && c.rho_along < 1.0 && c.rho_across > 0.0 && c.rho_across < 1.0)) {
    throw Error(ErrorCode::kInvalidParams, "correlation coefficients must lie strictly in (0,1)");
  }
  if (!(c.sigma >= 0.0) || !std::isfinite(c.sigma)) {
    throw Error(ErrorCode::kInvalidParams, "sigma must be finite and non-negative");
  }
}

}  // namespace

ResidualDataset synth_residuals(ModeLabel mode, int count, int block_size,
                                const SynthParams& params, uint64_t seed) {
  if (count < 1) throw Error(ErrorCode::kInvalidParams, "block count must be >= 1");
  if (block_size != 4 && block_size != 8 && block_size != 16 && block_size != 32) {
    throw Error(ErrorCode::kInvalidParams, "block size must be one of 4, 8, 16, 32");
  }
  check_component(params.main);
  if (params.second) {
    check_component(*params.second);
    if (!(params.weight >= 0.0 && params.weight <= 1.0)) {
      throw Error(ErrorCode::kInvalidParams, "mixture weight must lie in [0,1]");
    }
  }

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
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
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

void write_dataset(const ResidualDataset& ds, const std::filesystem::path& path) {
  io::ByteWriter w;
  w.raw("RSD1", 4);
  w.u8(1);
  w.u32(uint32_t(ds.block_size));
  w.u32(uint32_t(ds.blocks.size()));
  w.str16(std::string(mode_name(ds.mode)));
  for (const Mat& b : ds.blocks) {
    if (b.rows() != ds.block_size || b.cols() != ds.block_size) {
      throw Error(ErrorCode::kDimensionMismatch, "dataset block with mismatched size");
    }
    for (double v : b.data()) {
      if (v != std::floor(v) || v < -32768.0 || v > 32767.0) {
        throw Error(ErrorCode::kInvalidParams, "dataset samples must be i16 integers");
      }
      w.i16(int16_t(v));
    }
  }
  io::atomic_write(path, w.bytes());
}

ResidualDataset read_dataset(const std::filesystem::path& path) {
  io::ByteReader r(io::read_file(path));
  char magic[4];
  for (char& c : magic) c = char(r.u8());
  if (std::string_view(magic, 4) != "RSD1") {
    throw Error(ErrorCode::kBadMagic, "not an RSD1 dataset file");
  }
  const uint8_t version = r.u8();
  if (version != 1) {
    throw Error(ErrorCode::kUnsupportedVersion, "unsupported RSD1 version");
  }
  ResidualDataset ds;
  ds.block_size = int(r.u32());
  if (ds.block_size < 1 || ds.block_size > 256) {
    throw Error(ErrorCode::kInvalidParams, "implausible block size");
  }
  const uint32_t count = r.u32();
  ds.mode = mode_from_name(r.str16());
  ds.blocks.resize(count);
  for (Mat& b : ds.blocks) {
    b = Mat(ds.block_size, ds.block_size);
    for (double& v : b.data()) v = double(r.i16());
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kBadLength, "trailing bytes after dataset payload");
  }
  ds.source = "INGESTED(" + path.string() + ")";
  return ds;
}

ResidualDataset ingest_raw(const std::filesystem::path& path, int block_size, ModeLabel mode) {
  if (block_size < 1) throw Error(ErrorCode::kInvalidParams, "block size must be >= 1");
  io::ByteReader r(io::read_file(path));
  const size_t block_bytes = size_t(block_size) * size_t(block_size) * 2;
  if (r.remaining() % block_bytes != 0) {
    throw Error(ErrorCode::kBadLength, "file length is not a whole number of blocks");
  }
  ResidualDataset ds;
  ds.block_size = block_size;
  ds.mode = mode;
  ds.blocks.resize(r.remaining() / block_bytes);
  for (Mat& b : ds.blocks) {
    b = Mat(block_size, block_size);
    for (double& v : b.data()) v = double(r.i16());
  }
  ds.source = "INGESTED(" + path.string() + ")";
  return ds;
}

}  // namespace rdot
