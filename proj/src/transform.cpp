#include "rdot/transform.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdot/error.hpp"
#include "rdot/io_util.hpp"
#include "rdot/parallel.hpp"
#include "rdot/path_graph.hpp"

namespace rdot {

PrimaryKind dct_primary(int n) { return {PrimaryTag::kDct, dct_basis(n), dct_basis(n)}; }

PrimaryKind adst_primary(int n) { return {PrimaryTag::kAdst, adst_basis(n), adst_basis(n)}; }

PrimaryKind learned_primary(Mat col_transform, Mat row_transform) {
  return {PrimaryTag::kLearned, std::move(col_transform), std::move(row_transform)};
}

Mat apply_primary(const Mat& x, const PrimaryKind& primary) {
  const Mat& c = primary.col_transform;
  const Mat& r = primary.row_transform;
  const int n = x.rows();
  if (x.cols() != n || c.rows() != n || c.cols() != n || r.rows() != n || r.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "apply_primary size mismatch");
  }
  Mat tmp(n, n);  // C^T X
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double cki = c(k, i);
      for (int j = 0; j < n; ++j) tmp(i, j) += cki * x(k, j);
    }
  Mat out(n, n);  // (C^T X) R
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double tik = tmp(i, k);
      for (int j = 0; j < n; ++j) out(i, j) += tik * r(k, j);
    }
  return out;
}

bool ScanOrder::is_permutation() const {
  std::vector<bool> seen(perm.size(), false);
  for (uint32_t p : perm) {
    if (p >= perm.size() || seen[p]) return false;
    seen[p] = true;
  }
  return true;
}

ScanOrder identity_scan(int count) {
  ScanOrder s;
  s.perm.resize(size_t(count));
  std::iota(s.perm.begin(), s.perm.end(), 0u);
  return s;
}

ScanOrder diagonal_scan(int n) {
  ScanOrder s;
  s.perm.resize(size_t(n) * n);
  std::iota(s.perm.begin(), s.perm.end(), 0u);
  std::stable_sort(s.perm.begin(), s.perm.end(), [n](uint32_t a, uint32_t b) {
    const int ia = int(a) % n, ja = int(a) / n;
    const int ib = int(b) % n, jb = int(b) / n;
    if (ia + ja != ib + jb) return ia + ja < ib + jb;
    return ia < ib;
  });
  return s;
}

ScanOrder scan_order_from_variance(const std::vector<Mat>& blocks, const PrimaryKind& primary) {
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "scan_order_from_variance requires blocks");
  }
  const int n = blocks.front().rows();
  const size_t nn = size_t(n) * n;
  const int64_t m = int64_t(blocks.size());

  std::vector<double> coeffs(size_t(m) * nn);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int64_t b = 0; b < m; ++b) {
    const Mat xh = apply_primary(blocks[size_t(b)], primary);
    double* dst = coeffs.data() + size_t(b) * nn;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) dst[size_t(j) * n + i] = xh(i, j);
  }

  // Per-position sums run over blocks in order: thread-count independent.
  std::vector<double> variance(nn, 0.0);
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
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

int TransformSpec::block_size() const {
  int n = 0;
  while (size_t(n) * n < scan.perm.size()) ++n;
  return n;
}

void TransformSpec::validate() const {
  const int n = block_size();
  if (n < 1 || scan.perm.size() != size_t(n) * n) {
    throw Error(ErrorCode::kInvalidParams, "scan length is not a square");
  }
  if (!scan.is_permutation()) {
    throw Error(ErrorCode::kInvalidParams, "scan is not a permutation");
  }
  const auto check_orthonormal = [](const Mat& q, int dim, const char* what) {
    if (q.rows() != dim || q.cols() != dim) {
      throw Error(ErrorCode::kDimensionMismatch, std::string(what) + " has wrong dimensions");
    }
    if (!q.all_finite() || orthonormality_error(q) > 1e-10) {
      throw Error(ErrorCode::kInvalidParams, std::string(what) + " is not orthonormal");
    }
  };
  check_orthonormal(primary.col_transform, n, "column transform");
  check_orthonormal(primary.row_transform, n, "row transform");
  if (secondary) {
    if (this->n < 1 || this->n > n * n) {
      throw Error(ErrorCode::kInvalidParams, "secondary span n out of range");
    }
    check_orthonormal(*secondary, this->n, "secondary transform");
  }
}

std::vector<double> forward(const Mat& x, const TransformSpec& spec) {
  const int n = spec.block_size();
  if (x.rows() != n || x.cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "block size does not match spec");
  }
  const Mat xh = apply_primary(x, spec.primary);

  const size_t nn = size_t(n) * n;
  std::vector<double> y(nn);
  for (size_t k = 0; k < nn; ++k) {
    const uint32_t idx = spec.scan.perm[k];
    y[k] = xh(int(idx) % n, int(idx) / n);
  }

  if (spec.secondary) {
    const Mat& t = *spec.secondary;
    std::vector<double> head(size_t(spec.n));
    for (int a = 0; a < spec.n; ++a) {
      double s = 0.0;
      for (int b = 0; b < spec.n; ++b) s += t(b, a) * y[size_t(b)];
      head[size_t(a)] = s;
    }
    std::copy(head.begin(), head.end(), y.begin());
  }
  return y;
}

Mat inverse(std::span<const double> y, const TransformSpec& spec) {
  const int n = spec.block_size();
  const size_t nn = size_t(n) * n;
  if (y.size() != nn) {
    throw Error(ErrorCode::kDimensionMismatch, "coefficient count does not match spec");
  }

  std::vector<double> z(y.begin(), y.end());
  if (spec.secondary) {
    const Mat& t = *spec.secondary;
    std::vector<double> head(size_t(spec.n));
    for (int b = 0; b < spec.n; ++b) {
      double s = 0.0;
      for (int a = 0; a < spec.n; ++a) s += t(b, a) * y[size_t(a)];
      head[size_t(b)] = s;
    }
    std::copy(head.begin(), head.end(), z.begin());
  }

  Mat xh(n, n);
  for (size_t k = 0; k < nn; ++k) {
    const uint32_t idx = spec.scan.perm[k];
    xh(int(idx) % n, int(idx) / n) = z[k];
  }

  // X = C X_hat R^T
  const Mat& c = spec.primary.col_transform;
  const Mat& r = spec.primary.row_transform;
  Mat tmp(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double cik = c(i, k);
      for (int j = 0; j < n; ++j) tmp(i, j) += cik * xh(k, j);
    }
  Mat out(n, n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) {
      const double tik = tmp(i, k);
      for (int j = 0; j < n; ++j) out(i, j) += tik * r(j, k);
    }
  return out;
}

Mat compose_flat(const TransformSpec& spec) {
  const int n = spec.block_size();
  const int nn = n * n;
  const Mat g = kron(spec.primary.row_transform, spec.primary.col_transform);
  Mat p(nn, nn);
  for (int k = 0; k < nn; ++k) p(int(spec.scan.perm[size_t(k)]), k) = 1.0;
  Mat t = Mat::identity(nn);
  if (spec.secondary) {
    for (int i = 0; i < spec.n; ++i)
      for (int j = 0; j < spec.n; ++j) t(i, j) = (*spec.secondary)(i, j);
  }
  return g * p * t;
}

void TransformBank::validate() const {
  if (block_size < 1) throw Error(ErrorCode::kInvalidParams, "bank block size must be >= 1");
  for (const TransformSpec& spec : specs) {
    spec.validate();
    if (spec.block_size() != block_size) {
      throw Error(ErrorCode::kDimensionMismatch, "bank specs disagree on block size");
    }
  }
  for (int k = 0; k < 3; ++k) {
    const TransformSpec& a = specs[size_t(k)];
    const TransformSpec& b = specs[size_t(k) + 3];
    if (a.primary.tag != b.primary.tag ||
        max_abs_diff(a.primary.col_transform, b.primary.col_transform) > 1e-12 ||
        max_abs_diff(a.primary.row_transform, b.primary.row_transform) > 1e-12 ||
        a.scan.perm != b.scan.perm) {
      throw Error(ErrorCode::kInvalidParams, "slots k and k+3 must share primary and scan");
    }
    if (!b.secondary) {
      throw Error(ErrorCode::kInvalidParams, "slots 4-6 must carry a secondary transform");
    }
  }
}

namespace {

void write_square(io::ByteWriter& w, const Mat& m) {
  for (double v : m.data()) w.f64(v);
}

Mat read_square(io::ByteReader& r, int n) {
  Mat m(n, n);
  for (double& v : m.data()) v = r.f64();
  return m;
}

}  // namespace

void save_bank(const TransformBank& bank, const std::filesystem::path& path) {
  bank.validate();
  io::ByteWriter w;
  w.raw("TBK1", 4);
  w.u32(uint32_t(bank.block_size));
  w.str16(bank.mode_label);
  for (const TransformSpec& spec : bank.specs) {
    w.u8(uint8_t(spec.primary.tag));
    if (spec.primary.tag == PrimaryTag::kLearned) {
      write_square(w, spec.primary.col_transform);
      write_square(w, spec.primary.row_transform);
    }
    for (uint32_t p : spec.scan.perm) w.u32(p);
    w.u8(spec.secondary ? 1 : 0);
    w.u32(uint32_t(spec.n));
    if (spec.secondary) write_square(w, *spec.secondary);
  }
  io::atomic_write(path, w.bytes());
}

TransformBank load_bank(const std::filesystem::path& path) {
  io::ByteReader r(io::read_file(path));
  char magic[4];
  for (char& c : magic) c = char(r.u8());
  if (std::string_view(magic, 4) != "TBK1") {
    throw Error(ErrorCode::kBadMagic, "not a TBK1 bank file");
  }
  TransformBank bank;
  bank.block_size = int(r.u32());
  if (bank.block_size < 1 || bank.block_size > 256) {
    throw Error(ErrorCode::kInvalidParams, "implausible block size");
  }
  bank.mode_label = r.str16();
  const int n = bank.block_size;
  for (TransformSpec& spec : bank.specs) {
    const uint8_t tag = r.u8();
    switch (tag) {
      case 0: spec.primary = dct_primary(n); break;
      case 1: spec.primary = adst_primary(n); break;
      case 2: {
        Mat col = read_square(r, n);
        Mat row = read_square(r, n);
        spec.primary = learned_primary(std::move(col), std::move(row));
        break;
      }
      default: throw Error(ErrorCode::kInvalidParams, "unknown primary tag");
    }
    spec.scan.perm.resize(size_t(n) * n);
    for (uint32_t& p : spec.scan.perm) p = r.u32();
    const bool has_secondary = r.u8() != 0;
    spec.n = int(r.u32());
    if (has_secondary) {
      if (spec.n < 1 || spec.n > n * n) {
        throw Error(ErrorCode::kInvalidParams, "secondary span n out of range");
      }
      spec.secondary = read_square(r, spec.n);
    }
  }
  if (r.remaining() != 0) {
    throw Error(ErrorCode::kBadLength, "trailing bytes after bank payload");
  }
  bank.validate();
  return bank;
}

}  // namespace rdot
