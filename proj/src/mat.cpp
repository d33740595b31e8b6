#include "rdot/mat.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rdot/error.hpp"

namespace rdot {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonSymmetric: return "NonSymmetric";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kInvalidBeta: return "InvalidBeta";
    case ErrorCode::kInvalidParams: return "InvalidParams";
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kUnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::kBadLength: return "BadLength";
    case ErrorCode::kNoOverlap: return "NoOverlap";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

Mat::Mat(int rows, int cols, std::vector<double> data)
    : rows_(rows), cols_(cols), data_(std::move(data)) {
  if (data_.size() != size_t(rows) * cols) {
    throw Error(ErrorCode::kDimensionMismatch, "Mat data length does not match dimensions");
  }
}

Mat Mat::identity(int n) {
  Mat m(n, n);
  for (int i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

Mat Mat::transposed() const {
  Mat t(cols_, rows_);
  for (int i = 0; i < rows_; ++i)
    for (int j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
  return t;
}

bool Mat::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Mat operator*(const Mat& a, const Mat& b) {
  if (a.cols() != b.rows()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix product dimension mismatch");
  }
  Mat c(a.rows(), b.cols());
  for (int i = 0; i < a.rows(); ++i) {
    for (int k = 0; k < a.cols(); ++k) {
      const double aik = a(i, k);
      if (aik == 0.0) continue;
      for (int j = 0; j < b.cols(); ++j) c(i, j) += aik * b(k, j);
    }
  }
  return c;
}

Mat operator-(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "matrix difference dimension mismatch");
  }
  Mat c(a.rows(), a.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j) c(i, j) = a(i, j) - b(i, j);
  return c;
}

namespace {

double frobenius_norm(const Mat& m) {
  double s = 0.0;
  for (double v : m.data()) s += v * v;
  return std::sqrt(s);
}

double off_diagonal_norm(const Mat& m) {
  double s = 0.0;
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j)
      if (i != j) s += m(i, j) * m(i, j);
  return std::sqrt(s);
}

void fix_column_sign(Mat& v, int col) {
  for (int i = 0; i < v.rows(); ++i) {
    const double x = v(i, col);
    if (std::abs(x) > 1e-12) {
      if (x < 0.0) {
        for (int r = 0; r < v.rows(); ++r) v(r, col) = -v(r, col);
      }
      return;
    }
  }
}

}  // namespace

EigPair sym_eig(const Mat& s) {
  const int n = s.rows();
  if (n < 1 || s.cols() != n) {
    throw Error(ErrorCode::kNonSymmetric, "sym_eig requires a square matrix");
  }
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (std::abs(s(i, j) - s(j, i)) > 1e-9) {
        throw Error(ErrorCode::kNonSymmetric, "matrix is not symmetric within 1e-9");
      }
    }
  }

  Mat a = s;
  // Work on the symmetrized average so the iteration sees an exactly
  // symmetric matrix even when the input only meets the tolerance.
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      const double m = 0.5 * (a(i, j) + a(j, i));
      a(i, j) = m;
      a(j, i) = m;
    }

  Mat v = Mat::identity(n);
  const double norm = frobenius_norm(a);
  const double tol = 1e-12 * norm;
  const long rotation_cap = 100L * n * n;
  long rotations = 0;

  if (n > 1 && norm > 0.0) {
    while (off_diagonal_norm(a) > tol) {
      for (int p = 0; p < n - 1; ++p) {
        for (int q = p + 1; q < n; ++q) {
          const double apq = a(p, q);
          if (std::abs(apq) <= tol / n) continue;
          if (++rotations > rotation_cap) {
            throw Error(ErrorCode::kNoConvergence, "Jacobi rotation cap exceeded");
          }
          const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
          const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          const double c = 1.0 / std::sqrt(t * t + 1.0);
          const double sn = t * c;
          for (int k = 0; k < n; ++k) {
            const double akp = a(k, p), akq = a(k, q);
            a(k, p) = c * akp - sn * akq;
            a(k, q) = sn * akp + c * akq;
          }
          for (int k = 0; k < n; ++k) {
            const double apk = a(p, k), aqk = a(q, k);
            a(p, k) = c * apk - sn * aqk;
            a(q, k) = sn * apk + c * aqk;
          }
          a(p, q) = 0.0;
          a(q, p) = 0.0;
          for (int k = 0; k < n; ++k) {
            const double vkp = v(k, p), vkq = v(k, q);
            v(k, p) = c * vkp - sn * vkq;
            v(k, q) = sn * vkp + c * vkq;
          }
        }
      }
    }
  }

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int x, int y) { return a(x, x) < a(y, y); });

  EigPair out;
  out.values.resize(n);
  out.vectors = Mat(n, n);
  for (int k = 0; k < n; ++k) {
    out.values[k] = a(order[k], order[k]);
    for (int i = 0; i < n; ++i) out.vectors(i, k) = v(i, order[k]);
    fix_column_sign(out.vectors, k);
  }
  return out;
}

Mat kron(const Mat& a, const Mat& b) {
  if (a.rows() == 0 || b.rows() == 0) {
    throw Error(ErrorCode::kEmptyInput, "kron requires non-empty operands");
  }
  Mat r(a.rows() * b.rows(), a.cols() * b.cols());
  for (int ia = 0; ia < a.rows(); ++ia)
    for (int ja = 0; ja < a.cols(); ++ja) {
      const double aij = a(ia, ja);
      for (int ib = 0; ib < b.rows(); ++ib)
        for (int jb = 0; jb < b.cols(); ++jb)
          r(ia * b.rows() + ib, ja * b.cols() + jb) = aij * b(ib, jb);
    }
  return r;
}

std::vector<double> vec(const Mat& x) {
  std::vector<double> v(size_t(x.rows()) * x.cols());
  for (int j = 0; j < x.cols(); ++j)
    for (int i = 0; i < x.rows(); ++i) v[size_t(j) * x.rows() + i] = x(i, j);
  return v;
}

Mat unvec(std::span<const double> v, int rows, int cols) {
  if (v.size() != size_t(rows) * cols) {
    throw Error(ErrorCode::kDimensionMismatch, "unvec length does not match dimensions");
  }
  Mat x(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) x(i, j) = v[size_t(j) * rows + i];
  return x;
}

double max_abs_diff(const Mat& a, const Mat& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::kDimensionMismatch, "max_abs_diff dimension mismatch");
  }
  double m = 0.0;
  for (size_t i = 0; i < a.data().size(); ++i) {
    m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
  }
  return m;
}

double orthonormality_error(const Mat& q) {
  const Mat g = q.transposed() * q;
  double m = 0.0;
  for (int i = 0; i < g.rows(); ++i)
    for (int j = 0; j < g.cols(); ++j)
      m = std::max(m, std::abs(g(i, j) - (i == j ? 1.0 : 0.0)));
  return m;
}

}  // namespace rdot
