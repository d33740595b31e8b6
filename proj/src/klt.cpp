#include "rdot/klt.hpp"

#include "rdot/error.hpp"
#include "rdot/parallel.hpp"

namespace rdot {

CovEstimate sample_covariance(const std::vector<std::vector<double>>& vectors) {
  if (vectors.empty()) {
    throw Error(ErrorCode::kEmptyInput, "sample_covariance requires at least one sample");
  }
  const int d = int(vectors.front().size());
  if (d < 1) {
    throw Error(ErrorCode::kDimensionMismatch, "samples must be non-empty vectors");
  }
  for (const auto& v : vectors) {
    if (int(v.size()) != d) {
      throw Error(ErrorCode::kDimensionMismatch, "samples must all have the same length");
    }
  }

  const double inv_p = 1.0 / double(vectors.size());
  Mat s(d, d);
  // One upper-triangle entry per work item; each sums over samples in
  // order, so the result does not depend on the thread count.
  const int entries = d * (d + 1) / 2;
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int e = 0; e < entries; ++e) {
    int i = 0, rem = e;
    while (rem >= d - i) rem -= d - i, ++i;
    const int j = i + rem;
    double acc = 0.0;
    for (const auto& v : vectors) acc += v[i] * v[j];
    s(i, j) = acc * inv_p;
    s(j, i) = s(i, j);
  }
  return CovEstimate{d, std::move(s), vectors.size()};
}

Mat descending_eigvecs(const Mat& symmetric) {
  const EigPair eig = sym_eig(symmetric);
  const int n = symmetric.rows();
  Mat v(n, n);
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i) v(i, k) = eig.vectors(i, n - 1 - k);
  return v;
}

std::pair<Mat, Mat> separable_klt(const std::vector<Mat>& blocks) {
  if (blocks.empty()) {
    throw Error(ErrorCode::kEmptyInput, "separable_klt requires at least one block");
  }
  const int n = blocks.front().rows();
  if (n < 1 || blocks.front().cols() != n) {
    throw Error(ErrorCode::kDimensionMismatch, "blocks must be square");
  }
  for (const Mat& b : blocks) {
    if (b.rows() != n || b.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "blocks must all have the same size");
    }
  }

  const double inv_p = 1.0 / (double(blocks.size()) * n);
  Mat s_col(n, n), s_row(n, n);
  const int entries = n * (n + 1) / 2;
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int e = 0; e < entries; ++e) {
    int i = 0, rem = e;
    while (rem >= n - i) rem -= n - i, ++i;
    const int j = i + rem;
    double ac = 0.0, ar = 0.0;
    for (const Mat& b : blocks) {
      for (int k = 0; k < n; ++k) {
        ac += b(i, k) * b(j, k);  // column samples: x(i) = X(i, k)
        ar += b(k, i) * b(k, j);  // row samples:    x(i) = X(k, i)
      }
    }
    s_col(i, j) = ac * inv_p;
    s_col(j, i) = s_col(i, j);
    s_row(i, j) = ar * inv_p;
    s_row(j, i) = s_row(i, j);
  }
  return {descending_eigvecs(s_col), descending_eigvecs(s_row)};
}

Mat secondary_klt(const std::vector<std::vector<double>>& coeff_vectors) {
  return descending_eigvecs(sample_covariance(coeff_vectors).matrix);
}

}  // namespace rdot
