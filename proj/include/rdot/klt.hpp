#ifndef RDOT_KLT_HPP
#define RDOT_KLT_HPP

#include <cstddef>
#include <utility>
#include <vector>

#include "rdot/mat.hpp"

namespace rdot {

struct CovEstimate {
  int dim = 0;
  Mat matrix;  // symmetric PSD second-moment estimate
  size_t sample_count = 0;
};

/// Second-moment estimate S = (1/P) sum x x^T. No mean subtraction:
/// residuals are modeled zero-mean throughout, matching the transform
/// coding convention. Each entry accumulates over samples in their given
/// order, so the result is independent of thread count.
CovEstimate sample_covariance(const std::vector<std::vector<double>>& vectors);

/// Separable KLT: eigenbases of the column-sample and row-sample
/// covariances of the blocks (each block contributes its N columns and N
/// rows as samples), columns ordered by descending variance, sign-fixed.
/// Returns (column transform, row transform).
std::pair<Mat, Mat> separable_klt(const std::vector<Mat>& blocks);

/// Non-separable KLT of coefficient vectors: eigenbasis of their sample
/// covariance in descending-variance order. Null-space directions sort
/// last; no error is raised for rank-deficient covariances.
Mat secondary_klt(const std::vector<std::vector<double>>& coeff_vectors);

/// Reverses sym_eig's ascending order into the descending (variance-major)
/// convention used at this boundary.
Mat descending_eigvecs(const Mat& symmetric);

}  // namespace rdot

#endif  // RDOT_KLT_HPP
