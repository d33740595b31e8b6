#ifndef RDOT_MAT_HPP
#define RDOT_MAT_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace rdot {

/// Dense row-major matrix of doubles. Small and value-semantic; everything
/// in this toolkit operates on blocks of at most a few hundred rows.
class Mat {
 public:
  Mat() = default;
  Mat(int rows, int cols) : rows_(rows), cols_(cols), data_(size_t(rows) * cols, 0.0) {}
  Mat(int rows, int cols, std::vector<double> data);

  static Mat identity(int n);

  int rows() const { return rows_; }
  int cols() const { return cols_; }

  double& operator()(int i, int j) { return data_[size_t(i) * cols_ + j]; }
  double operator()(int i, int j) const { return data_[size_t(i) * cols_ + j]; }

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  Mat transposed() const;
  bool all_finite() const;

  bool operator==(const Mat& other) const = default;

 private:
  int rows_ = 0;
  int cols_ = 0;
  std::vector<double> data_;
};

Mat operator*(const Mat& a, const Mat& b);
Mat operator-(const Mat& a, const Mat& b);

/// Eigendecomposition of a symmetric matrix. `values` ascending;
/// `vectors` columns are unit-norm eigenvectors in matching order, each
/// sign-fixed so its first entry with magnitude > 1e-12 is positive.
struct EigPair {
  std::vector<double> values;
  Mat vectors;
};

/// Cyclic Jacobi eigendecomposition. Converges when the off-diagonal
/// Frobenius norm drops below 1e-12 * ||S||_F; throws NoConvergence after
/// 100 * N^2 rotations, NonSymmetric if max |S - S^T| exceeds 1e-9.
EigPair sym_eig(const Mat& s);

/// Kronecker product: block (i,j) of the result is a(i,j) * b.
Mat kron(const Mat& a, const Mat& b);

/// Column-stacking vectorization: element (i,j) lands at index j*rows + i.
std::vector<double> vec(const Mat& x);
Mat unvec(std::span<const double> v, int rows, int cols);

double max_abs_diff(const Mat& a, const Mat& b);

/// ||Q^T Q - I||_max, the orthonormality residual used by invariant checks.
double orthonormality_error(const Mat& q);

}  // namespace rdot

#endif  // RDOT_MAT_HPP
