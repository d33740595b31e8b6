#include <cmath>
#include <vector>

#include <doctest.h>

#include "rdot/error.hpp"
#include "rdot/mat.hpp"
#include "rdot/rng.hpp"
#include "test_util.hpp"

using rdot::Mat;

TEST_CASE("matrix basics") {
  Mat z(2, 3);
  CHECK(z.rows() == 2);
  CHECK(z.cols() == 3);
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 3; ++j) CHECK(z(i, j) == 0.0);

  Mat eye = Mat::identity(3);
  CHECK(eye(0, 0) == 1.0);
  CHECK(eye(0, 1) == 0.0);
  CHECK(rdot::orthonormality_error(eye) == 0.0);

  Mat a(2, 3, {1, 2, 3, 4, 5, 6});
  Mat at = a.transposed();
  CHECK(at.rows() == 3);
  CHECK(at(0, 1) == 4.0);
  CHECK(at(2, 0) == 3.0);
  CHECK(a.all_finite());
  a(1, 2) = std::nan("");
  CHECK_FALSE(a.all_finite());
}

TEST_CASE("matrix multiply and subtract") {
  Mat a(2, 2, {1, 2, 3, 4});
  Mat b(2, 2, {5, 6, 7, 8});
  Mat c = a * b;
  CHECK(c(0, 0) == 19.0);
  CHECK(c(0, 1) == 22.0);
  CHECK(c(1, 0) == 43.0);
  CHECK(c(1, 1) == 50.0);

  Mat d = b - a;
  CHECK(d(0, 0) == 4.0);
  CHECK(rdot::max_abs_diff(a, a) == 0.0);

  Mat wrong(3, 2);
  try {
    (void)(a * wrong);
    FAIL("expected DimensionMismatch");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kDimensionMismatch);
  }
}

TEST_CASE("sym_eig on diagonal and analytic 2x2") {
  Mat d(3, 3);
  d(0, 0) = 5.0;
  d(1, 1) = -1.0;
  d(2, 2) = 2.0;
  auto eig = rdot::sym_eig(d);
  REQUIRE(eig.values.size() == 3);
  CHECK(eig.values[0] == doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(eig.values[2] == doctest::Approx(5.0).epsilon(1e-12));

  Mat s(2, 2, {2, 1, 1, 2});
  auto e2 = rdot::sym_eig(s);
  CHECK(e2.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(e2.values[1] == doctest::Approx(3.0).epsilon(1e-12));
  const double r = 1.0 / std::sqrt(2.0);
  // Sign convention: first entry of each eigenvector is positive.
  CHECK(e2.vectors(0, 0) == doctest::Approx(r).epsilon(1e-12));
  CHECK(e2.vectors(1, 0) == doctest::Approx(-r).epsilon(1e-12));
  CHECK(e2.vectors(0, 1) == doctest::Approx(r).epsilon(1e-12));
  CHECK(e2.vectors(1, 1) == doctest::Approx(r).epsilon(1e-12));
}

TEST_CASE("sym_eig reconstructs random symmetric matrices") {
  rdot::Xoshiro256pp rng(99);
  for (int trial = 0; trial < 5; ++trial) {
    const int n = 8;
    Mat s(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j) {
        const double v = rng.gaussian();
        s(i, j) = v;
        s(j, i) = v;
      }
    auto eig = rdot::sym_eig(s);
    CHECK(rdot::orthonormality_error(eig.vectors) < 1e-10);
    for (size_t k = 1; k < eig.values.size(); ++k)
      CHECK(eig.values[k - 1] <= eig.values[k]);
    // S * V == V * diag(values)
    Mat sv = s * eig.vectors;
    Mat vl = eig.vectors;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) vl(i, j) *= eig.values[size_t(j)];
    CHECK(rdot::max_abs_diff(sv, vl) < 1e-9);
  }
}

TEST_CASE("sym_eig rejects non-symmetric input") {
  Mat s(2, 2, {1, 2, 3, 4});
  try {
    rdot::sym_eig(s);
    FAIL("expected NonSymmetric");
  } catch (const rdot::Error& e) {
    CHECK(e.code() == rdot::ErrorCode::kNonSymmetric);
  }
}

TEST_CASE("kron known example") {
  Mat a(2, 2, {1, 2, 3, 4});
  Mat b(2, 2, {0, 5, 6, 7});
  Mat k = rdot::kron(a, b);
  REQUIRE(k.rows() == 4);
  REQUIRE(k.cols() == 4);
  CHECK(k(0, 0) == 0.0);
  CHECK(k(0, 1) == 5.0);
  CHECK(k(1, 0) == 6.0);
  CHECK(k(1, 1) == 7.0);
  CHECK(k(0, 2) == 0.0);
  CHECK(k(0, 3) == 10.0);
  CHECK(k(2, 2) == 0.0);
  CHECK(k(3, 3) == 28.0);
  CHECK(k(2, 0) == 0.0);
  CHECK(k(3, 1) == 21.0);
}

TEST_CASE("vec is column-stacking and unvec round-trips") {
  Mat x(2, 3, {1, 2, 3, 4, 5, 6});
  auto v = rdot::vec(x);
  REQUIRE(v.size() == 6);
  // Column stacking: (i,j) -> j*rows + i.
  CHECK(v[0] == 1.0);
  CHECK(v[1] == 4.0);
  CHECK(v[2] == 2.0);
  CHECK(v[3] == 5.0);
  CHECK(v[4] == 3.0);
  CHECK(v[5] == 6.0);
  CHECK(rdot::unvec(v, 2, 3) == x);
}

TEST_CASE("kron-vec identity vec(A X B^T) == (B kron A) vec(X)") {
  rdot::Xoshiro256pp rng(7);
  const int n = 4;
  Mat a = testutil::random_block(n, rng, 1.0);
  Mat b = testutil::random_block(n, rng, 1.0);
  Mat x = testutil::random_block(n, rng, 1.0);

  Mat axbt = a * x * b.transposed();
  auto lhs = rdot::vec(axbt);

  Mat k = rdot::kron(b, a);
  auto vx = rdot::vec(x);
  std::vector<double> rhs(vx.size(), 0.0);
  for (int i = 0; i < k.rows(); ++i) {
    double acc = 0.0;
    for (int j = 0; j < k.cols(); ++j) acc += k(i, j) * vx[size_t(j)];
    rhs[size_t(i)] = acc;
  }
  for (size_t i = 0; i < lhs.size(); ++i)
    CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-12));
}
