#ifndef RDOT_SRC_KERNELS_HPP
#define RDOT_SRC_KERNELS_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include "rdot/dataset.hpp"
#include "rdot/error.hpp"
#include "rdot/mat.hpp"
#include "rdot/path_graph.hpp"
#include "rdot/rng.hpp"

// Serial building blocks shared between the parallel implementations and
// their serial reference twins, so both sides compute identical values.
namespace rdot::detail {

inline constexpr double kWeightFloor = 1e-8;
inline constexpr double kWeightCap = 1e8;
inline constexpr double kFlatNodeTol = 1e-12;

// Turns accumulated per-edge mean squared differences and the node-1 mean
// square into graph parameters, applying the degenerate-data fallbacks.
inline PathGraphParams params_from_stats(int n, const std::vector<double>& edge_mean_sq,
                                         double node1_mean_sq, double total_energy, double beta) {
  PathGraphParams g;
  g.n_nodes = n;
  g.edge_weights.assign(size_t(n) - 1, 1.0);
  g.self_loop = 0.0;
  if (total_energy == 0.0) return g;  // all-zero data: unit-weight path (DCT)

  for (int i = 0; i < n - 1; ++i) {
    const double w = 1.0 / (edge_mean_sq[i] + beta);
    g.edge_weights[i] = std::clamp(w, kWeightFloor, kWeightCap);
  }
  if (node1_mean_sq >= kFlatNodeTol) g.self_loop = 1.0 / node1_mean_sq;
  return g;
}

// Covariance over vec-ordered pixel pairs: displacement is split into
// components along/across the mode angle and each decays exponentially.
inline Mat synth_covariance(const SynthComponent& c, int n) {
  constexpr double kPi = 3.14159265358979323846;
  const double th = c.angle_degrees * kPi / 180.0;
  const double ca = std::cos(th), sa = std::sin(th);
  const int nn = n * n;
  Mat cov(nn, nn);
  for (int p = 0; p < nn; ++p) {
    const int i = p % n, j = p / n;
    for (int q = p; q < nn; ++q) {
      const int i2 = q % n, j2 = q / n;
      const double dx = double(j - j2), dy = double(i - i2);
      const double dpar = dx * ca + dy * sa;
      const double dperp = -dx * sa + dy * ca;
      const double v = c.sigma * c.sigma * std::pow(c.rho_along, std::abs(dpar)) *
                       std::pow(c.rho_across, std::abs(dperp));
      cov(p, q) = v;
      cov(q, p) = v;
    }
  }
  return cov;
}

inline bool cholesky(const Mat& a, Mat& l) {
  const int n = a.rows();
  l = Mat(n, n);
  for (int j = 0; j < n; ++j) {
    double d = a(j, j);
    for (int k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
    if (!(d > 0.0)) return false;
    l(j, j) = std::sqrt(d);
    for (int i = j + 1; i < n; ++i) {
      double s = a(i, j);
      for (int k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
      l(i, j) = s / l(j, j);
    }
  }
  return true;
}

// Cholesky with a jitter ladder for numerically semidefinite covariances.
inline Mat chol_psd(const Mat& a) {
  const int n = a.rows();
  double trace = 0.0;
  for (int i = 0; i < n; ++i) trace += a(i, i);
  if (trace == 0.0) return Mat(n, n);  // sigma = 0: zero factor, zero blocks

  Mat l;
  if (cholesky(a, l)) return l;
  for (double eps : {1e-12, 1e-10, 1e-8, 1e-6, 1e-4}) {
    Mat jittered = a;
    const double bump = eps * trace / double(n);
    for (int i = 0; i < n; ++i) jittered(i, i) += bump;
    if (cholesky(jittered, l)) return l;
  }
  throw Error(ErrorCode::kInvalidParams, "covariance is not positive semidefinite");
}

// Per-block synthesis kernel shared by the parallel generator and its
// serial reference twin: one counter-seeded stream per (seed, index), an
// optional mixture draw, then z = L g rounded into the +/-1023 range.
inline Mat synth_block(const Mat& chol_main, const Mat* chol_second, double weight, uint64_t seed,
                       uint64_t index, int n) {
  Xoshiro256pp rng = Xoshiro256pp::for_block(seed, index);
  const Mat* l = &chol_main;
  if (chol_second != nullptr && rng.uniform() <= weight) l = chol_second;

  const int nn = n * n;
  std::vector<double> g(static_cast<size_t>(nn));
  for (double& v : g) v = rng.gaussian();

  Mat block(n, n);
  for (int p = 0; p < nn; ++p) {
    double z = 0.0;
    for (int k = 0; k <= p; ++k) z += (*l)(p, k) * g[size_t(k)];
    const long long r = std::llround(z);
    block(p % n, p / n) = double(r < -1023 ? -1023 : (r > 1023 ? 1023 : r));
  }
  return block;
}

}  // namespace rdot::detail

#endif  // RDOT_SRC_KERNELS_HPP
