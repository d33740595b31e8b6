#ifndef RDOT_TRAINER_HPP
#define RDOT_TRAINER_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdot/mat.hpp"
#include "rdot/transform.hpp"

namespace rdot {

/// Uniform quantizer scale and Lagrange multiplier derived from QP:
///   step   = 2^((qp - 12) / 6)
///   lambda = 0.85 * 2^((qp - 12) / 3) = 0.85 * step^2
struct QuantConfig {
  int qp = 0;
  double step = 0.0;
  double lambda = 0.0;

  static QuantConfig from_qp(int qp);
};

/// level = round-half-away-from-zero(y / step); dequantize = level * step.
std::vector<int32_t> quantize(std::span<const double> y, const QuantConfig& q);
std::vector<double> dequantize(std::span<const int32_t> levels, const QuantConfig& q);

/// Training-time RD cost of coding one block with one spec:
/// pixel-domain SSE of the reconstruction plus lambda times the l0 rate
/// proxy (count of nonzero quantized levels).
struct RdCost {
  double distortion = 0.0;
  int rate_proxy = 0;
  double cost = 0.0;
};

RdCost rd_cost(const Mat& x, const TransformSpec& spec, const QuantConfig& q);

/// Per-block slot indices in {0..5}; the clusters S_j are the preimages.
struct ClusterAssign {
  std::vector<int> assignment;

  std::array<int, kNumSlots> sizes() const;
};

enum class Learner { kSpgt, kSepKlt };

struct TrainOptions {
  int max_iter = 100;
  double tol = 1e-6;      // relative RD_Total change that counts as converged
  double beta = 1e-4;     // path-graph regularizer
  int n_secondary = 0;    // 0 picks the default N^2/4
};

/// Per-iteration RD_Total trace plus the final clustering outcome.
struct TrainReport {
  std::vector<double> iterations;  // RD_Total after each update+assign pass
  std::array<int, kNumSlots> cluster_sizes{};
  bool converged = false;
  int qp = 0;
  double lambda = 0.0;

  std::string to_json() const;
};

struct TrainResult {
  TransformBank bank;
  ClusterAssign assign;
  TrainReport report;
};

/// Assigns every block to the slot minimizing rd_cost; ties break toward
/// the lowest slot index. Deterministic and parallel across blocks.
ClusterAssign assign_clusters(const std::vector<Mat>& blocks, const TransformBank& bank,
                              const QuantConfig& q);

/// One unguarded transform-update sweep at a fixed assignment: relearns the
/// slot-2/5 shared primary from S2 union S5 with the chosen learner, and each
/// secondary (slots 3..5) from its own cluster's first-n scanned
/// coefficients. Empty clusters leave their slot untouched; scans stay
/// frozen.
TransformBank update_transforms(const std::vector<Mat>& blocks, const ClusterAssign& assign,
                                const TransformBank& bank, Learner learner,
                                const TrainOptions& opt = {});

/// RD_Total: sum of per-block rd_cost under the given assignment, folded
/// over blocks in index order.
double rd_total(const std::vector<Mat>& blocks, const TransformBank& bank,
                const ClusterAssign& assign, const QuantConfig& q);

/// Deterministic starting bank: DCT and ADST slots, a learned slot trained
/// on the full dataset, per-primary variance scans (frozen from here on),
/// and secondaries bootstrapped from a full-dataset KLT under each primary.
TransformBank make_initial_bank(const std::vector<Mat>& blocks, Learner learner,
                                const TrainOptions& opt, std::string mode_label = {});

/// Lloyd alternation over all six slots: guarded update_transforms (an
/// update that would raise RD_Total is rolled back for that slot), then
/// assign_clusters, until the relative RD_Total drop falls below tol or
/// max_iter passes run. The reported RD_Total sequence is non-increasing.
TrainResult lloyd_train(const std::vector<Mat>& blocks, TransformBank bank, const QuantConfig& q,
                        Learner learner, const TrainOptions& opt = {});

/// Joint pipeline: initial bank, then one six-slot lloyd_train.
TrainResult train_joint(const std::vector<Mat>& blocks, const QuantConfig& q, Learner learner,
                        const TrainOptions& opt = {});

/// Tree-structured pipeline: stage 1 runs Lloyd over the three primary-only
/// slots; stage 2 fits each secondary by an independent two-slot Lloyd
/// restricted to its stage-1 cluster; a final six-way assignment produces
/// the reported RD_Total (appended to the stage-1 trace).
TrainResult train_tree(const std::vector<Mat>& blocks, const QuantConfig& q, Learner learner,
                       const TrainOptions& opt = {});

}  // namespace rdot

#endif  // RDOT_TRAINER_HPP
