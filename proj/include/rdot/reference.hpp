#ifndef RDOT_REFERENCE_HPP
#define RDOT_REFERENCE_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "rdot/codec.hpp"
#include "rdot/dataset.hpp"
#include "rdot/klt.hpp"
#include "rdot/mat.hpp"
#include "rdot/path_graph.hpp"
#include "rdot/trainer.hpp"
#include "rdot/transform.hpp"

/// Single-threaded reference twins of every OpenMP-parallel entry point.
/// Each twin runs the same per-item arithmetic in plain loops and must
/// produce bit-identical results at any thread count; the test suite and
/// the benchmark target hold the two sides against each other.
namespace rdot::ref {

CovEstimate sample_covariance(const std::vector<std::vector<double>>& vectors);
std::pair<Mat, Mat> separable_klt(const std::vector<Mat>& blocks);
PathGraphParams learn_path_graph(const std::vector<std::vector<double>>& samples, double beta);
std::pair<Mat, Mat> learn_spgt(const std::vector<Mat>& blocks, double beta);
ScanOrder scan_order_from_variance(const std::vector<Mat>& blocks, const PrimaryKind& primary);
ClusterAssign assign_clusters(const std::vector<Mat>& blocks, const TransformBank& bank,
                              const QuantConfig& q);
double rd_total(const std::vector<Mat>& blocks, const TransformBank& bank,
                const ClusterAssign& assign, const QuantConfig& q);
ResidualDataset synth_residuals(ModeLabel mode, int count, int block_size,
                                const SynthParams& params, uint64_t seed);
std::vector<RDPoint> evaluate(const std::vector<Mat>& blocks, std::span<const TransformSpec> specs,
                              int signal_bits, std::span<const int> qps);

}  // namespace rdot::ref

#endif  // RDOT_REFERENCE_HPP
