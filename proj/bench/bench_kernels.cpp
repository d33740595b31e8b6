// Benchmarks holding the OpenMP kernels against their single-threaded
// reference twins on identical fixtures. Run with --benchmark_filter=...
// and RDOT_THREADS (or the /threads:N suffix baked in below) to see how
// the parallel versions scale.

#include <benchmark/benchmark.h>

#include <cstdint>
#include <utility>
#include <vector>

#include "rdot/codec.hpp"
#include "rdot/dataset.hpp"
#include "rdot/klt.hpp"
#include "rdot/mat.hpp"
#include "rdot/parallel.hpp"
#include "rdot/reference.hpp"
#include "rdot/rng.hpp"
#include "rdot/trainer.hpp"
#include "rdot/transform.hpp"

namespace {

using rdot::Mat;

constexpr int kBlockSize = 8;
constexpr int kBlocks = 2000;

const std::vector<Mat>& fixture_blocks() {
  static const std::vector<Mat> blocks =
      rdot::synth_residuals(rdot::ModeLabel::kD45, kBlocks, kBlockSize,
                            rdot::default_synth_params(rdot::ModeLabel::kD45), 7)
          .blocks;
  return blocks;
}

const std::vector<std::vector<double>>& fixture_vectors() {
  static const std::vector<std::vector<double>> vectors = [] {
    std::vector<std::vector<double>> v(4000);
    rdot::Xoshiro256pp rng(11);
    for (auto& s : v) {
      s.resize(16);
      for (auto& x : s) x = 20.0 * rng.gaussian();
    }
    return v;
  }();
  return vectors;
}

const rdot::TransformBank& fixture_bank() {
  static const rdot::TransformBank bank = [] {
    rdot::par::set_thread_count(1);
    rdot::TransformBank b =
        rdot::make_initial_bank(fixture_blocks(), rdot::Learner::kSpgt, {}, "D_45");
    rdot::par::set_thread_count(0);
    return b;
  }();
  return bank;
}

void set_threads_from_range(benchmark::State& state) {
  rdot::par::set_thread_count(int(state.range(0)));
}

// --- sample_covariance ------------------------------------------------------

void BM_SampleCovarianceRef(benchmark::State& state) {
  const auto& v = fixture_vectors();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::ref::sample_covariance(v));
}
BENCHMARK(BM_SampleCovarianceRef);

void BM_SampleCovariance(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& v = fixture_vectors();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::sample_covariance(v));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_SampleCovariance)->Arg(1)->Arg(2)->Arg(4);

// --- separable_klt ----------------------------------------------------------

void BM_SeparableKltRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::ref::separable_klt(blocks));
}
BENCHMARK(BM_SeparableKltRef);

void BM_SeparableKlt(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::separable_klt(blocks));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_SeparableKlt)->Arg(1)->Arg(2)->Arg(4);

// --- learn_spgt -------------------------------------------------------------

void BM_LearnSpgtRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::ref::learn_spgt(blocks, 1e-4));
}
BENCHMARK(BM_LearnSpgtRef);

void BM_LearnSpgt(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::learn_spgt(blocks, 1e-4));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_LearnSpgt)->Arg(1)->Arg(2)->Arg(4);

// --- scan_order_from_variance -----------------------------------------------

void BM_ScanOrderRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  const auto primary = rdot::dct_primary(kBlockSize);
  for (auto _ : state)
    benchmark::DoNotOptimize(rdot::ref::scan_order_from_variance(blocks, primary));
}
BENCHMARK(BM_ScanOrderRef);

void BM_ScanOrder(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  const auto primary = rdot::dct_primary(kBlockSize);
  for (auto _ : state) benchmark::DoNotOptimize(rdot::scan_order_from_variance(blocks, primary));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_ScanOrder)->Arg(1)->Arg(2)->Arg(4);

// --- assign_clusters + rd_total ---------------------------------------------

void BM_AssignClustersRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  const auto q = rdot::QuantConfig::from_qp(28);
  for (auto _ : state) benchmark::DoNotOptimize(rdot::ref::assign_clusters(blocks, bank, q));
}
BENCHMARK(BM_AssignClustersRef);

void BM_AssignClusters(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  const auto q = rdot::QuantConfig::from_qp(28);
  for (auto _ : state) benchmark::DoNotOptimize(rdot::assign_clusters(blocks, bank, q));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_AssignClusters)->Arg(1)->Arg(2)->Arg(4);

void BM_RdTotalRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  const auto q = rdot::QuantConfig::from_qp(28);
  const auto assign = rdot::ref::assign_clusters(blocks, bank, q);
  for (auto _ : state) benchmark::DoNotOptimize(rdot::ref::rd_total(blocks, bank, assign, q));
}
BENCHMARK(BM_RdTotalRef);

void BM_RdTotal(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  const auto q = rdot::QuantConfig::from_qp(28);
  const auto assign = rdot::ref::assign_clusters(blocks, bank, q);
  for (auto _ : state) benchmark::DoNotOptimize(rdot::rd_total(blocks, bank, assign, q));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_RdTotal)->Arg(1)->Arg(2)->Arg(4);

// --- synth_residuals ----------------------------------------------------------

void BM_SynthResidualsRef(benchmark::State& state) {
  const auto params = rdot::default_synth_params(rdot::ModeLabel::kV);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        rdot::ref::synth_residuals(rdot::ModeLabel::kV, kBlocks, kBlockSize, params, 99));
}
BENCHMARK(BM_SynthResidualsRef);

void BM_SynthResiduals(benchmark::State& state) {
  set_threads_from_range(state);
  const auto params = rdot::default_synth_params(rdot::ModeLabel::kV);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        rdot::synth_residuals(rdot::ModeLabel::kV, kBlocks, kBlockSize, params, 99));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_SynthResiduals)->Arg(1)->Arg(2)->Arg(4);

// --- evaluate -----------------------------------------------------------------

const std::vector<int>& eval_qps() {
  static const std::vector<int> qps = {26, 28, 30};
  return qps;
}

void BM_EvaluateRef(benchmark::State& state) {
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  for (auto _ : state)
    benchmark::DoNotOptimize(rdot::ref::evaluate(blocks, bank.specs, 3, eval_qps()));
}
BENCHMARK(BM_EvaluateRef);

void BM_Evaluate(benchmark::State& state) {
  set_threads_from_range(state);
  const auto& blocks = fixture_blocks();
  const auto& bank = fixture_bank();
  for (auto _ : state) benchmark::DoNotOptimize(rdot::evaluate(blocks, bank, eval_qps()));
  rdot::par::set_thread_count(0);
}
BENCHMARK(BM_Evaluate)->Arg(1)->Arg(2)->Arg(4);

}  // namespace

BENCHMARK_MAIN();
