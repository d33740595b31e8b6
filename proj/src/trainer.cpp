#include "rdot/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <json.hpp>

#include "rdot/error.hpp"
#include "rdot/klt.hpp"
#include "rdot/parallel.hpp"
#include "rdot/path_graph.hpp"

namespace rdot {

QuantConfig QuantConfig::from_qp(int qp) {
  QuantConfig q;
  q.qp = qp;
  q.step = std::exp2((qp - 12) / 6.0);
  q.lambda = 0.85 * std::exp2((qp - 12) / 3.0);
  return q;
}

std::vector<int32_t> quantize(std::span<const double> y, const QuantConfig& q) {
  if (!(q.step > 0.0)) {
    throw Error(ErrorCode::kInvalidParams, "quantizer step must be positive");
  }
  std::vector<int32_t> levels(y.size());
  for (size_t i = 0; i < y.size(); ++i) {
    levels[i] = int32_t(std::llround(y[i] / q.step));
  }
  return levels;
}

std::vector<double> dequantize(std::span<const int32_t> levels, const QuantConfig& q) {
  std::vector<double> y(levels.size());
  for (size_t i = 0; i < levels.size(); ++i) y[i] = double(levels[i]) * q.step;
  return y;
}

RdCost rd_cost(const Mat& x, const TransformSpec& spec, const QuantConfig& q) {
  const std::vector<double> y = forward(x, spec);
  const std::vector<int32_t> levels = quantize(y, q);
  const Mat xr = inverse(dequantize(levels, q), spec);
  RdCost c;
  for (int i = 0; i < x.rows(); ++i)
    for (int j = 0; j < x.cols(); ++j) {
      const double d = x(i, j) - xr(i, j);
      c.distortion += d * d;
    }
  for (int32_t l : levels) c.rate_proxy += (l != 0);
  c.cost = c.distortion + q.lambda * double(c.rate_proxy);
  return c;
}

std::array<int, kNumSlots> ClusterAssign::sizes() const {
  std::array<int, kNumSlots> s{};
  for (int a : assignment) {
    if (a < 0 || a >= kNumSlots) {
      throw Error(ErrorCode::kInvalidParams, "slot index out of range");
    }
    ++s[size_t(a)];
  }
  return s;
}

namespace {

// Assignment state of one Lloyd pass: the per-block winning slot and cost,
// plus the full block x slot cost matrix (inactive slots hold +inf) so a
// transform proposal only has to re-score the columns it touched.
struct PassResult {
  std::vector<int> slot;
  std::vector<double> cost;
  std::vector<double> matrix;  // blocks.size() * kNumSlots, row-major
};

// Index-order fold; every RD_Total comparison in the trainer goes through
// this one sum so totals are exactly reproducible and comparable.
double fold(std::span<const double> costs) {
  double s = 0.0;
  for (double c : costs) s += c;
  return s;
}

// Arg-min over the active columns of one matrix row; ties break toward the
// lower slot index (active lists slots in ascending order).
void argmin_row(const double* row, std::span<const int> active, int& slot, double& cost) {
  slot = active[0];
  cost = row[active[0]];
  for (size_t a = 1; a < active.size(); ++a) {
    const double c = row[active[a]];
    if (c < cost) {
      cost = c;
      slot = active[a];
    }
  }
}

PassResult assign_pass(const std::vector<Mat>& blocks, const TransformBank& bank,
                       const QuantConfig& q, std::span<const int> active) {
  PassResult r;
  r.slot.resize(blocks.size());
  r.cost.resize(blocks.size());
  r.matrix.assign(blocks.size() * kNumSlots, std::numeric_limits<double>::infinity());
  const int64_t m = int64_t(blocks.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int64_t b = 0; b < m; ++b) {
    double* row = r.matrix.data() + size_t(b) * kNumSlots;
    for (int s : active) {
      row[s] = rd_cost(blocks[size_t(b)], bank.specs[size_t(s)], q).cost;
    }
    argmin_row(row, active, r.slot[size_t(b)], r.cost[size_t(b)]);
  }
  return r;
}

std::vector<Mat> gather_blocks(const std::vector<Mat>& blocks, std::span<const int> slot,
                               int want_a, int want_b = -1) {
  std::vector<Mat> out;
  for (size_t b = 0; b < blocks.size(); ++b) {
    if (slot[b] == want_a || slot[b] == want_b) out.push_back(blocks[b]);
  }
  return out;
}

std::vector<std::vector<double>> head_coeffs(const std::vector<Mat>& blocks,
                                             const PrimaryKind& primary, const ScanOrder& scan,
                                             int n) {
  const int nb = blocks.front().rows();
  std::vector<std::vector<double>> out(blocks.size());
  const int64_t m = int64_t(blocks.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int64_t b = 0; b < m; ++b) {
    const Mat xh = apply_primary(blocks[size_t(b)], primary);
    std::vector<double> h(static_cast<size_t>(n));
    for (int k = 0; k < n; ++k) {
      const uint32_t idx = scan.perm[size_t(k)];
      h[size_t(k)] = xh(int(idx) % nb, int(idx) / nb);
    }
    out[size_t(b)] = std::move(h);
  }
  return out;
}

PrimaryKind learn_primary(const std::vector<Mat>& blocks, Learner learner, double beta) {
  auto [col, row] =
      learner == Learner::kSpgt ? learn_spgt(blocks, beta) : separable_klt(blocks);
  return learned_primary(std::move(col), std::move(row));
}

struct Scope {
  std::vector<int> active;
  bool update_primary = false;
  std::vector<int> secondary_slots;
};

// Re-scores the affected active columns under the candidate bank, re-runs
// the per-block arg-min, and swaps the candidate in only when the
// index-order fold of the resulting RD_Total does not increase. The guard
// judges the proposal on the objective actually reported (cost after
// re-clustering): the closed-form SPGT/KLT refits optimize energy
// compaction, not the quantized RD cost, so they may look worse at the
// frozen assignment yet win once blocks re-sort around them.
bool try_accept(const std::vector<Mat>& blocks, PassResult& cur, TransformBank& bank,
                TransformBank candidate, std::initializer_list<int> affected, const QuantConfig& q,
                std::span<const int> active) {
  std::array<bool, kNumSlots> hit{};
  for (int s : affected) {
    if (std::find(active.begin(), active.end(), s) != active.end()) hit[size_t(s)] = true;
  }
  PassResult next = cur;
  const int64_t m = int64_t(blocks.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int64_t b = 0; b < m; ++b) {
    double* row = next.matrix.data() + size_t(b) * kNumSlots;
    for (int s = 0; s < kNumSlots; ++s) {
      if (hit[size_t(s)]) {
        row[s] = rd_cost(blocks[size_t(b)], candidate.specs[size_t(s)], q).cost;
      }
    }
    argmin_row(row, active, next.slot[size_t(b)], next.cost[size_t(b)]);
  }
  if (fold(next.cost) <= fold(cur.cost)) {
    bank = std::move(candidate);
    cur = std::move(next);
    return true;
  }
  return false;
}

struct LloydOutcome {
  std::vector<int> slot;
  std::vector<double> iterations;
  bool converged = false;
};

LloydOutcome lloyd_core(const std::vector<Mat>& blocks, TransformBank& bank, const QuantConfig& q,
                        Learner learner, const TrainOptions& opt, const Scope& scope);

// One primary-refit proposal: relearn the shared slot-2/5 primary from the
// given sample, refresh slot 5's secondary (fit on top of the old primary)
// from its own cluster so the pair stays coherent, and guard the result.
void propose_primary(const std::vector<Mat>& blocks, PassResult& cur, TransformBank& bank,
                     const QuantConfig& q, Learner learner, const TrainOptions& opt,
                     const Scope& scope, const std::vector<Mat>& sample) {
  if (sample.empty()) return;
  TransformBank cand = bank;
  cand.specs[2].primary = learn_primary(sample, learner, opt.beta);
  cand.specs[5].primary = cand.specs[2].primary;
  const std::vector<Mat> s5 = gather_blocks(blocks, cur.slot, 5);
  if (!s5.empty()) {
    cand.specs[5].secondary = secondary_klt(
        head_coeffs(s5, cand.specs[5].primary, cand.specs[5].scan, cand.specs[5].n));
  }
  try_accept(blocks, cur, bank, std::move(cand), {2, 5}, q, scope.active);
}

void guarded_update(const std::vector<Mat>& blocks, PassResult& cur, TransformBank& bank,
                    const QuantConfig& q, Learner learner, const TrainOptions& opt,
                    const Scope& scope) {
  const bool full_scope = scope.active.size() == size_t(kNumSlots);
  if (full_scope) {
    // Stage-wise candidate: run the nested two-stage descent from the
    // current bank and offer its final bank to the guard. On the first
    // sweep the bank is still the shared starting point, so joint training
    // refines the better of the two descents and a stage-wise pass can
    // never finish ahead of it; on later sweeps the rebuilt descent acts
    // as a coordinated escape move from the current clustering.
    TransformBank cand = bank;
    const Scope stage1{{0, 1, 2}, true, {}};
    const LloydOutcome o1 = lloyd_core(blocks, cand, q, learner, opt, stage1);
    for (int k = 0; k < 3; ++k) {
      const std::vector<Mat> sub = gather_blocks(blocks, o1.slot, k);
      if (sub.empty()) continue;
      const Scope stage2{{k, k + 3}, false, {k + 3}};
      lloyd_core(sub, cand, q, learner, opt, stage2);
    }
    try_accept(blocks, cur, bank, std::move(cand), {2, 3, 4, 5}, q, scope.active);
  }
  if (scope.update_primary) {
    propose_primary(blocks, cur, bank, q, learner, opt, scope,
                    gather_blocks(blocks, cur.slot, 2, 5));
    if (full_scope) {
      // Stage-structured candidates built from the partition by preferred
      // primary alone (judged by the cached slot 0..2 costs): they see past
      // the six-way fragmentation, which is what starves the slot-wise
      // refits of samples on hard mixtures.
      static constexpr int kPrimaryOnly[] = {0, 1, 2};
      std::array<std::vector<Mat>, 3> pref;
      for (size_t b = 0; b < blocks.size(); ++b) {
        int s;
        double c;
        argmin_row(cur.matrix.data() + b * kNumSlots, kPrimaryOnly, s, c);
        pref[size_t(s)].push_back(blocks[b]);
      }
      propose_primary(blocks, cur, bank, q, learner, opt, scope, pref[2]);

      // Full rebuild in one move: primary from its preference cluster and
      // every secondary from its branch's preference cluster.
      TransformBank cand = bank;
      if (!pref[2].empty()) {
        cand.specs[2].primary = learn_primary(pref[2], learner, opt.beta);
        cand.specs[5].primary = cand.specs[2].primary;
      }
      for (int k = 0; k < 3; ++k) {
        if (pref[size_t(k)].empty()) continue;
        TransformSpec& spec = cand.specs[size_t(k) + 3];
        spec.secondary =
            secondary_klt(head_coeffs(pref[size_t(k)], spec.primary, spec.scan, spec.n));
      }
      try_accept(blocks, cur, bank, std::move(cand), {2, 3, 4, 5}, q, scope.active);

      // Branch-refined candidates: run the two-slot inner refinement on
      // each preference branch (the nested descent a stage-wise trainer
      // performs) and propose the refined secondary it settles on.
      for (int k = 0; k < 3; ++k) {
        if (pref[size_t(k)].empty()) continue;
        TransformBank refined = bank;
        const Scope branch{{k, k + 3}, false, {k + 3}};
        lloyd_core(pref[size_t(k)], refined, q, learner, opt, branch);
        TransformBank prop = bank;
        prop.specs[size_t(k) + 3].secondary = refined.specs[size_t(k) + 3].secondary;
        try_accept(blocks, cur, bank, std::move(prop), {k + 3}, q, scope.active);
      }
    }
  }
  for (int s : scope.secondary_slots) {
    // Two candidate fits per secondary: one from the slot's own cluster and
    // one from its primary branch (S_{s-3} u S_s). The branch fit sees the
    // blocks that share the primary but currently skip the secondary, which
    // keeps the six-way clustering from fragmenting the sample pool the
    // secondary is estimated from.
    const std::vector<Mat> own = gather_blocks(blocks, cur.slot, s);
    const std::vector<Mat> branch = gather_blocks(blocks, cur.slot, s - 3, s);
    for (const std::vector<Mat>* ds : {&own, &branch}) {
      if (ds->empty() || (ds == &branch && branch.size() == own.size())) continue;
      TransformBank cand = bank;
      cand.specs[size_t(s)].secondary = secondary_klt(head_coeffs(
          *ds, cand.specs[size_t(s)].primary, cand.specs[size_t(s)].scan, cand.specs[size_t(s)].n));
      try_accept(blocks, cur, bank, std::move(cand), {s}, q, scope.active);
    }
  }
  if (full_scope) {
    // Coordinated proposal: the whole classic Lloyd update as one move.
    // Slot-wise proposals cannot accept coupled changes whose pieces look
    // bad in isolation; this one can.
    ClusterAssign a;
    a.assignment = cur.slot;
    try_accept(blocks, cur, bank, update_transforms(blocks, a, bank, learner, opt), {2, 3, 4, 5},
               q, scope.active);
  }
}

void check_options(const TrainOptions& opt) {
  if (opt.max_iter < 1) throw Error(ErrorCode::kInvalidParams, "max_iter must be >= 1");
  if (!(opt.tol > 0.0)) throw Error(ErrorCode::kInvalidParams, "tol must be > 0");
}

LloydOutcome lloyd_core(const std::vector<Mat>& blocks, TransformBank& bank, const QuantConfig& q,
                        Learner learner, const TrainOptions& opt, const Scope& scope) {
  check_options(opt);
  PassResult cur = assign_pass(blocks, bank, q, scope.active);
  double prev = fold(cur.cost);
  LloydOutcome out;
  for (int it = 0; it < opt.max_iter; ++it) {
    // Accepted proposals fold their re-clustering into `cur`, so after the
    // update sweep `cur` is exactly assign_pass(bank) for the new bank.
    guarded_update(blocks, cur, bank, q, learner, opt, scope);
    const double total = fold(cur.cost);
    out.iterations.push_back(total);
    if (prev - total <= opt.tol * std::max(std::abs(prev), 1.0)) {
      out.converged = true;
      break;
    }
    prev = total;
  }
  out.slot = std::move(cur.slot);
  return out;
}

void check_blocks(const std::vector<Mat>& blocks) {
  if (blocks.empty()) throw Error(ErrorCode::kEmptyInput, "no training blocks");
  const int n = blocks.front().rows();
  for (const Mat& b : blocks) {
    if (b.rows() != n || b.cols() != n) {
      throw Error(ErrorCode::kDimensionMismatch, "blocks must share one square size");
    }
  }
}

TrainResult pack_result(TransformBank bank, std::vector<int> slot, std::vector<double> iterations,
                        bool converged, const QuantConfig& q) {
  TrainResult r;
  r.bank = std::move(bank);
  r.assign.assignment = std::move(slot);
  r.report.iterations = std::move(iterations);
  r.report.cluster_sizes = r.assign.sizes();
  r.report.converged = converged;
  r.report.qp = q.qp;
  r.report.lambda = q.lambda;
  return r;
}

}  // namespace

ClusterAssign assign_clusters(const std::vector<Mat>& blocks, const TransformBank& bank,
                              const QuantConfig& q) {
  check_blocks(blocks);
  static constexpr int kAll[] = {0, 1, 2, 3, 4, 5};
  ClusterAssign a;
  a.assignment = assign_pass(blocks, bank, q, kAll).slot;
  return a;
}

TransformBank update_transforms(const std::vector<Mat>& blocks, const ClusterAssign& assign,
                                const TransformBank& bank, Learner learner,
                                const TrainOptions& opt) {
  check_blocks(blocks);
  if (assign.assignment.size() != blocks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "assignment does not cover the blocks");
  }
  assign.sizes();  // range-checks the slot indices
  TransformBank out = bank;
  const std::vector<Mat> d = gather_blocks(blocks, assign.assignment, 2, 5);
  if (!d.empty()) {
    out.specs[2].primary = learn_primary(d, learner, opt.beta);
    out.specs[5].primary = out.specs[2].primary;
  }
  for (int s = 3; s < kNumSlots; ++s) {
    const std::vector<Mat> ds = gather_blocks(blocks, assign.assignment, s);
    if (ds.empty()) continue;
    out.specs[size_t(s)].secondary = secondary_klt(head_coeffs(
        ds, out.specs[size_t(s)].primary, out.specs[size_t(s)].scan, out.specs[size_t(s)].n));
  }
  return out;
}

double rd_total(const std::vector<Mat>& blocks, const TransformBank& bank,
                const ClusterAssign& assign, const QuantConfig& q) {
  if (assign.assignment.size() != blocks.size()) {
    throw Error(ErrorCode::kDimensionMismatch, "assignment does not cover the blocks");
  }
  assign.sizes();
  std::vector<double> cost(blocks.size());
  const int64_t m = int64_t(blocks.size());
#pragma omp parallel for schedule(static) num_threads(par::thread_count())
  for (int64_t b = 0; b < m; ++b) {
    cost[size_t(b)] =
        rd_cost(blocks[size_t(b)], bank.specs[size_t(assign.assignment[size_t(b)])], q).cost;
  }
  return fold(cost);
}

TransformBank make_initial_bank(const std::vector<Mat>& blocks, Learner learner,
                                const TrainOptions& opt, std::string mode_label) {
  check_blocks(blocks);
  const int nb = blocks.front().rows();
  const int n = opt.n_secondary > 0 ? opt.n_secondary : (nb * nb) / 4;
  if (n < 1 || n > nb * nb) {
    throw Error(ErrorCode::kInvalidParams, "secondary span n out of range");
  }

  TransformBank bank;
  bank.block_size = nb;
  bank.mode_label = std::move(mode_label);
  const std::array<PrimaryKind, 3> primaries = {dct_primary(nb), adst_primary(nb),
                                                learn_primary(blocks, learner, opt.beta)};
  for (int p = 0; p < 3; ++p) {
    const ScanOrder scan = scan_order_from_variance(blocks, primaries[size_t(p)]);
    // Bootstrapping the secondary from a full-dataset KLT (rather than the
    // identity) keeps slots 3..5 competitive from the first assignment; an
    // identity secondary ties its base slot exactly and would never attract
    // blocks under lowest-index tie-breaking.
    const Mat sec = secondary_klt(head_coeffs(blocks, primaries[size_t(p)], scan, n));
    bank.specs[size_t(p)] = TransformSpec{primaries[size_t(p)], scan, std::nullopt, n};
    bank.specs[size_t(p) + 3] = TransformSpec{primaries[size_t(p)], scan, sec, n};
  }
  return bank;
}

TrainResult lloyd_train(const std::vector<Mat>& blocks, TransformBank bank, const QuantConfig& q,
                        Learner learner, const TrainOptions& opt) {
  check_blocks(blocks);
  const Scope scope{{0, 1, 2, 3, 4, 5}, true, {3, 4, 5}};
  LloydOutcome out = lloyd_core(blocks, bank, q, learner, opt, scope);
  return pack_result(std::move(bank), std::move(out.slot), std::move(out.iterations),
                     out.converged, q);
}

TrainResult train_joint(const std::vector<Mat>& blocks, const QuantConfig& q, Learner learner,
                        const TrainOptions& opt) {
  return lloyd_train(blocks, make_initial_bank(blocks, learner, opt), q, learner, opt);
}

TrainResult train_tree(const std::vector<Mat>& blocks, const QuantConfig& q, Learner learner,
                       const TrainOptions& opt) {
  TransformBank bank = make_initial_bank(blocks, learner, opt);

  const Scope stage1{{0, 1, 2}, true, {}};
  LloydOutcome o1 = lloyd_core(blocks, bank, q, learner, opt, stage1);
  bool converged = o1.converged;

  for (int k = 0; k < 3; ++k) {
    const std::vector<Mat> sub = gather_blocks(blocks, o1.slot, k);
    if (sub.empty()) continue;
    const Scope stage2{{k, k + 3}, false, {k + 3}};
    converged = lloyd_core(sub, bank, q, learner, opt, stage2).converged && converged;
  }

  const ClusterAssign fin = assign_clusters(blocks, bank, q);
  std::vector<double> iterations = std::move(o1.iterations);
  iterations.push_back(rd_total(blocks, bank, fin, q));
  TrainResult r = pack_result(std::move(bank), fin.assignment, std::move(iterations), converged, q);
  return r;
}

std::string TrainReport::to_json() const {
  nlohmann::ordered_json j;
  j["iterations"] = iterations;
  j["cluster_sizes"] = std::vector<int>(cluster_sizes.begin(), cluster_sizes.end());
  j["converged"] = converged;
  j["qp"] = qp;
  j["lambda"] = lambda;
  return j.dump(2) + "\n";
}

}  // namespace rdot
