#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mstab/error.hpp"
#include "mstab/objective.hpp"
#include "mstab/partition.hpp"
#include "mstab/spectral.hpp"

namespace mstab {

enum class SweepOrder { Natural, Shuffled };

struct VPConfig {
  SweepOrder sweep_order = SweepOrder::Natural;
  std::uint64_t seed = 0;  // used when sweep_order == Shuffled
  bool allow_detach = true;
  double gain_tolerance = 1e-12;
  int max_levels = 64;
};

struct LevelStats {
  int level = 0;
  int inputs = 0;
  int groups = 0;
  int sweeps = 0;
  int moves = 0;
};

struct VPDiagnostics {
  std::vector<LevelStats> levels;
  /// Objective after every sweep, in reported (scaled) units.
  std::vector<double> objective_trajectory;
  bool monotone = true;
};

struct VPResult {
  Partition partition;
  double objective = 0.0;
  VPDiagnostics diagnostics;
};

/**
 * Working state of one aggregation level: input vectors, their current
 * groups and the running group sums y_s.
 */
class VPState {
 public:
  /// Destination meaning "a fresh, empty group".
  static constexpr int kEmptyGroup = -1;

  VPState(Eigen::MatrixXd inputs, const Eigen::VectorXd& signature, std::vector<int> membership_trace, int level)
      : inputs_(std::move(inputs)),
        signed_inputs_(inputs_ * signature.asDiagonal()),
        sums_(inputs_),
        group_(static_cast<std::size_t>(inputs_.rows())),
        sizes_(static_cast<std::size_t>(inputs_.rows()), 1),
        trace_(std::move(membership_trace)),
        level_(level) {
    std::iota(group_.begin(), group_.end(), 0);
  }

  int num_inputs() const noexcept { return static_cast<int>(inputs_.rows()); }
  int num_groups() const noexcept { return static_cast<int>(sums_.rows()); }
  int group_of(int i) const { return group_[static_cast<std::size_t>(i)]; }
  int group_size(int s) const { return sizes_[static_cast<std::size_t>(s)]; }
  int level() const noexcept { return level_; }
  const Eigen::MatrixXd& inputs() const noexcept { return inputs_; }
  const Eigen::MatrixXd& group_sums() const noexcept { return sums_; }
  const std::vector<int>& membership_trace() const noexcept { return trace_; }

  /// <x_i, y>_sigma without rebuilding the signed copy.
  double signed_dot(int i, const Eigen::Ref<const Eigen::RowVectorXd>& y) const {
    return signed_inputs_.row(i).dot(y);
  }

  /// Moves input i to `beta` (or to a new group for kEmptyGroup); returns the destination index.
  int move(int i, int beta) {
    const int alpha = group_of(i);
    if (beta == kEmptyGroup) {
      beta = num_groups();
      sums_.conservativeResize(beta + 1, Eigen::NoChange);
      sums_.row(beta).setZero();
      sizes_.push_back(0);
    }
    sums_.row(alpha) -= inputs_.row(i);
    sums_.row(beta) += inputs_.row(i);
    --sizes_[static_cast<std::size_t>(alpha)];
    ++sizes_[static_cast<std::size_t>(beta)];
    group_[static_cast<std::size_t>(i)] = beta;
    return beta;
  }

  /// Drops empty groups (keeping relative order) and rebuilds the sums from
  /// scratch. Returns the largest drift between running and rebuilt sums.
  double prune_and_revalidate() {
    std::vector<int> remap(static_cast<std::size_t>(num_groups()), -1);
    int next = 0;
    for (int s = 0; s < num_groups(); ++s)
      if (sizes_[static_cast<std::size_t>(s)] > 0) remap[static_cast<std::size_t>(s)] = next++;
    Eigen::MatrixXd rebuilt = Eigen::MatrixXd::Zero(next, inputs_.cols());
    Eigen::MatrixXd running(next, inputs_.cols());
    std::vector<int> sizes(static_cast<std::size_t>(next), 0);
    for (int s = 0; s < num_groups(); ++s)
      if (remap[static_cast<std::size_t>(s)] >= 0) running.row(remap[static_cast<std::size_t>(s)]) = sums_.row(s);
    for (int i = 0; i < num_inputs(); ++i) {
      auto& g = group_[static_cast<std::size_t>(i)];
      g = remap[static_cast<std::size_t>(g)];
      rebuilt.row(g) += inputs_.row(i);
      ++sizes[static_cast<std::size_t>(g)];
    }
    const double drift = next > 0 ? (running - rebuilt).cwiseAbs().maxCoeff() : 0.0;
    sums_ = std::move(rebuilt);
    sizes_ = std::move(sizes);
    return drift;
  }

  /// sum_s q(y_s), unscaled.
  double raw_objective(const Eigen::VectorXd& signature) const {
    return (sums_.array().square().matrix() * signature).sum();
  }

 private:
  Eigen::MatrixXd inputs_;
  Eigen::MatrixXd signed_inputs_;
  Eigen::MatrixXd sums_;
  std::vector<int> group_;
  std::vector<int> sizes_;
  std::vector<int> trace_;
  int level_;
};

/**
 * Delta r for moving input i from its group alpha to beta:
 * <x_i, y_beta>_sigma - <x_i, y_alpha - x_i>_sigma. Half the exact change in
 * sum_s q(y_s) (unscaled).
 */
inline double move_gain(const VPState& state, const Eigen::VectorXd& signature, int i, int beta) {
  const int alpha = state.group_of(i);
  if (beta == alpha) throw Error(ErrorCode::SameGroup, "input already belongs to the target group");
  const Eigen::RowVectorXd xi = state.inputs().row(i);
  const double self = (signature.transpose().array() * xi.array() * (state.group_sums().row(alpha) - xi).array()).sum();
  if (beta == VPState::kEmptyGroup) return -self;
  return (signature.transpose().array() * xi.array() * state.group_sums().row(beta).array()).sum() - self;
}

namespace detail {

inline bool local_moving(VPState& state, const Eigen::VectorXd& signature, const VPConfig& cfg, double scale,
                         std::mt19937_64& rng, LevelStats& stats, VPDiagnostics& diag) {
  std::vector<int> order(static_cast<std::size_t>(state.num_inputs()));
  std::iota(order.begin(), order.end(), 0);
  if (cfg.sweep_order == SweepOrder::Shuffled) std::shuffle(order.begin(), order.end(), rng);

  bool any_move = false;
  double previous = diag.objective_trajectory.empty() ? scale * state.raw_objective(signature)
                                                      : diag.objective_trajectory.back();
  for (;;) {
    int moves = 0;
    for (int i : order) {
      const int alpha = state.group_of(i);
      const double self = state.signed_dot(i, state.group_sums().row(alpha) - state.inputs().row(i));
      double best = -std::numeric_limits<double>::infinity();
      int best_group = alpha;
      for (int beta = 0; beta < state.num_groups(); ++beta) {
        if (beta == alpha || state.group_size(beta) == 0) continue;
        const double gain = state.signed_dot(i, state.group_sums().row(beta)) - self;
        if (gain > best) {
          best = gain;
          best_group = beta;
        }
      }
      if (cfg.allow_detach && state.group_size(alpha) > 1 && -self > best) {
        best = -self;
        best_group = VPState::kEmptyGroup;
      }
      if (best_group != alpha && scale * best > cfg.gain_tolerance) {
        state.move(i, best_group);
        ++moves;
      }
    }
    ++stats.sweeps;
    stats.moves += moves;
    any_move = any_move || moves > 0;

    const double drift = state.prune_and_revalidate();
    const double bound = 1e-9 * std::max(1.0, state.inputs().cwiseAbs().sum());
    if (drift > bound) throw std::logic_error("group sum drift exceeded tolerance");

    const double now = scale * state.raw_objective(signature);
    if (now < previous - 1e-12 * std::max(1.0, std::abs(previous))) diag.monotone = false;
    diag.objective_trajectory.push_back(now);
    previous = now;
    if (moves == 0) break;
  }
  return any_move;
}

}  // namespace detail

/**
 * Louvain-style max-sum vector partitioning.
 *
 * Phase 1 starts from singletons and repeatedly moves each input to the
 * group of largest positive gain until a sweep makes no move. Phase 2
 * replaces the inputs by the group sum vectors and starts over, until a
 * level ends with every input alone in its group.
 */
inline VPResult partition_vectors(const Embedding& emb, const VPConfig& cfg = {}) {
  if (emb.num_vectors() < 1) throw Error(ErrorCode::InvalidArgument, "no vectors to partition");
  if (!(cfg.gain_tolerance > 0.0)) throw Error(ErrorCode::InvalidArgument, "gain_tolerance must be positive");

  std::mt19937_64 rng(cfg.seed);
  VPDiagnostics diag;
  std::vector<int> trace(static_cast<std::size_t>(emb.num_vectors()));
  std::iota(trace.begin(), trace.end(), 0);
  Eigen::MatrixXd inputs = emb.vectors;

  for (int level = 0;; ++level) {
    if (level >= cfg.max_levels)
      throw Error(ErrorCode::LevelCapExceeded, "vector partitioning reached " + std::to_string(cfg.max_levels) + " levels");
    VPState state(std::move(inputs), emb.signature, std::move(trace), level);
    LevelStats stats;
    stats.level = level;
    stats.inputs = state.num_inputs();
    detail::local_moving(state, emb.signature, cfg, emb.scale, rng, stats, diag);
    stats.groups = state.num_groups();
    diag.levels.push_back(stats);

    trace = state.membership_trace();
    for (auto& t : trace) t = state.group_of(t);
    if (state.num_groups() == state.num_inputs()) break;
    inputs = state.group_sums();
  }

  VPResult result;
  result.partition = Partition::from_labels(trace);
  result.objective = stability(emb, result.partition);
  result.diagnostics = std::move(diag);
  return result;
}

struct ExhaustiveResult {
  Partition partition;
  double objective = 0.0;
};

/**
 * Global maximiser of sum_s q(y_s) over all set partitions (n <= 10).
 * Ties go to fewer groups, then to the lexicographically smallest canonical
 * assignment.
 */
inline ExhaustiveResult exhaustive_partition(const Embedding& emb) {
  const int n = static_cast<int>(emb.num_vectors());
  if (n > 10) throw Error(ErrorCode::TooLarge, "exhaustive enumeration limited to 10 vectors, got " + std::to_string(n));
  if (n < 1) throw Error(ErrorCode::InvalidArgument, "no vectors to partition");

  const Eigen::VectorXd& sig = emb.signature;
  Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(n, emb.dim());
  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<int> best_labels;
  double best = -std::numeric_limits<double>::infinity();
  int best_groups = n + 1;
  // Ties are judged relative to the size of the vectors, not to 1, so that
  // tiny objectives (large t) are still resolved.
  const double tie_scale = emb.vectors.squaredNorm();

  // Restricted growth strings enumerate canonical assignments in lex order,
  // so a later candidate only wins a tie by having fewer groups.
  auto visit = [&](auto&& self, int i, int groups) -> void {
    if (i == n) {
      const double value = (sums.topRows(groups).array().square().matrix() * sig).sum();
      const double tol = 1e-12 * std::max(tie_scale, std::abs(best));
      if (value > best + tol || (value >= best - tol && groups < best_groups)) {
        best = value;
        best_groups = groups;
        best_labels = labels;
      }
      return;
    }
    for (int s = 0; s <= groups && s < n; ++s) {
      labels[static_cast<std::size_t>(i)] = s;
      sums.row(s) += emb.vectors.row(i);
      self(self, i + 1, std::max(groups, s + 1));
      sums.row(s) -= emb.vectors.row(i);
    }
  };
  visit(visit, 0, 0);

  ExhaustiveResult out;
  out.partition = Partition::from_labels(best_labels);
  out.objective = stability(emb, out.partition);
  return out;
}

}  // namespace mstab
