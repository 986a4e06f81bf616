#pragma once

#include <cmath>
#include <optional>
#include <vector>

#include "mstab/error.hpp"
#include "mstab/graph.hpp"
#include "mstab/metrics.hpp"
#include "mstab/objective.hpp"
#include "mstab/partition.hpp"
#include "mstab/spectral.hpp"
#include "mstab/vp.hpp"

namespace mstab {

/// n log-spaced points from t_min to t_max inclusive.
inline std::vector<double> geometric_grid(double t_min, double t_max, int n_points) {
  if (!(t_min > 0.0) || !(t_max >= t_min) || n_points < 1)
    throw Error(ErrorCode::InvalidArgument, "time grid needs 0 < t_min <= t_max and n_points >= 1");
  std::vector<double> grid(static_cast<std::size_t>(n_points));
  if (n_points == 1) {
    grid[0] = t_min;
    return grid;
  }
  const double step = std::log(t_max / t_min) / (n_points - 1);
  for (int k = 0; k < n_points; ++k) grid[static_cast<std::size_t>(k)] = t_min * std::exp(step * k);
  grid.back() = t_max;
  return grid;
}

/**
 * Run 0 uses `cfg` unchanged; runs 1..restarts-1 use shuffled sweeps seeded
 * with cfg.seed + run. The first strictly best objective wins.
 */
inline VPResult best_of_restarts(const Embedding& emb, const VPConfig& cfg, int restarts) {
  if (restarts < 1) throw Error(ErrorCode::InvalidArgument, "restarts must be >= 1");
  VPResult best = partition_vectors(emb, cfg);
  for (int run = 1; run < restarts; ++run) {
    VPConfig shuffled = cfg;
    shuffled.sweep_order = SweepOrder::Shuffled;
    shuffled.seed = cfg.seed + static_cast<std::uint64_t>(run);
    VPResult r = partition_vectors(emb, shuffled);
    if (r.objective > best.objective) best = std::move(r);
  }
  return best;
}

inline SpectralBasis decompose(const Graph& g, BasisSource source) {
  return source == BasisSource::Transition ? decompose_transition(g) : decompose_modularity_matrix(g);
}

struct ScanRecord {
  double time = 0.0;
  EmbeddingMode mode = EmbeddingMode::Exponential;
  Eigen::Index dim = 0;
  Partition partition;
  double objective = 0.0;
  int num_communities = 0;
  std::optional<double> nmi;
  std::optional<double> uncertainty;
  std::optional<double> vi_prev;
  VPDiagnostics diagnostics;
};

/// Markov-time scan over one shared transition basis. `dim` defaults to n-1.
inline std::vector<ScanRecord> time_scan(const SpectralBasis& basis, const std::vector<double>& grid,
                                         EmbeddingMode mode, std::optional<Eigen::Index> dim, const VPConfig& cfg,
                                         int restarts, const std::optional<GroundTruth>& truth = std::nullopt) {
  if (mode == EmbeddingMode::Modularity)
    throw Error(ErrorCode::InvalidArgument, "time_scan needs a time-dependent mode");
  if (truth) require_same_size(static_cast<std::size_t>(basis.size()), truth->size(), "ground truth");
  const Eigen::Index d = dim.value_or(basis.size() - 1);

  std::vector<ScanRecord> records;
  records.reserve(grid.size());
  for (double t : grid) {
    const Embedding emb = build_embedding(basis, mode, t, d);
    VPResult res = best_of_restarts(emb, cfg, restarts);
    ScanRecord rec;
    rec.time = t;
    rec.mode = mode;
    rec.dim = d;
    rec.objective = res.objective;
    rec.num_communities = res.partition.num_groups();
    if (truth) {
      rec.nmi = nmi(*truth, res.partition);
      rec.uncertainty = uncertainty_coefficient(*truth, res.partition);
    }
    if (!records.empty()) rec.vi_prev = variation_of_information(records.back().partition, res.partition);
    rec.partition = std::move(res.partition);
    rec.diagnostics = std::move(res.diagnostics);
    records.push_back(std::move(rec));
  }
  return records;
}

inline std::vector<ScanRecord> time_scan(const Graph& g, const std::vector<double>& grid, EmbeddingMode mode,
                                         std::optional<Eigen::Index> dim, const VPConfig& cfg, int restarts,
                                         const std::optional<GroundTruth>& truth = std::nullopt) {
  if (truth) require_same_size(g.num_nodes(), truth->size(), "ground truth");
  return time_scan(decompose_transition(g), grid, mode, dim, cfg, restarts, truth);
}

struct DimSweepRow {
  Eigen::Index dim = 0;
  double nmi = 0.0;
  double uncertainty = 0.0;
  int num_communities = 0;
  double objective = 0.0;
  Partition partition;
};

/// Quality against ground truth as a function of embedding dimension.
inline std::vector<DimSweepRow> dim_sweep(const Graph& g, const GroundTruth& truth, double t, EmbeddingMode mode,
                                          const std::vector<Eigen::Index>& dims, const VPConfig& cfg, int restarts) {
  require_same_size(g.num_nodes(), truth.size(), "ground truth");
  const SpectralBasis basis = decompose(g, required_source(mode));
  std::vector<DimSweepRow> rows;
  rows.reserve(dims.size());
  for (auto d : dims) {
    const Embedding emb = build_embedding(basis, mode, t, d);
    VPResult res = best_of_restarts(emb, cfg, restarts);
    rows.push_back({d, nmi(truth, res.partition), uncertainty_coefficient(truth, res.partition),
                    res.partition.num_groups(), res.objective, std::move(res.partition)});
  }
  return rows;
}

struct SourceScore {
  double modularity = 0.0;
  int num_communities = 0;
  double uncertainty = 0.0;
  Partition partition;
};

struct ComparisonRow {
  Eigen::Index dim = 0;
  SourceScore transition;
  SourceScore modularity_matrix;
};

/**
 * Modularity optimisation on two embeddings of equal dimension: the
 * linearised transition embedding at t = 1 and the modularity-matrix
 * embedding, both fed to the same optimiser.
 */
inline std::vector<ComparisonRow> embedding_comparison(const Graph& g, const GroundTruth& truth,
                                                       const std::vector<Eigen::Index>& dims, const VPConfig& cfg,
                                                       int restarts) {
  require_same_size(g.num_nodes(), truth.size(), "ground truth");
  const SpectralBasis transition = decompose_transition(g);
  const SpectralBasis modularity = decompose_modularity_matrix(g);
  auto score = [&](const Embedding& emb) {
    VPResult res = best_of_restarts(emb, cfg, restarts);
    return SourceScore{modularity_score(g, res.partition), res.partition.num_groups(),
                       uncertainty_coefficient(truth, res.partition), std::move(res.partition)};
  };
  std::vector<ComparisonRow> rows;
  rows.reserve(dims.size());
  for (auto d : dims) {
    rows.push_back({d, score(build_embedding(transition, EmbeddingMode::Linearised, 1.0, d)),
                    score(build_embedding(modularity, EmbeddingMode::Modularity, 0.0, d))});
  }
  return rows;
}

}  // namespace mstab
