#pragma once

#include <cmath>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>

#include "mstab/error.hpp"
#include "mstab/graph.hpp"
#include "mstab/partition.hpp"
#include "mstab/spectral.hpp"

namespace mstab {

/**
 * B(t) = Pi exp(-t(I - M)) - pi^T pi by a direct matrix exponential
 * (Eigen's scaling-and-squaring Pade). Used as the independent oracle for
 * the spectral route and never by the optimiser.
 */
inline Eigen::MatrixXd autocovariance_direct(const Graph& g, double t) {
  if (!(t >= 0.0)) throw Error(ErrorCode::InvalidArgument, "autocovariance needs t >= 0");
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const Eigen::VectorXd pi = g.stationary();
  Eigen::MatrixXd generator = g.dense_adjacency();
  for (Eigen::Index i = 0; i < n; ++i) generator.row(i) /= g.degree(static_cast<int>(i));
  generator -= Eigen::MatrixXd::Identity(n, n);  // M - I
  Eigen::MatrixXd p = (t * generator).exp();
  return pi.asDiagonal() * p - pi * pi.transpose();
}

/// B_lin(t) = Pi[(1-t)I + tM] - pi^T pi, assembled entrywise from A and d.
inline Eigen::MatrixXd linearised_autocovariance_direct(const Graph& g, double t) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const double two_m = 2.0 * g.total_weight();
  const Eigen::VectorXd pi = g.stationary();
  Eigen::MatrixXd b = -pi * pi.transpose();
  for (Eigen::Index i = 0; i < n; ++i) b(i, i) += (1.0 - t) * pi(i);
  for (const auto& e : g.edges()) {
    b(e.i, e.j) += t * e.w / two_m;
    b(e.j, e.i) += t * e.w / two_m;
  }
  return b;
}

/// sum_s sum_{i,j in g_s} B_ij.
inline double within_group_sum(const Eigen::MatrixXd& b, const Partition& p) {
  require_same_size(static_cast<std::size_t>(b.rows()), p.size(), "within_group_sum");
  double total = 0.0;
  for (const auto& members : p.groups())
    for (int i : members)
      for (int j : members) total += b(i, j);
  return total;
}

/// sum_k sigma_k a_k b_k.
inline double signed_inner(const Embedding& emb, const Eigen::Ref<const Eigen::VectorXd>& a,
                           const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() != emb.dim() || b.size() != emb.dim())
    throw Error(ErrorCode::SizeMismatch, "signed_inner: vector length differs from embedding dim");
  return (emb.signature.array() * a.array() * b.array()).sum();
}

/// q(a) = signed_inner(a, a).
inline double quadratic_form(const Embedding& emb, const Eigen::Ref<const Eigen::VectorXd>& a) {
  return signed_inner(emb, a, a);
}

/// Group sum vectors y_s as rows.
inline Eigen::MatrixXd group_sums(const Embedding& emb, const Partition& p) {
  require_same_size(static_cast<std::size_t>(emb.num_vectors()), p.size(), "group_sums");
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(p.num_groups(), emb.dim());
  for (Eigen::Index i = 0; i < emb.num_vectors(); ++i) y.row(p[static_cast<std::size_t>(i)]) += emb.vectors.row(i);
  return y;
}

/**
 * Max-sum objective sum_s q(y_s), scaled by emb.scale. Equals Markov
 * Stability for full exponential embeddings, linearised stability for
 * linearised ones and modularity Q in modularity mode.
 */
inline double stability(const Embedding& emb, const Partition& p) {
  const Eigen::MatrixXd y = group_sums(emb, p);
  double total = 0.0;
  for (Eigen::Index s = 0; s < y.rows(); ++s) total += quadratic_form(emb, y.row(s).transpose());
  return emb.scale * total;
}

/// Q = (1/2m) sum_s sum_{i,j in g_s} (A_ij - d_i d_j / 2m), from A and d only.
inline double modularity_score(const Graph& g, const Partition& p) {
  require_same_size(g.num_nodes(), p.size(), "modularity_score");
  const double two_m = 2.0 * g.total_weight();
  std::vector<double> internal(static_cast<std::size_t>(p.num_groups()), 0.0);
  std::vector<double> volume(static_cast<std::size_t>(p.num_groups()), 0.0);
  for (const auto& e : g.edges())
    if (p[static_cast<std::size_t>(e.i)] == p[static_cast<std::size_t>(e.j)])
      internal[static_cast<std::size_t>(p[static_cast<std::size_t>(e.i)])] += 2.0 * e.w;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) volume[static_cast<std::size_t>(p[v])] += g.degree(static_cast<int>(v));
  double q = 0.0;
  for (std::size_t s = 0; s < internal.size(); ++s) q += internal[s] - volume[s] * volume[s] / two_m;
  return q / two_m;
}

/// r_lin(t, g) from A, d and m.
inline double linearised_stability(const Graph& g, const Partition& p, double t) {
  require_same_size(g.num_nodes(), p.size(), "linearised_stability");
  if (!(t > 0.0)) throw Error(ErrorCode::InvalidArgument, "linearised stability needs t > 0");
  const double two_m = 2.0 * g.total_weight();
  const auto c = static_cast<std::size_t>(p.num_groups());
  std::vector<double> internal(c, 0.0), mass(c, 0.0);
  for (const auto& e : g.edges())
    if (p[static_cast<std::size_t>(e.i)] == p[static_cast<std::size_t>(e.j)])
      internal[static_cast<std::size_t>(p[static_cast<std::size_t>(e.i)])] += 2.0 * e.w;
  for (std::size_t v = 0; v < g.num_nodes(); ++v) mass[static_cast<std::size_t>(p[v])] += g.degree(static_cast<int>(v)) / two_m;
  double r = 0.0;
  for (std::size_t s = 0; s < c; ++s) r += (1.0 - t) * mass[s] + t * internal[s] / two_m - mass[s] * mass[s];
  return r;
}

struct KMeansScore {
  /// sum_s sum_{i in g_s} ||x_i - centroid_s||^2
  double distortion;
  /// F = sum_s ||y_s||^2 / |g_s|
  double normalised;
};

inline KMeansScore kmeans_objective(const Embedding& emb, const Partition& p) {
  if (emb.mode != EmbeddingMode::Exponential)
    throw Error(ErrorCode::NonEuclideanEmbedding, "k-means objective needs an exponential-mode embedding");
  const Eigen::MatrixXd y = group_sums(emb, p);
  const auto sizes = p.group_sizes();
  KMeansScore out{0.0, 0.0};
  for (Eigen::Index s = 0; s < y.rows(); ++s) out.normalised += y.row(s).squaredNorm() / static_cast<double>(sizes[static_cast<std::size_t>(s)]);
  for (Eigen::Index i = 0; i < emb.num_vectors(); ++i) {
    const auto s = p[static_cast<std::size_t>(i)];
    const Eigen::RowVectorXd centroid = y.row(s) / static_cast<double>(sizes[static_cast<std::size_t>(s)]);
    out.distortion += (emb.vectors.row(i) - centroid).squaredNorm();
  }
  return out;
}

}  // namespace mstab
