#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "mstab/error.hpp"
#include "mstab/graph.hpp"

namespace mstab {

enum class BasisSource { Transition, Modularity };
enum class EmbeddingMode { Exponential, Linearised, Modularity };

constexpr std::string_view to_string(BasisSource s) {
  return s == BasisSource::Transition ? "transition" : "modularity";
}

constexpr std::string_view to_string(EmbeddingMode m) {
  switch (m) {
    case EmbeddingMode::Exponential: return "exponential";
    case EmbeddingMode::Linearised: return "linearised";
    case EmbeddingMode::Modularity: return "modularity";
  }
  return "?";
}

inline BasisSource parse_basis_source(std::string_view s) {
  if (s == "transition") return BasisSource::Transition;
  if (s == "modularity") return BasisSource::Modularity;
  throw Error(ErrorCode::InvalidArgument, "unknown basis source '" + std::string(s) + "'");
}

inline EmbeddingMode parse_embedding_mode(std::string_view s) {
  if (s == "exponential") return EmbeddingMode::Exponential;
  if (s == "linearised" || s == "linearized") return EmbeddingMode::Linearised;
  if (s == "modularity") return EmbeddingMode::Modularity;
  throw Error(ErrorCode::InvalidArgument, "unknown embedding mode '" + std::string(s) + "'");
}

constexpr BasisSource required_source(EmbeddingMode m) {
  return m == EmbeddingMode::Modularity ? BasisSource::Modularity : BasisSource::Transition;
}

/**
 * Full eigensystem of either the transition matrix M = D^-1 A or the
 * modularity matrix B_Q = A - d d^T / 2m.
 *
 * Eigenvalues are sorted descending and eigenvectors are stored as columns.
 * Transition eigenvectors are Pi-orthonormal (v_k^T Pi v_l = delta_kl);
 * modularity eigenvectors are orthonormal. `trivial` is the column of the
 * stationary mode (constant vector), which embeddings skip.
 */
struct SpectralBasis {
  BasisSource source = BasisSource::Transition;
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;
  Eigen::VectorXd pi;
  double total_weight = 0.0;
  Eigen::Index trivial = 0;

  Eigen::Index size() const noexcept { return eigenvalues.size(); }

  /// Column indices of the non-trivial directions in eigenvalue order.
  std::vector<Eigen::Index> nontrivial_order() const {
    std::vector<Eigen::Index> out;
    out.reserve(static_cast<std::size_t>(size()));
    for (Eigen::Index k = 0; k < size(); ++k)
      if (k != trivial) out.push_back(k);
    return out;
  }
};

namespace detail {

inline void fix_sign(Eigen::Ref<Eigen::VectorXd> v) {
  Eigen::Index arg = 0;
  v.cwiseAbs().maxCoeff(&arg);
  if (v(arg) < 0) v = -v;
}

// Ascending solver output -> descending columns.
inline void sort_descending(const Eigen::VectorXd& vals, const Eigen::MatrixXd& vecs, Eigen::VectorXd& out_vals,
                            Eigen::MatrixXd& out_vecs) {
  const Eigen::Index n = vals.size();
  out_vals.resize(n);
  out_vecs.resize(vecs.rows(), n);
  for (Eigen::Index k = 0; k < n; ++k) {
    out_vals(k) = vals(n - 1 - k);
    out_vecs.col(k) = vecs.col(n - 1 - k);
  }
}

}  // namespace detail

/// Eigenpairs of M via the symmetric similar matrix S = D^-1/2 A D^-1/2.
inline SpectralBasis decompose_transition(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  Eigen::VectorXd inv_sqrt_d(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = g.degree(static_cast<int>(i));
    if (!(d > 0.0)) throw Error(ErrorCode::ZeroDegree, "node " + std::to_string(i) + " has zero degree");
    inv_sqrt_d(i) = 1.0 / std::sqrt(d);
  }
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  for (const auto& e : g.edges()) {
    const double v = e.w * inv_sqrt_d(e.i) * inv_sqrt_d(e.j);
    s(e.i, e.j) = v;
    s(e.j, e.i) = v;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(s);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolverFailure, "transition eigenproblem did not converge");

  SpectralBasis basis;
  basis.source = BasisSource::Transition;
  basis.total_weight = g.total_weight();
  basis.pi = g.stationary();
  detail::sort_descending(solver.eigenvalues(), solver.eigenvectors(), basis.eigenvalues, basis.eigenvectors);
  // v_k = sqrt(2m) D^-1/2 u_k gives v_k^T Pi v_k = u_k^T u_k = 1.
  const double c = std::sqrt(2.0 * g.total_weight());
  for (Eigen::Index k = 0; k < n; ++k) {
    basis.eigenvectors.col(k) = c * inv_sqrt_d.cwiseProduct(basis.eigenvectors.col(k));
    detail::fix_sign(basis.eigenvectors.col(k));
  }
  basis.trivial = 0;
  return basis;
}

/**
 * Eigenpairs of B_Q. The all-ones direction is split off exactly (B_Q 1 = 0)
 * and the remaining spectrum is solved on its orthogonal complement, so the
 * trivial mode never mixes with other zero eigenvalues.
 */
inline SpectralBasis decompose_modularity_matrix(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_nodes());
  const double two_m = 2.0 * g.total_weight();
  Eigen::VectorXd d(n);
  for (Eigen::Index i = 0; i < n; ++i) d(i) = g.degree(static_cast<int>(i));
  Eigen::MatrixXd bq = g.dense_adjacency() - d * d.transpose() / two_m;

  SpectralBasis basis;
  basis.source = BasisSource::Modularity;
  basis.total_weight = g.total_weight();
  basis.pi = g.stationary();

  const Eigen::VectorXd ones = Eigen::VectorXd::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
  if (n == 1) {
    basis.eigenvalues = Eigen::VectorXd::Zero(1);
    basis.eigenvectors = ones;
    basis.trivial = 0;
    return basis;
  }

  // Householder reflector H with H e_0 = ones; columns 1..n-1 span ones^perp.
  Eigen::VectorXd w = ones;
  w(0) -= 1.0;
  Eigen::MatrixXd h = Eigen::MatrixXd::Identity(n, n) - 2.0 * w * w.transpose() / w.squaredNorm();
  Eigen::MatrixXd q = h.rightCols(n - 1);
  Eigen::MatrixXd reduced = q.transpose() * bq * q;
  reduced = 0.5 * (reduced + reduced.transpose());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(reduced);
  if (solver.info() != Eigen::Success)
    throw Error(ErrorCode::EigensolverFailure, "modularity eigenproblem did not converge");

  Eigen::VectorXd vals;
  Eigen::MatrixXd vecs;
  detail::sort_descending(solver.eigenvalues(), q * solver.eigenvectors(), vals, vecs);

  // Trivial mode goes first among eigenvalues <= 0.
  Eigen::Index slot = 0;
  while (slot < vals.size() && vals(slot) > 0.0) ++slot;
  basis.eigenvalues.resize(n);
  basis.eigenvectors.resize(n, n);
  for (Eigen::Index k = 0, src = 0; k < n; ++k) {
    if (k == slot) {
      basis.eigenvalues(k) = 0.0;
      basis.eigenvectors.col(k) = ones;
      continue;
    }
    basis.eigenvalues(k) = vals(src);
    basis.eigenvectors.col(k) = vecs.col(src);
    detail::fix_sign(basis.eigenvectors.col(k));
    ++src;
  }
  basis.trivial = slot;
  return basis;
}

/**
 * Time-dependent node vectors. Row i of `vectors` is x_i. Components are
 * ordered so that all +1 signature entries precede the -1 entries;
 * `directions` maps each component back to its basis column.
 */
struct Embedding {
  EmbeddingMode mode = EmbeddingMode::Exponential;
  std::optional<double> time;
  Eigen::MatrixXd vectors;
  Eigen::VectorXd signature;
  std::vector<Eigen::Index> directions;
  /// Multiplier applied to reported objective values (1/2m in modularity mode).
  double scale = 1.0;

  Eigen::Index num_vectors() const noexcept { return vectors.rows(); }
  Eigen::Index dim() const noexcept { return vectors.cols(); }
  bool euclidean() const { return (signature.array() > 0.0).all(); }
};

/// lambda_k(t) = exp(-t(1 - lambda_k)) or mu_k(t) = 1 - t(1 - lambda_k), in
/// basis order.
inline Eigen::VectorXd scaled_eigenvalues(const SpectralBasis& basis, EmbeddingMode mode, double t) {
  if (basis.source != BasisSource::Transition || mode == EmbeddingMode::Modularity)
    throw Error(ErrorCode::ModeBasisMismatch, "scaled eigenvalues need a transition basis and a time-dependent mode");
  if (mode == EmbeddingMode::Exponential)
    return (-t * (1.0 - basis.eigenvalues.array())).exp().matrix();
  return (1.0 - t * (1.0 - basis.eigenvalues.array())).matrix();
}

inline constexpr double kZeroWeightTolerance = 1e-12;

inline Embedding build_embedding(const SpectralBasis& basis, EmbeddingMode mode, double t, Eigen::Index dim) {
  const Eigen::Index n = basis.size();
  if (dim < 1 || dim > n - 1)
    throw Error(ErrorCode::DimOutOfRange,
                "dim " + std::to_string(dim) + " outside [1, " + std::to_string(n - 1) + "]");
  if (required_source(mode) != basis.source)
    throw Error(ErrorCode::ModeBasisMismatch, std::string(to_string(mode)) + " embedding cannot use a " +
                                                  std::string(to_string(basis.source)) + " basis");
  if (mode == EmbeddingMode::Exponential && !(t >= 0.0 && std::isfinite(t)))
    throw Error(ErrorCode::InvalidArgument, "exponential embedding needs finite t >= 0");
  if (mode == EmbeddingMode::Linearised && !(t > 0.0 && std::isfinite(t)))
    throw Error(ErrorCode::InvalidArgument, "linearised embedding needs finite t > 0");

  Eigen::VectorXd weights = mode == EmbeddingMode::Modularity ? basis.eigenvalues : scaled_eigenvalues(basis, mode, t);
  auto order = basis.nontrivial_order();
  order.resize(static_cast<std::size_t>(dim));

  // Exponential weights are strictly positive however small; only signed
  // weights get snapped to zero.
  const bool snap = mode != EmbeddingMode::Exponential;
  auto is_zero = [&](double w) { return snap && std::abs(w) < kZeroWeightTolerance; };
  std::vector<Eigen::Index> pos, neg;
  for (auto k : order) (is_zero(weights(k)) || weights(k) > 0.0 ? pos : neg).push_back(k);

  Embedding emb;
  emb.mode = mode;
  if (mode != EmbeddingMode::Modularity) emb.time = t;
  emb.scale = mode == EmbeddingMode::Modularity ? 1.0 / (2.0 * basis.total_weight) : 1.0;
  emb.vectors.resize(n, dim);
  emb.signature.resize(dim);
  emb.directions = pos;
  emb.directions.insert(emb.directions.end(), neg.begin(), neg.end());
  for (Eigen::Index c = 0; c < dim; ++c) {
    const Eigen::Index k = emb.directions[static_cast<std::size_t>(c)];
    const double w = weights(k);
    const bool zero = is_zero(w);
    emb.signature(c) = (zero || w > 0.0) ? 1.0 : -1.0;
    const double amp = zero ? 0.0 : std::sqrt(std::abs(w));
    if (mode == EmbeddingMode::Modularity)
      emb.vectors.col(c) = amp * basis.eigenvectors.col(k);
    else
      emb.vectors.col(c) = amp * basis.pi.cwiseProduct(basis.eigenvectors.col(k));
  }
  return emb;
}

/// Embedding with every non-trivial direction retained.
inline Embedding build_full_embedding(const SpectralBasis& basis, EmbeddingMode mode, double t) {
  return build_embedding(basis, mode, t, basis.size() - 1);
}

}  // namespace mstab
