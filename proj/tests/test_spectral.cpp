#include <algorithm>
#include <cmath>

#include <gtest/gtest.h>

#include "mstab/io.hpp"
#include "mstab/objective.hpp"
#include "mstab/spectral.hpp"
#include "test_support.hpp"

namespace mstab {
namespace {

// Eigenvalues of the non-symmetric M = D^-1 A by a general dense solver.
std::vector<double> dense_transition_spectrum(const Graph& g) {
  Eigen::MatrixXd m = g.dense_adjacency();
  for (Eigen::Index i = 0; i < m.rows(); ++i) m.row(i) /= g.degree(static_cast<int>(i));
  Eigen::EigenSolver<Eigen::MatrixXd> es(m);
  std::vector<double> out;
  for (Eigen::Index k = 0; k < m.rows(); ++k) out.push_back(es.eigenvalues()(k).real());
  std::sort(out.rbegin(), out.rend());
  return out;
}

void expect_transition_invariants(const Graph& g, const SpectralBasis& b) {
  const Eigen::Index n = b.size();
  EXPECT_NEAR(b.eigenvalues(0), 1.0, 1e-10);
  for (Eigen::Index k = 0; k < n; ++k) {
    EXPECT_GE(b.eigenvalues(k), -1.0 - 1e-10);
    EXPECT_LE(b.eigenvalues(k), 1.0 + 1e-10);
    if (k > 0) EXPECT_GE(b.eigenvalues(k - 1), b.eigenvalues(k));
  }
  const Eigen::MatrixXd gram = b.eigenvectors.transpose() * b.pi.asDiagonal() * b.eigenvectors;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(n, n)).cwiseAbs().maxCoeff(), 1e-8);
  Eigen::MatrixXd m = g.dense_adjacency();
  for (Eigen::Index i = 0; i < n; ++i) m.row(i) /= g.degree(static_cast<int>(i));
  const Eigen::MatrixXd residual = m * b.eigenvectors - b.eigenvectors * b.eigenvalues.asDiagonal();
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8);
  const Eigen::VectorXd v1 = b.eigenvectors.col(0);
  EXPECT_LE(v1.maxCoeff() - v1.minCoeff(), 1e-8);
}

TEST(DecomposeTransition, PairGraph4) {
  const Graph g = testing::pairgraph4();
  const auto b = decompose_transition(g);
  const std::vector<double> expected{1.0, 2.0 / 3.0, -5.0 / 6.0, -5.0 / 6.0};
  const auto oracle = dense_transition_spectrum(g);
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(b.eigenvalues(k), expected[static_cast<std::size_t>(k)], 1e-12);
    EXPECT_NEAR(b.eigenvalues(k), oracle[static_cast<std::size_t>(k)], 1e-10);
  }
  expect_transition_invariants(g, b);
}

TEST(DecomposeTransition, TriangleAndFourCycle) {
  const auto k3 = decompose_transition(load_edge_list(testing::kTriangle));
  EXPECT_NEAR(k3.eigenvalues(0), 1.0, 1e-12);
  EXPECT_NEAR(k3.eigenvalues(1), -0.5, 1e-12);
  EXPECT_NEAR(k3.eigenvalues(2), -0.5, 1e-12);

  const Graph c4 = load_edge_list(testing::kFourCycle);
  const auto b = decompose_transition(c4);
  const auto oracle = dense_transition_spectrum(c4);
  const std::vector<double> expected{1.0, 0.0, 0.0, -1.0};
  for (int k = 0; k < 4; ++k) {
    EXPECT_NEAR(b.eigenvalues(k), expected[static_cast<std::size_t>(k)], 1e-12);
    EXPECT_NEAR(b.eigenvalues(k), oracle[static_cast<std::size_t>(k)], 1e-10);
  }
  expect_transition_invariants(c4, b);
}

TEST(DecomposeTransition, RandomGraphInvariants) {
  for (std::uint64_t seed = 1; seed <= 15; ++seed) {
    const Graph g = testing::random_connected_graph(5 + static_cast<int>(seed) * 2, 0.25, seed);
    expect_transition_invariants(g, decompose_transition(g));
  }
}

TEST(DecomposeTransition, SignConvention) {
  const auto b = decompose_transition(testing::random_connected_graph(12, 0.3, 5));
  for (Eigen::Index k = 0; k < b.size(); ++k) {
    Eigen::Index arg = 0;
    b.eigenvectors.col(k).cwiseAbs().maxCoeff(&arg);
    EXPECT_GT(b.eigenvectors(arg, k), 0.0);
  }
}

TEST(DecomposeModularity, AllOnesIsNullDirection) {
  const Graph g = testing::pairgraph4();
  const auto b = decompose_modularity_matrix(g);
  const Eigen::VectorXd ones = Eigen::VectorXd::Ones(4);
  const Eigen::VectorXd d = g.dense_adjacency().rowwise().sum();
  const Eigen::MatrixXd bq = g.dense_adjacency() - d * d.transpose() / d.sum();
  EXPECT_LE((bq * ones).cwiseAbs().maxCoeff(), 1e-10);
  EXPECT_NEAR(b.eigenvalues(b.trivial), 0.0, 1e-10);
  EXPECT_LE((b.eigenvectors.col(b.trivial).cwiseAbs() - ones / 2.0).cwiseAbs().maxCoeff(), 1e-10);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> oracle(bq);
  for (Eigen::Index k = 0; k < 4; ++k) EXPECT_NEAR(b.eigenvalues(k), oracle.eigenvalues()(3 - k), 1e-10);
  const Eigen::MatrixXd gram = b.eigenvectors.transpose() * b.eigenvectors;
  EXPECT_LE((gram - Eigen::MatrixXd::Identity(4, 4)).cwiseAbs().maxCoeff(), 1e-8);
  const Eigen::MatrixXd residual = bq * b.eigenvectors - b.eigenvectors * b.eigenvalues.asDiagonal();
  EXPECT_LE(residual.cwiseAbs().maxCoeff(), 1e-8);
}

TEST(DecomposeModularity, PathP4) {
  const auto b = decompose_modularity_matrix(load_edge_list(testing::kPathP4));
  // B_Q of P4: non-trivial spectrum {(sqrt5-1)/2, -2/3, -(sqrt5+1)/2}.
  const double s5 = std::sqrt(5.0);
  std::vector<double> got;
  for (auto k : b.nontrivial_order()) got.push_back(b.eigenvalues(k));
  ASSERT_EQ(got.size(), 3u);
  EXPECT_NEAR(got[0], (s5 - 1.0) / 2.0, 1e-10);
  EXPECT_NEAR(got[1], -2.0 / 3.0, 1e-10);
  EXPECT_NEAR(got[2], -(s5 + 1.0) / 2.0, 1e-10);
  EXPECT_LT(got.back(), 0.0);
}

TEST(DecomposeModularity, RandomGraphResidual) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const Graph g = testing::random_connected_graph(14, 0.3, seed);
    const auto b = decompose_modularity_matrix(g);
    const Eigen::VectorXd d = g.dense_adjacency().rowwise().sum();
    const Eigen::MatrixXd bq = g.dense_adjacency() - d * d.transpose() / d.sum();
    EXPECT_LE((bq * b.eigenvectors - b.eigenvectors * b.eigenvalues.asDiagonal()).cwiseAbs().maxCoeff(), 1e-8);
    for (Eigen::Index k = 1; k < b.size(); ++k) EXPECT_GE(b.eigenvalues(k - 1), b.eigenvalues(k));
  }
}

TEST(ScaledEigenvalues, Values) {
  const auto b = decompose_transition(testing::pairgraph4());
  const auto exp3 = scaled_eigenvalues(b, EmbeddingMode::Exponential, 3.0);
  EXPECT_NEAR(exp3(0), 1.0, 1e-12);
  EXPECT_NEAR(exp3(1), std::exp(-1.0), 1e-12);
  const auto lin1 = scaled_eigenvalues(b, EmbeddingMode::Linearised, 1.0);
  EXPECT_NEAR(lin1(0), 1.0, 1e-12);
  EXPECT_NEAR(lin1(2), -5.0 / 6.0, 1e-12);
  for (double t : {0.0, 0.7, 30.0}) {
    EXPECT_NEAR(scaled_eigenvalues(b, EmbeddingMode::Linearised, t)(0), 1.0, 1e-10);
    const auto w = scaled_eigenvalues(b, EmbeddingMode::Exponential, t);
    EXPECT_TRUE((w.array() > 0.0).all() && (w.array() <= 1.0 + 1e-12).all());
  }
  EXPECT_THROW(scaled_eigenvalues(decompose_modularity_matrix(testing::pairgraph4()), EmbeddingMode::Exponential, 1.0),
               Error);
}

TEST(BuildEmbedding, ExponentialWeightAtT3) {
  const auto b = decompose_transition(testing::pairgraph4());
  const auto emb = build_embedding(b, EmbeddingMode::Exponential, 3.0, 3);
  const Eigen::VectorXd expected = std::sqrt(std::exp(-1.0)) * b.pi.cwiseProduct(b.eigenvectors.col(1));
  EXPECT_LE((emb.vectors.col(0) - expected).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_TRUE((emb.signature.array() == 1.0).all());
}

TEST(BuildEmbedding, TimeZeroGram) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const Graph g = testing::random_connected_graph(10, 0.3, seed);
    const auto emb = build_full_embedding(decompose_transition(g), EmbeddingMode::Exponential, 0.0);
    const Eigen::VectorXd pi = g.stationary();
    const Eigen::MatrixXd expected = Eigen::MatrixXd(pi.asDiagonal()) - pi * pi.transpose();
    EXPECT_LE((emb.vectors * emb.vectors.transpose() - expected).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(BuildEmbedding, LinearisedSignature) {
  const auto b = decompose_transition(testing::pairgraph4());
  const auto emb = build_embedding(b, EmbeddingMode::Linearised, 1.0, 3);
  EXPECT_EQ(emb.signature(0), 1.0);
  EXPECT_EQ(emb.signature(1), -1.0);
  EXPECT_EQ(emb.signature(2), -1.0);
}

TEST(BuildEmbedding, SignatureSortedWhenCrossingZero) {
  // Resolution 3 gives mu = (1 - 3/3, ...) = 0 for lambda_2 = 2/3.
  const auto b = decompose_transition(testing::pairgraph4());
  const auto emb = build_embedding(b, EmbeddingMode::Linearised, 3.0, 3);
  EXPECT_EQ(emb.signature(0), 1.0);
  EXPECT_LE(emb.vectors.col(0).cwiseAbs().maxCoeff(), 1e-6);
  for (Eigen::Index c = 1; c < emb.dim(); ++c) EXPECT_LE(emb.signature(c), emb.signature(c - 1));

  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto rb = decompose_transition(testing::random_connected_graph(12, 0.3, seed));
    for (double t : {0.5, 1.0, 2.0, 4.0}) {
      const auto e = build_full_embedding(rb, EmbeddingMode::Linearised, t);
      for (Eigen::Index c = 1; c < e.dim(); ++c) EXPECT_LE(e.signature(c), e.signature(c - 1));
    }
  }
}

TEST(BuildEmbedding, ZeroSum) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto b = decompose_transition(testing::random_connected_graph(16, 0.2, seed));
    for (auto mode : {EmbeddingMode::Exponential, EmbeddingMode::Linearised})
      for (double t : {0.3, 1.0, 5.0})
        EXPECT_LE(build_full_embedding(b, mode, t).vectors.colwise().sum().cwiseAbs().maxCoeff(), 1e-8);
  }
}

TEST(BuildEmbedding, MonotoneShrinkage) {
  const auto b = decompose_transition(testing::random_connected_graph(15, 0.3, 3));
  const std::vector<double> times{0.0, 0.1, 0.5, 1.0, 3.0, 10.0};
  for (std::size_t k = 1; k < times.size(); ++k) {
    const auto early = build_full_embedding(b, EmbeddingMode::Exponential, times[k - 1]);
    const auto late = build_full_embedding(b, EmbeddingMode::Exponential, times[k]);
    EXPECT_TRUE((late.vectors.cwiseAbs().array() <= early.vectors.cwiseAbs().array() + 1e-15).all());
  }
}

TEST(BuildEmbedding, AsymptoticDominance) {
  int checked = 0;
  for (std::uint64_t seed = 1; seed <= 30 && checked < 5; ++seed) {
    const auto b = decompose_transition(testing::random_connected_graph(10, 0.3, seed));
    if (b.eigenvalues(1) - b.eigenvalues(2) < 0.05) continue;
    if (b.eigenvectors.col(1).cwiseAbs().minCoeff() < 1e-3) continue;
    const auto emb = build_full_embedding(b, EmbeddingMode::Exponential, 200.0);
    for (Eigen::Index i = 0; i < emb.num_vectors(); ++i)
      EXPECT_LT(std::abs(emb.vectors(i, 1)) / std::abs(emb.vectors(i, 0)), 1e-3);
    ++checked;
  }
  EXPECT_GE(checked, 3);
}

TEST(BuildEmbedding, TruncationConsistency) {
  const auto b = decompose_transition(testing::random_connected_graph(12, 0.3, 9));
  for (auto mode : {EmbeddingMode::Exponential, EmbeddingMode::Linearised}) {
    const auto full = build_full_embedding(b, mode, 1.5);
    for (Eigen::Index d = 1; d < b.size() - 1; ++d) {
      const auto part = build_embedding(b, mode, 1.5, d);
      for (Eigen::Index c = 0; c < d; ++c) {
        const auto dir = part.directions[static_cast<std::size_t>(c)];
        const auto it = std::find(full.directions.begin(), full.directions.end(), dir);
        ASSERT_NE(it, full.directions.end());
        const auto fc = it - full.directions.begin();
        EXPECT_LE((part.vectors.col(c) - full.vectors.col(fc)).cwiseAbs().maxCoeff(), 1e-15);
        EXPECT_EQ(part.signature(c), full.signature(fc));
      }
      // Retained directions are the leading non-trivial ones.
      std::vector<Eigen::Index> dirs = part.directions;
      std::sort(dirs.begin(), dirs.end());
      for (Eigen::Index c = 0; c < d; ++c) EXPECT_EQ(dirs[static_cast<std::size_t>(c)], c + 1);
    }
  }
}

TEST(BuildEmbedding, DegenerateEigenspaceRotationInvariance) {
  const Graph g = testing::pairgraph4();
  auto b = decompose_transition(g);
  ASSERT_NEAR(b.eigenvalues(2), b.eigenvalues(3), 1e-12);
  auto rotated = b;
  const double c = std::cos(0.7), s = std::sin(0.7);
  rotated.eigenvectors.col(2) = c * b.eigenvectors.col(2) + s * b.eigenvectors.col(3);
  rotated.eigenvectors.col(3) = -s * b.eigenvectors.col(2) + c * b.eigenvectors.col(3);
  for (double t : {0.5, 2.0}) {
    const auto e1 = build_full_embedding(b, EmbeddingMode::Exponential, t);
    const auto e2 = build_full_embedding(rotated, EmbeddingMode::Exponential, t);
    EXPECT_LE((e1.vectors * e1.vectors.transpose() - e2.vectors * e2.vectors.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    testing::for_each_set_partition(4, [&](const std::vector<int>& labels) {
      const auto p = Partition::from_labels(labels);
      EXPECT_NEAR(stability(e1, p), stability(e2, p), 1e-14);
    });
  }
}

TEST(BuildEmbedding, ModularityMode) {
  const Graph g = testing::pairgraph4();
  const auto b = decompose_modularity_matrix(g);
  const auto emb = build_embedding(b, EmbeddingMode::Modularity, 0.0, 3);
  EXPECT_FALSE(emb.time.has_value());
  EXPECT_DOUBLE_EQ(emb.scale, 1.0 / 48.0);
  const Eigen::VectorXd d = g.dense_adjacency().rowwise().sum();
  const Eigen::MatrixXd bq = g.dense_adjacency() - d * d.transpose() / d.sum();
  EXPECT_LE((emb.vectors * emb.signature.asDiagonal() * emb.vectors.transpose() - bq).cwiseAbs().maxCoeff(), 1e-10);
}

TEST(BuildEmbedding, Errors) {
  const auto t = decompose_transition(testing::pairgraph4());
  const auto m = decompose_modularity_matrix(testing::pairgraph4());
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code([&] { build_embedding(t, EmbeddingMode::Exponential, 1.0, 0); }), ErrorCode::DimOutOfRange);
  EXPECT_EQ(code([&] { build_embedding(t, EmbeddingMode::Exponential, 1.0, 4); }), ErrorCode::DimOutOfRange);
  EXPECT_EQ(code([&] { build_embedding(t, EmbeddingMode::Modularity, 1.0, 2); }), ErrorCode::ModeBasisMismatch);
  EXPECT_EQ(code([&] { build_embedding(m, EmbeddingMode::Linearised, 1.0, 2); }), ErrorCode::ModeBasisMismatch);
  EXPECT_THROW(build_embedding(t, EmbeddingMode::Linearised, 0.0, 2), Error);
  EXPECT_THROW(build_embedding(t, EmbeddingMode::Exponential, -1.0, 2), Error);
}

TEST(BasisDump, RoundTrip) {
  const auto b = decompose_transition(testing::random_connected_graph(9, 0.3, 4));
  const auto back = basis_from_json(nlohmann::json::parse(basis_to_json(b).dump()));
  EXPECT_EQ(back.source, b.source);
  EXPECT_EQ(back.trivial, b.trivial);
  EXPECT_EQ(back.total_weight, b.total_weight);
  EXPECT_EQ(back.eigenvalues, b.eigenvalues);
  EXPECT_EQ(back.eigenvectors, b.eigenvectors);
  EXPECT_EQ(back.pi, b.pi);
}

}  // namespace
}  // namespace mstab
