#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "mstab/partition.hpp"

// Entropies use natural logarithms; VI is reported in nats.

namespace mstab {

/// Joint group counts of two partitions over the same nodes.
class Contingency {
 public:
  Contingency(const Partition& a, const Partition& b) : n_(a.size()), rows_(a.group_sizes()), cols_(b.group_sizes()) {
    require_same_size(a.size(), b.size(), "contingency");
    for (std::size_t i = 0; i < n_; ++i) ++cells_[{a[i], b[i]}];
  }

  std::size_t n() const noexcept { return n_; }
  const std::map<std::pair<int, int>, std::size_t>& cells() const noexcept { return cells_; }
  const std::vector<std::size_t>& row_marginals() const noexcept { return rows_; }
  const std::vector<std::size_t>& col_marginals() const noexcept { return cols_; }

  double entropy_rows() const { return entropy(rows_); }
  double entropy_cols() const { return entropy(cols_); }

  /// H(rows | cols)
  double conditional_rows() const {
    double h = 0.0;
    for (const auto& [uv, c] : cells_) h -= term(c, cols_[static_cast<std::size_t>(uv.second)]);
    return h;
  }

  /// H(cols | rows)
  double conditional_cols() const {
    double h = 0.0;
    for (const auto& [uv, c] : cells_) h -= term(c, rows_[static_cast<std::size_t>(uv.first)]);
    return h;
  }

  double mutual_information() const {
    // Symmetric form; exactly H when both sides are the same partition.
    return std::max(0.0, 0.5 * (entropy_rows() + entropy_cols() - conditional_rows() - conditional_cols()));
  }

 private:
  double term(std::size_t joint, std::size_t marginal) const {
    const double pj = static_cast<double>(joint) / static_cast<double>(n_);
    return pj * std::log(static_cast<double>(joint) / static_cast<double>(marginal));
  }

  double entropy(const std::vector<std::size_t>& sizes) const {
    double h = 0.0;
    for (auto s : sizes)
      if (s > 0) h -= term(s, n_);
    return h;
  }

  std::size_t n_;
  std::vector<std::size_t> rows_, cols_;
  std::map<std::pair<int, int>, std::size_t> cells_;
};

/// I / sqrt(H1 H2). Both all-in-one gives 1; exactly one all-in-one gives 0.
inline double nmi(const Partition& a, const Partition& b) {
  Contingency c(a, b);
  const double ha = c.entropy_rows(), hb = c.entropy_cols();
  const bool za = a.num_groups() <= 1, zb = b.num_groups() <= 1;
  if (za && zb) return 1.0;
  if (za || zb) return 0.0;
  return std::clamp(c.mutual_information() / std::sqrt(ha * hb), 0.0, 1.0);
}

/**
 * U = I(truth; computed) / H(computed). Equals 1 when every computed group
 * is a union of truth groups. An all-in-one computed partition scores 1
 * only against an all-in-one truth.
 */
inline double uncertainty_coefficient(const Partition& truth, const Partition& computed) {
  Contingency c(truth, computed);
  if (computed.num_groups() <= 1) return truth.num_groups() <= 1 ? 1.0 : 0.0;
  // I / H(computed) = 1 - H(computed | truth) / H(computed)
  return std::clamp(1.0 - c.conditional_cols() / c.entropy_cols(), 0.0, 1.0);
}

/// H(a|b) + H(b|a).
inline double variation_of_information(const Partition& a, const Partition& b) {
  Contingency c(a, b);
  return c.conditional_rows() + c.conditional_cols();
}

struct SankeyLink {
  int from;
  int to;
  std::size_t count;

  friend bool operator==(const SankeyLink&, const SankeyLink&) = default;
};

/// One link per non-empty contingency cell, sorted by (from, to).
inline std::vector<SankeyLink> sankey_links(const Partition& a, const Partition& b) {
  Contingency c(a, b);
  std::vector<SankeyLink> out;
  out.reserve(c.cells().size());
  for (const auto& [uv, count] : c.cells()) out.push_back({uv.first, uv.second, count});
  return out;
}

inline void to_json(nlohmann::json& j, const SankeyLink& link) {
  j = nlohmann::json{{"from", link.from}, {"to", link.to}, {"count", link.count}};
}

}  // namespace mstab
