#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <map>
#include <numeric>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "mstab/error.hpp"
#include "mstab/partition.hpp"

namespace mstab {

struct Edge {
  int i;
  int j;
  double w;

  friend bool operator==(const Edge&, const Edge&) = default;
};

struct Neighbour {
  int node;
  double w;
};

/**
 * Undirected, weighted, connected graph without self-loops.
 *
 * Each undirected edge is stored once with i < j, sorted by (i, j). A CSR
 * adjacency holds both orientations for O(log d) weight lookup. Immutable
 * after construction.
 */
class Graph {
 public:
  /// Validates and builds. Edges may be given in either orientation but
  /// each unordered pair at most once.
  static Graph from_edges(std::size_t n, std::vector<Edge> edges) {
    if (n == 0) throw Error(ErrorCode::InvalidArgument, "graph has no nodes");
    for (auto& e : edges) {
      if (e.i < 0 || e.j < 0 || static_cast<std::size_t>(e.i) >= n || static_cast<std::size_t>(e.j) >= n)
        throw Error(ErrorCode::InvalidArgument,
                    "edge (" + std::to_string(e.i) + "," + std::to_string(e.j) + ") out of range");
      if (e.i == e.j) throw Error(ErrorCode::SelfLoop, "self-loop at node " + std::to_string(e.i));
      if (!(e.w > 0.0) || !std::isfinite(e.w))
        throw Error(ErrorCode::NonPositiveWeight, "edge (" + std::to_string(e.i) + "," +
                                                      std::to_string(e.j) + ") has weight " +
                                                      std::to_string(e.w));
      if (e.i > e.j) std::swap(e.i, e.j);
    }
    std::sort(edges.begin(), edges.end(),
              [](const Edge& a, const Edge& b) { return std::pair(a.i, a.j) < std::pair(b.i, b.j); });
    for (std::size_t k = 1; k < edges.size(); ++k)
      if (edges[k].i == edges[k - 1].i && edges[k].j == edges[k - 1].j)
        throw Error(ErrorCode::ConflictingDuplicateEdge, "edge (" + std::to_string(edges[k].i) + "," +
                                                             std::to_string(edges[k].j) +
                                                             ") given twice");

    Graph g;
    g.n_ = n;
    g.edges_ = std::move(edges);
    g.offsets_.assign(n + 1, 0);
    for (const auto& e : g.edges_) {
      ++g.offsets_[static_cast<std::size_t>(e.i) + 1];
      ++g.offsets_[static_cast<std::size_t>(e.j) + 1];
    }
    std::partial_sum(g.offsets_.begin(), g.offsets_.end(), g.offsets_.begin());
    g.adj_.resize(2 * g.edges_.size());
    std::vector<std::size_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
    for (const auto& e : g.edges_) {
      g.adj_[fill[static_cast<std::size_t>(e.i)]++] = {e.j, e.w};
      g.adj_[fill[static_cast<std::size_t>(e.j)]++] = {e.i, e.w};
    }
    for (std::size_t v = 0; v < n; ++v)
      std::sort(g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v]),
                g.adj_.begin() + static_cast<std::ptrdiff_t>(g.offsets_[v + 1]),
                [](const Neighbour& a, const Neighbour& b) { return a.node < b.node; });

    g.degrees_.assign(n, 0.0);
    for (std::size_t v = 0; v < n; ++v)
      for (const auto& nb : g.neighbours(static_cast<int>(v))) g.degrees_[v] += nb.w;
    double two_m = 0.0;
    for (double d : g.degrees_) two_m += d;
    g.total_weight_ = two_m / 2.0;

    g.check_connected();
    return g;
  }

  std::size_t num_nodes() const noexcept { return n_; }
  const std::vector<Edge>& edges() const noexcept { return edges_; }
  std::span<const double> degrees() const noexcept { return degrees_; }
  double degree(int v) const { return degrees_[static_cast<std::size_t>(v)]; }

  /// m = sum_ij A_ij / 2.
  double total_weight() const noexcept { return total_weight_; }

  std::span<const Neighbour> neighbours(int v) const {
    const auto b = offsets_[static_cast<std::size_t>(v)];
    const auto e = offsets_[static_cast<std::size_t>(v) + 1];
    return {adj_.data() + b, e - b};
  }

  double weight(int a, int b) const {
    auto nbrs = neighbours(a);
    auto it = std::lower_bound(nbrs.begin(), nbrs.end(), b,
                               [](const Neighbour& x, int key) { return x.node < key; });
    return (it != nbrs.end() && it->node == b) ? it->w : 0.0;
  }

  Eigen::MatrixXd dense_adjacency() const {
    const auto n = static_cast<Eigen::Index>(n_);
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (const auto& e : edges_) {
      a(e.i, e.j) = e.w;
      a(e.j, e.i) = e.w;
    }
    return a;
  }

  /// pi_i = d_i / 2m.
  Eigen::VectorXd stationary() const {
    Eigen::VectorXd pi(static_cast<Eigen::Index>(n_));
    for (std::size_t v = 0; v < n_; ++v) pi(static_cast<Eigen::Index>(v)) = degrees_[v] / (2.0 * total_weight_);
    return pi;
  }

 private:
  void check_connected() const {
    std::vector<char> seen(n_, 0);
    std::vector<int> stack{0};
    seen[0] = 1;
    std::size_t reached = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (const auto& nb : neighbours(v)) {
        if (!seen[static_cast<std::size_t>(nb.node)]) {
          seen[static_cast<std::size_t>(nb.node)] = 1;
          ++reached;
          stack.push_back(nb.node);
        }
      }
    }
    if (reached != n_) {
      auto it = std::find(seen.begin(), seen.end(), 0);
      throw Error(ErrorCode::Disconnected,
                  "node " + std::to_string(it - seen.begin()) + " is not reachable from node 0 (" +
                      std::to_string(n_ - reached) + " of " + std::to_string(n_) + " nodes unreachable)");
    }
  }

  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_;
  std::vector<Neighbour> adj_;
  std::vector<double> degrees_;
  double total_weight_ = 0.0;
};

enum class IndexBase { Zero = 0, One = 1 };

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (pos < line.size()) {
    while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t' || line[pos] == '\r')) ++pos;
    if (pos >= line.size()) break;
    std::size_t end = pos;
    while (end < line.size() && line[end] != ' ' && line[end] != '\t' && line[end] != '\r') ++end;
    out.push_back(line.substr(pos, end - pos));
    pos = end;
  }
  return out;
}

template <typename T>
bool parse_number(std::string_view tok, T& out) {
  auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), out);
  return ec == std::errc() && ptr == tok.data() + tok.size();
}

inline std::string line_tag(std::size_t lineno) { return "line " + std::to_string(lineno) + ": "; }

inline int parse_index(std::string_view tok, IndexBase base, std::size_t lineno) {
  long long raw = 0;
  if (!parse_number(tok, raw))
    throw Error(ErrorCode::MalformedLine, line_tag(lineno) + "bad node index '" + std::string(tok) + "'");
  const long long idx = raw - static_cast<long long>(base);
  if (idx < 0 || idx > (1LL << 30))
    throw Error(ErrorCode::MalformedLine, line_tag(lineno) + "node index " + std::to_string(raw) +
                                              " outside the declared base");
  return static_cast<int>(idx);
}

inline bool skip_line(const std::vector<std::string_view>& toks) {
  return toks.empty() || toks.front().front() == '#';
}

}  // namespace detail

/**
 * Reads "i j [w]" lines. Comment lines start with '#'. Node count is the
 * largest index seen plus one. Repeated pairs (in either orientation) must
 * carry equal weights and are stored once.
 */
inline Graph load_edge_list(std::istream& in, IndexBase base = IndexBase::Zero) {
  std::map<std::pair<int, int>, std::pair<double, std::size_t>> seen;
  std::string line;
  std::size_t lineno = 0;
  int max_index = -1;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (detail::skip_line(toks)) continue;
    if (toks.size() < 2 || toks.size() > 3)
      throw Error(ErrorCode::MalformedLine, detail::line_tag(lineno) + "expected 'i j [w]'");
    int a = detail::parse_index(toks[0], base, lineno);
    int b = detail::parse_index(toks[1], base, lineno);
    double w = 1.0;
    if (toks.size() == 3 && !detail::parse_number(toks[2], w))
      throw Error(ErrorCode::MalformedLine, detail::line_tag(lineno) + "bad weight '" + std::string(toks[2]) + "'");
    if (a == b) throw Error(ErrorCode::SelfLoop, detail::line_tag(lineno) + "self-loop at node " + std::string(toks[0]));
    if (!(w > 0.0) || !std::isfinite(w))
      throw Error(ErrorCode::NonPositiveWeight, detail::line_tag(lineno) + "weight " + std::string(toks[2]));
    auto key = std::minmax(a, b);
    auto [it, inserted] = seen.try_emplace({key.first, key.second}, w, lineno);
    if (!inserted && it->second.first != w)
      throw Error(ErrorCode::ConflictingDuplicateEdge,
                  detail::line_tag(lineno) + "weight differs from line " + std::to_string(it->second.second));
    max_index = std::max({max_index, a, b});
  }
  if (max_index < 0) throw Error(ErrorCode::InvalidArgument, "edge list is empty");
  std::vector<Edge> edges;
  edges.reserve(seen.size());
  for (const auto& [key, val] : seen) edges.push_back({key.first, key.second, val.first});
  return Graph::from_edges(static_cast<std::size_t>(max_index) + 1, std::move(edges));
}

inline Graph load_edge_list(std::string_view text, IndexBase base = IndexBase::Zero) {
  std::istringstream in{std::string(text)};
  return load_edge_list(in, base);
}

/// Canonical text form: "i j w" per edge, sorted, 0-based, shortest
/// round-trip weight formatting.
inline std::string serialise(const Graph& g) {
  std::string out;
  char buf[64];
  for (const auto& e : g.edges()) {
    out += std::to_string(e.i);
    out += ' ';
    out += std::to_string(e.j);
    out += ' ';
    auto res = std::to_chars(buf, buf + sizeof(buf), e.w);
    out.append(buf, res.ptr);
    out += '\n';
  }
  return out;
}

struct LabelledGraph {
  Graph graph;
  GroundTruth truth;
};

/**
 * Ingests LFR benchmark output: network.dat ("i j", 1-based, both
 * orientations listed) and community.dat ("i label").
 */
inline LabelledGraph load_lfr(std::istream& network, std::istream& community) {
  std::map<int, long long> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(community, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (detail::skip_line(toks)) continue;
    if (toks.size() != 2)
      throw Error(ErrorCode::MalformedLine, "community " + detail::line_tag(lineno) + "expected 'i label'");
    int node = detail::parse_index(toks[0], IndexBase::One, lineno);
    long long label = 0;
    if (!detail::parse_number(toks[1], label))
      throw Error(ErrorCode::MalformedLine, "community " + detail::line_tag(lineno) + "bad label");
    if (!labels.emplace(node, label).second)
      throw Error(ErrorCode::MalformedLine, "community " + detail::line_tag(lineno) + "node listed twice");
  }
  if (labels.empty()) throw Error(ErrorCode::MissingCommunityLabel, "community file is empty");
  const int n = labels.rbegin()->first + 1;
  std::vector<long long> raw(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) {
    auto it = labels.find(v);
    if (it == labels.end())
      throw Error(ErrorCode::MissingCommunityLabel, "node " + std::to_string(v + 1) + " has no community label");
    raw[static_cast<std::size_t>(v)] = it->second;
  }

  std::map<std::pair<int, int>, std::size_t> directed;
  lineno = 0;
  while (std::getline(network, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (detail::skip_line(toks)) continue;
    if (toks.size() < 2 || toks.size() > 3)
      throw Error(ErrorCode::MalformedLine, "network " + detail::line_tag(lineno) + "expected 'i j'");
    int a = detail::parse_index(toks[0], IndexBase::One, lineno);
    int b = detail::parse_index(toks[1], IndexBase::One, lineno);
    if (a >= n || b >= n)
      throw Error(ErrorCode::MissingCommunityLabel,
                  "network " + detail::line_tag(lineno) + "node " + std::to_string(std::max(a, b) + 1) +
                      " has no community label");
    if (a == b) throw Error(ErrorCode::SelfLoop, "network " + detail::line_tag(lineno) + "self-loop");
    directed.try_emplace({a, b}, lineno);
  }
  std::vector<Edge> edges;
  for (const auto& [key, ln] : directed) {
    if (!directed.contains({key.second, key.first}))
      throw Error(ErrorCode::AsymmetricEdgeList, "network line " + std::to_string(ln) + ": edge " +
                                                     std::to_string(key.first + 1) + " " +
                                                     std::to_string(key.second + 1) +
                                                     " has no reverse orientation");
    if (key.first < key.second) edges.push_back({key.first, key.second, 1.0});
  }
  return {Graph::from_edges(static_cast<std::size_t>(n), std::move(edges)),
          Partition::from_labels(std::span<const long long>(raw))};
}

/// Planted-partition sampler; unit weights, groups of equal size laid out
/// contiguously. Disconnected draws are retried with the next sub-seed.
inline LabelledGraph planted_partition(int k, int size, double p_in, double p_out, std::uint64_t seed) {
  if (k < 1 || size < 2) throw Error(ErrorCode::InvalidArgument, "planted_partition needs k >= 1 and size >= 2");
  if (!(p_out >= 0.0 && p_out <= p_in && p_in <= 1.0))
    throw Error(ErrorCode::InvalidArgument, "planted_partition needs 0 <= p_out <= p_in <= 1");
  const int n = k * size;
  std::vector<int> truth(static_cast<std::size_t>(n));
  for (int v = 0; v < n; ++v) truth[static_cast<std::size_t>(v)] = v / size;

  constexpr int kMaxAttempts = 100;
  for (int attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 rng(seq);
    std::vector<Edge> edges;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        // 53-bit uniform in [0, 1); portable across standard libraries.
        const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
        const double p = truth[static_cast<std::size_t>(a)] == truth[static_cast<std::size_t>(b)] ? p_in : p_out;
        if (u < p) edges.push_back({a, b, 1.0});
      }
    }
    try {
      return {Graph::from_edges(static_cast<std::size_t>(n), std::move(edges)), Partition::from_labels(truth)};
    } catch (const Error& e) {
      if (e.code() != ErrorCode::Disconnected) throw;
    }
  }
  throw Error(ErrorCode::GenerationFailed,
              "planted_partition: 100 consecutive samples were disconnected; parameters too sparse");
}

}  // namespace mstab
