#pragma once

#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "mstab/error.hpp"
#include "mstab/graph.hpp"
#include "mstab/partition.hpp"
#include "mstab/spectral.hpp"

namespace mstab {

// SpectralBasis dump. Eigenvectors are stored column by column.

inline nlohmann::json basis_to_json(const SpectralBasis& b) {
  nlohmann::json j;
  j["source"] = std::string(to_string(b.source));
  j["total_weight"] = b.total_weight;
  j["trivial"] = b.trivial;
  j["eigenvalues"] = std::vector<double>(b.eigenvalues.data(), b.eigenvalues.data() + b.eigenvalues.size());
  j["pi"] = std::vector<double>(b.pi.data(), b.pi.data() + b.pi.size());
  auto& cols = j["eigenvectors"] = nlohmann::json::array();
  for (Eigen::Index k = 0; k < b.eigenvectors.cols(); ++k) {
    const Eigen::VectorXd c = b.eigenvectors.col(k);
    cols.push_back(std::vector<double>(c.data(), c.data() + c.size()));
  }
  return j;
}

inline SpectralBasis basis_from_json(const nlohmann::json& j) {
  try {
    SpectralBasis b;
    b.source = parse_basis_source(j.at("source").get<std::string>());
    b.total_weight = j.at("total_weight").get<double>();
    b.trivial = j.at("trivial").get<Eigen::Index>();
    const auto vals = j.at("eigenvalues").get<std::vector<double>>();
    const auto pi = j.at("pi").get<std::vector<double>>();
    const auto cols = j.at("eigenvectors").get<std::vector<std::vector<double>>>();
    const auto n = static_cast<Eigen::Index>(vals.size());
    if (pi.size() != vals.size() || cols.size() != vals.size() || b.trivial < 0 || b.trivial >= n)
      throw Error(ErrorCode::SizeMismatch, "basis dump has inconsistent sizes");
    b.eigenvalues = Eigen::Map<const Eigen::VectorXd>(vals.data(), n);
    b.pi = Eigen::Map<const Eigen::VectorXd>(pi.data(), n);
    b.eigenvectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
      if (static_cast<Eigen::Index>(cols[static_cast<std::size_t>(k)].size()) != n)
        throw Error(ErrorCode::SizeMismatch, "basis dump has inconsistent sizes");
      b.eigenvectors.col(k) = Eigen::Map<const Eigen::VectorXd>(cols[static_cast<std::size_t>(k)].data(), n);
    }
    return b;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::MalformedLine, std::string("basis dump: ") + e.what());
  }
}

/// "node_id group_id" per line, 0-based node ids covering 0..n-1 once each.
inline Partition read_partition(std::istream& in) {
  std::map<int, long long> labels;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto toks = detail::split_ws(line);
    if (detail::skip_line(toks)) continue;
    if (toks.size() != 2) throw Error(ErrorCode::MalformedLine, detail::line_tag(lineno) + "expected 'node_id group_id'");
    const int node = detail::parse_index(toks[0], IndexBase::Zero, lineno);
    long long group = 0;
    if (!detail::parse_number(toks[1], group))
      throw Error(ErrorCode::MalformedLine, detail::line_tag(lineno) + "bad group id '" + std::string(toks[1]) + "'");
    if (!labels.emplace(node, group).second)
      throw Error(ErrorCode::MalformedLine, detail::line_tag(lineno) + "node " + std::to_string(node) + " listed twice");
  }
  std::vector<long long> raw;
  raw.reserve(labels.size());
  int expect = 0;
  for (const auto& [node, group] : labels) {
    if (node != expect)
      throw Error(ErrorCode::MalformedLine, "partition file has no entry for node " + std::to_string(expect));
    raw.push_back(group);
    ++expect;
  }
  return Partition::from_labels(std::span<const long long>(raw));
}

inline void write_partition(std::ostream& out, const Partition& p) {
  for (std::size_t i = 0; i < p.size(); ++i) out << i << ' ' << p[i] << '\n';
}

}  // namespace mstab
