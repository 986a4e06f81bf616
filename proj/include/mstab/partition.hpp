#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "mstab/error.hpp"

namespace mstab {

/**
 * Assignment of n nodes to c non-overlapping groups.
 *
 * Labels are always canonical: groups are numbered 0..c-1 in order of first
 * appearance, so two Partitions compare equal iff they describe the same set
 * partition.
 */
class Partition {
 public:
  Partition() = default;

  /// Canonicalises arbitrary integer labels.
  template <typename Label>
  static Partition from_labels(std::span<const Label> labels) {
    Partition p;
    p.labels_.reserve(labels.size());
    std::unordered_map<long long, int> remap;
    for (const auto& raw : labels) {
      auto [it, inserted] = remap.try_emplace(static_cast<long long>(raw), p.num_groups_);
      if (inserted) ++p.num_groups_;
      p.labels_.push_back(it->second);
    }
    return p;
  }

  static Partition from_labels(const std::vector<int>& labels) {
    return from_labels(std::span<const int>(labels));
  }

  static Partition all_in_one(std::size_t n) { return Partition::from_labels(std::vector<int>(n, 0)); }

  static Partition singletons(std::size_t n) {
    std::vector<int> labels(n);
    for (std::size_t i = 0; i < n; ++i) labels[i] = static_cast<int>(i);
    return from_labels(labels);
  }

  std::size_t size() const noexcept { return labels_.size(); }
  int num_groups() const noexcept { return num_groups_; }
  int operator[](std::size_t i) const { return labels_[i]; }
  const std::vector<int>& labels() const noexcept { return labels_; }

  std::vector<std::vector<int>> groups() const {
    std::vector<std::vector<int>> out(static_cast<std::size_t>(num_groups_));
    for (std::size_t i = 0; i < labels_.size(); ++i)
      out[static_cast<std::size_t>(labels_[i])].push_back(static_cast<int>(i));
    return out;
  }

  std::vector<std::size_t> group_sizes() const {
    std::vector<std::size_t> out(static_cast<std::size_t>(num_groups_), 0);
    for (int l : labels_) ++out[static_cast<std::size_t>(l)];
    return out;
  }

  friend bool operator==(const Partition&, const Partition&) = default;

 private:
  std::vector<int> labels_;
  int num_groups_ = 0;
};

/// Reference labels carried alongside benchmark graphs.
using GroundTruth = Partition;

inline void require_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw Error(ErrorCode::SizeMismatch,
                std::string(what) + ": sizes " + std::to_string(a) + " and " + std::to_string(b));
}

}  // namespace mstab
