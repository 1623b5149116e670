#include "ccc/dataset/split.hpp"

#include <algorithm>
#include <array>
#include <unordered_set>

#include <fmt/format.h>

#include "ccc/error.hpp"
#include "ccc/util.hpp"

namespace ccc {

namespace {

constexpr std::array<ClusterLabel, 3> kClassOrder{ClusterLabel::Cluster, ClusterLabel::NonCluster,
                                                  ClusterLabel::Unknown};

void check_unique_ids(std::span<const MultiChannelRecord> records) {
  std::unordered_set<std::string> seen;
  for (const auto& r : records) {
    if (!seen.insert(r.id).second) throw Error(ErrorCode::InvalidArgument, "duplicate record id '" + r.id + "'");
  }
}

// Record indices of one class, shuffled by a class-specific stream.
std::vector<std::size_t> shuffled_class(std::span<const MultiChannelRecord> records, ClusterLabel c,
                                        std::uint64_t seed) {
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < records.size(); ++i)
    if (records[i].cluster_label == c) idx.push_back(i);
  Rng rng(seed ^ stable_hash(to_string(c)));
  for (std::size_t i = idx.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(i) - 1));
    std::swap(idx[i - 1], idx[j]);
  }
  return idx;
}

}  // namespace

std::vector<std::size_t> FoldSplit::validation(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] == fold) out.push_back(i);
  return out;
}

std::vector<std::size_t> FoldSplit::training(int fold) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < fold_of.size(); ++i)
    if (fold_of[i] != fold) out.push_back(i);
  return out;
}

FoldSplit kfold_split(std::span<const MultiChannelRecord> records, int k, std::uint64_t seed) {
  if (k < 2) throw Error(ErrorCode::InvalidArgument, fmt::format("k must be at least 2, got {}", k));
  if (records.empty()) throw Error(ErrorCode::InsufficientRecords, "no records to split");
  check_unique_ids(records);

  FoldSplit split;
  split.k = k;
  split.fold_of.assign(records.size(), -1);
  int offset = 0;
  for (ClusterLabel c : kClassOrder) {
    const auto idx = shuffled_class(records, c, seed);
    if (idx.empty()) continue;
    if (idx.size() < static_cast<std::size_t>(k)) {
      throw Error(ErrorCode::InsufficientRecords,
                  fmt::format("class '{}' has {} records, fewer than k={}", to_string(c), idx.size(), k));
    }
    for (std::size_t i = 0; i < idx.size(); ++i) {
      split.fold_of[idx[i]] = static_cast<int>((static_cast<std::size_t>(offset) + i) % static_cast<std::size_t>(k));
    }
    offset = static_cast<int>((static_cast<std::size_t>(offset) + idx.size()) % static_cast<std::size_t>(k));
  }
  for (std::size_t i = 0; i < records.size(); ++i) split.assignments.emplace(records[i].id, split.fold_of[i]);
  return split;
}

TrainTestSplit split_412(std::span<const MultiChannelRecord> records, std::uint64_t seed) {
  if (records.size() < 5) {
    throw Error(ErrorCode::InsufficientRecords,
                fmt::format("a 4:1 split needs at least 5 records, got {}", records.size()));
  }
  check_unique_ids(records);
  const std::size_t n = records.size();
  const std::size_t test_total = (2 * n + 5) / 10;  // round-half-up of n/5

  std::array<std::vector<std::size_t>, 3> classes;
  std::array<std::size_t, 3> quota{};
  std::array<std::size_t, 3> remainder{};  // numerators over n
  std::size_t assigned = 0;
  for (std::size_t c = 0; c < 3; ++c) {
    classes[c] = shuffled_class(records, kClassOrder[c], seed);
    const std::size_t exact_num = classes[c].size() * test_total;
    quota[c] = exact_num / n;
    remainder[c] = exact_num % n;
    assigned += quota[c];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b]; });
  for (std::size_t i = 0; assigned < test_total; ++i, ++assigned) ++quota[order[i % 3]];

  std::vector<char> is_test(n, 0);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t i = 0; i < quota[c]; ++i) is_test[classes[c][i]] = 1;
  TrainTestSplit out;
  for (std::size_t i = 0; i < n; ++i) (is_test[i] ? out.test : out.train).push_back(i);
  return out;
}

}  // namespace ccc
