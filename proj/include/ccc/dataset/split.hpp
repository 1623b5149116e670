#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "ccc/dataset/record.hpp"

namespace ccc {

struct FoldSplit {
  int k{0};
  /// fold_of[i] is the validation fold of records[i].
  std::vector<int> fold_of;
  std::unordered_map<std::string, int> assignments;

  std::vector<std::size_t> validation(int fold) const;
  std::vector<std::size_t> training(int fold) const;
};

/// Stratified by cluster label: each class is shuffled with the seed and
/// dealt round-robin, continuing the rotation from where the previous class
/// stopped (classes in the order cluster, non-cluster, unknown). Per-class
/// and total fold sizes therefore differ by at most one.
/// Throws InvalidArgument for k < 2 or duplicate ids, InsufficientRecords
/// when the set is empty or a present class has fewer than k records.
FoldSplit kfold_split(std::span<const MultiChannelRecord> records, int k, std::uint64_t seed);

struct TrainTestSplit {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// 4:1 stratified split. The test set holds round(N/5) records distributed
/// over classes by largest remainder. Throws InsufficientRecords below 5.
TrainTestSplit split_412(std::span<const MultiChannelRecord> records, std::uint64_t seed);

}  // namespace ccc
