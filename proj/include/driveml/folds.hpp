#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace driveml {

/// Fold id in [0, k) per row. Each class is shuffled with its own draw from
/// the seeded stream and dealt round-robin, so per-fold class counts are
/// within one row of proportional.
std::vector<int> stratified_folds(std::span<const int> labels, int k, std::uint64_t seed);

/// Stratified subsample of `size` rows (ascending indices); proportional
/// allocation per class with largest-remainder rounding.
std::vector<std::size_t> stratified_subsample(std::span<const int> labels, std::size_t size, std::uint64_t seed);

}  // namespace driveml
