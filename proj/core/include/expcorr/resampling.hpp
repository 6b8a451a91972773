#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "expcorr/data_table.hpp"

namespace expcorr {

/// Ladder of K equally spaced group sizes offset + g*step, g = 1..K.
struct GroupPlan {
  std::size_t offset = 0;
  std::size_t step = 1;
  std::size_t count = 0;

  [[nodiscard]] std::vector<std::size_t> sizes() const;
  [[nodiscard]] std::size_t largest() const noexcept { return offset + count * step; }

  friend bool operator==(const GroupPlan&, const GroupPlan&) = default;
};

inline constexpr std::size_t kDefaultTargetGroups = 12;
inline constexpr std::size_t kDefaultReplicates = 500;
inline constexpr std::size_t kMaxSplitAttempts = 10000;

/// Chooses about `target_k` equally spaced group sizes whose largest value is
/// floor(n/2). When floor(n/2) <= target_k every size 1..floor(n/2) is used;
/// otherwise the step minimizing offset + step*|k - target_k| wins, with the
/// smallest step kept on ties. Throws DomainError for n < 4.
GroupPlan plan_groups(std::size_t n, std::size_t target_k = kDefaultTargetGroups);

struct SeriesEntry {
  std::size_t group_size = 0;
  double r_mean = 0.0;
  double r_sd = 0.0;
};

struct ResamplingSeries {
  std::vector<SeriesEntry> entries;
  std::size_t replicates = 0;
};

struct ResamplingOptions {
  std::size_t replicates = kDefaultReplicates;
  std::uint64_t seed = 0;
  unsigned threads = 1;  ///< 0 = all hardware threads
};

/// Split-half correlations of item means over random disjoint participant
/// groups, for every size in `plan`.
///
/// Replicate t of size index g draws a random permutation of the columns
/// from the stream keyed (seed, g, t); the first n_g columns form group 1 and
/// the next n_g group 2. If any item has no present cell in either group the
/// whole permutation is redrawn (at most kMaxSplitAttempts times, after which
/// a DataError names the smallest failing group size and item). r_sd uses
/// divisor T - 1. Results do not depend on `threads`.
ResamplingSeries resample_series(const DataTable& table, const GroupPlan& plan,
                                 const ResamplingOptions& options = {});

}  // namespace expcorr
