#include "expcorr/resampling.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <optional>
#include <string>

#include "expcorr/error.hpp"
#include "expcorr/parallel.hpp"
#include "expcorr/random.hpp"

namespace expcorr {

namespace {

constexpr std::size_t kReplicatesPerTask = 25;

struct SplitFailure {
  std::size_t item = 0;
};

// Scratch buffers for one worker task.
struct SplitWorkspace {
  std::vector<std::size_t> order;
  std::vector<double> sum1, sum2;
  std::vector<std::uint32_t> count1, count2;

  SplitWorkspace(std::size_t m, std::size_t n)
      : order(n), sum1(m), sum2(m), count1(m), count2(m) {}
};

void accumulate_group(const DataTable& table, std::span<const std::size_t> columns,
                      std::vector<double>& sum, std::vector<std::uint32_t>* count) {
  std::fill(sum.begin(), sum.end(), 0.0);
  if (count) std::fill(count->begin(), count->end(), 0u);
  const std::size_t m = table.items();
  for (std::size_t c : columns) {
    const double* col = table.column(c).data();
    double* s = sum.data();
    for (std::size_t i = 0; i < m; ++i) s[i] += col[i];
    if (count) {
      const unsigned char* mask = table.column_mask(c).data();
      std::uint32_t* k = count->data();
      for (std::size_t i = 0; i < m; ++i) k[i] += mask[i];
    }
  }
}

// One replicate: returns r, or the first uncovered item of the last attempt
// when the retry budget runs out.
std::optional<double> split_correlation(const DataTable& table, std::size_t group_size,
                                        RandomStream& rng, SplitWorkspace& ws,
                                        SplitFailure& failure) {
  const std::size_t m = table.items();
  const bool complete = table.is_complete();
  for (std::size_t attempt = 0; attempt < kMaxSplitAttempts; ++attempt) {
    std::iota(ws.order.begin(), ws.order.end(), std::size_t{0});
    rng.partial_shuffle(std::span<std::size_t>(ws.order), 2 * group_size);
    const std::span<const std::size_t> first(ws.order.data(), group_size);
    const std::span<const std::size_t> second(ws.order.data() + group_size, group_size);
    accumulate_group(table, first, ws.sum1, complete ? nullptr : &ws.count1);
    accumulate_group(table, second, ws.sum2, complete ? nullptr : &ws.count2);
    if (complete) {
      // Equal divisors: correlating sums is correlating means.
      return pearson_r(ws.sum1, ws.sum2);
    }
    bool covered = true;
    for (std::size_t i = 0; i < m; ++i) {
      if (ws.count1[i] == 0 || ws.count2[i] == 0) {
        failure.item = i;
        covered = false;
        break;
      }
    }
    if (!covered) continue;
    for (std::size_t i = 0; i < m; ++i) {
      ws.sum1[i] /= ws.count1[i];
      ws.sum2[i] /= ws.count2[i];
    }
    return pearson_r(ws.sum1, ws.sum2);
  }
  return std::nullopt;
}

}  // namespace

std::vector<std::size_t> GroupPlan::sizes() const {
  std::vector<std::size_t> out(count);
  for (std::size_t g = 0; g < count; ++g) out[g] = offset + (g + 1) * step;
  return out;
}

GroupPlan plan_groups(std::size_t n, std::size_t target_k) {
  if (n < 4) throw DomainError("at least 4 participants are needed to split into groups, got " + std::to_string(n));
  if (target_k == 0) throw DomainError("target group count must be positive");
  const std::size_t max_size = n / 2;
  if (max_size <= target_k) return {0, 1, max_size};
  GroupPlan best;
  std::size_t best_err = std::numeric_limits<std::size_t>::max();
  for (std::size_t s = 1; s <= max_size; ++s) {
    const std::size_t k = max_size / s;
    const std::size_t s0 = max_size - s * k;
    const std::size_t gap = k > target_k ? k - target_k : target_k - k;
    const std::size_t err = s0 + s * gap;
    if (err < best_err) {
      best = {s0, s, k};
      best_err = err;
    }
  }
  return best;
}

ResamplingSeries resample_series(const DataTable& table, const GroupPlan& plan,
                                 const ResamplingOptions& options) {
  const std::size_t T = options.replicates;
  if (T < 2) throw DomainError("resampling needs at least 2 replicates per group size");
  if (plan.count == 0) throw DomainError("group plan is empty");
  if (table.items() < 3) throw DataError("resampling needs at least 3 items");
  const auto sizes = plan.sizes();
  if (2 * plan.largest() > table.participants()) {
    throw DomainError("largest group size " + std::to_string(plan.largest()) + " exceeds half of " +
                      std::to_string(table.participants()) + " participants");
  }
  const std::size_t K = sizes.size();
  const std::size_t blocks = (T + kReplicatesPerTask - 1) / kReplicatesPerTask;
  std::vector<double> correlations(K * T, 0.0);
  std::vector<std::optional<SplitFailure>> failures(K * blocks);

  parallel_for(K * blocks, options.threads, [&](std::size_t task) {
    const std::size_t g = task / blocks;
    const std::size_t block = task % blocks;
    SplitWorkspace ws(table.items(), table.participants());
    const std::size_t begin = block * kReplicatesPerTask;
    const std::size_t end = std::min(T, begin + kReplicatesPerTask);
    for (std::size_t t = begin; t < end; ++t) {
      RandomStream rng(options.seed, {g, t});
      SplitFailure failure;
      const auto r = split_correlation(table, sizes[g], rng, ws, failure);
      if (!r) {
        failures[task] = failure;
        return;
      }
      correlations[g * T + t] = *r;
    }
  });

  for (std::size_t task = 0; task < failures.size(); ++task) {
    if (failures[task]) {
      const std::size_t g = task / blocks;
      throw DataError("resampling could not find a split covering every item after " +
                      std::to_string(kMaxSplitAttempts) + " attempts at group size " +
                      std::to_string(sizes[g]) + " (item " + std::to_string(failures[task]->item + 1) +
                      " has too many missing cells); use larger group sizes");
    }
  }

  ResamplingSeries series;
  series.replicates = T;
  series.entries.reserve(K);
  for (std::size_t g = 0; g < K; ++g) {
    const auto first = correlations.begin() + static_cast<std::ptrdiff_t>(g * T);
    const double mean = std::accumulate(first, first + static_cast<std::ptrdiff_t>(T), 0.0) /
                        static_cast<double>(T);
    double ss = 0.0;
    for (std::size_t t = 0; t < T; ++t) {
      const double d = correlations[g * T + t] - mean;
      ss += d * d;
    }
    series.entries.push_back({sizes[g], mean, std::sqrt(ss / static_cast<double>(T - 1))});
  }
  return series;
}

}  // namespace expcorr
