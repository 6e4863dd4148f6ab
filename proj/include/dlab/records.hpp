#pragma once

#include <cstdint>
#include <optional>
#include <unordered_set>
#include <vector>

#include "dlab/rng.hpp"
#include "dlab/walk.hpp"

namespace dlab {

// Distinct-visit counters of the skeleton chain of the height process:
// the walk's height sequence with repeats removed. Index k of the
// skeleton runs over height changes; rho_k is the walk time of the k-th
// change (rho_0 = 0) and the counter at level z holds the number of
// skeleton visits to z up to the current index.
class LevelCounts {
 public:
  explicit LevelCounts(int64_t start) : lo_(start), counts_(1, 0) {}

  int64_t increment(int64_t z) {
    ensure(z);
    return ++counts_[static_cast<size_t>(z - lo_)];
  }
  int64_t at(int64_t z) const {
    if (z < lo_ || z >= lo_ + static_cast<int64_t>(counts_.size())) return 0;
    return counts_[static_cast<size_t>(z - lo_)];
  }
  int64_t sum() const {
    int64_t s = 0;
    for (int64_t c : counts_) s += c;
    return s;
  }
  int64_t min_level() const { return lo_; }
  int64_t max_level() const { return lo_ + static_cast<int64_t>(counts_.size()) - 1; }

 private:
  void ensure(int64_t z) {
    if (z < lo_) {
      size_t grow = static_cast<size_t>(lo_ - z);
      grow = std::max(grow, counts_.size());
      counts_.insert(counts_.begin(), grow, 0);
      lo_ -= static_cast<int64_t>(grow);
    } else if (z >= lo_ + static_cast<int64_t>(counts_.size())) {
      size_t need = static_cast<size_t>(z - lo_) + 1;
      counts_.resize(std::max(need, 2 * counts_.size()), 0);
    }
  }

  int64_t lo_;
  std::vector<int64_t> counts_;
};

struct RecordResult {
  bool reached = false;
  int64_t time = -1;        // rho_k of the record, in walk steps
  int64_t level = 0;        // the level whose counter hit the threshold
  int64_t threshold = 0;
  int64_t steps = 0;        // walk steps consumed
  int64_t skeleton_index = 0;
};

struct RecordOptions {
  int64_t threshold = 1;
  std::optional<int64_t> target_level;                  // restrict to one level
  int64_t horizon = INT64_MAX;                          // max walk steps
  const std::unordered_set<int64_t>* level_grid = nullptr;  // restrict to a level set
};

// Streams the walk through `next_height` (height after one more step)
// and stops at the first rho_k whose skeleton counter reaches the
// threshold at an admissible level. Never materializes the path.
template <class HeightStream>
RecordResult scan_record(HeightStream&& next_height, int64_t start_height, const RecordOptions& opt) {
  RecordResult r;
  r.threshold = opt.threshold;
  LevelCounts counts(start_height);
  auto admissible = [&](int64_t z) {
    if (opt.target_level && z != *opt.target_level) return false;
    if (opt.level_grid && !opt.level_grid->count(z)) return false;
    return true;
  };
  int64_t last = start_height;
  int64_t k = 0;
  if (counts.increment(last) >= opt.threshold && admissible(last)) {
    r.reached = true;
    r.time = 0;
    r.level = last;
    return r;
  }
  for (int64_t n = 1; n <= opt.horizon; ++n) {
    int64_t h = next_height();
    r.steps = n;
    if (h == last) continue;
    ++k;
    last = h;
    if (counts.increment(h) >= opt.threshold && admissible(h)) {
      r.reached = true;
      r.time = n;
      r.level = h;
      r.skeleton_index = k;
      return r;
    }
  }
  r.skeleton_index = k;
  return r;
}

// ceil(u * n^dim / (dim+1)) with a guard against float fuzz on values
// that are exact integers in the intended arithmetic.
int64_t cylinder_visit_threshold(double u, int n, int dim);
int64_t one_d_visit_threshold(double u, int64_t n);

// Record time of the cylinder walk at a fixed level (or the infimum
// over levels when target_level is unset).
RecordResult cylinder_record(const WalkConfig& cfg, double u,
                             std::optional<int64_t> target_level, int64_t horizon, Rng& rng);

// First time the local time of the 1D biased walk at some level reaches
// ceil(u*n). The 1D walk is non-lazy, so skeleton time equals walk time.
RecordResult one_d_record(double u, int64_t n, double delta, Rng& rng,
                          int64_t horizon = INT64_MAX,
                          const std::unordered_set<int64_t>* level_grid = nullptr);

// Levels floor(l*n/big_l) for |l| <= big_l^2 (the truncated-infimum grid).
std::unordered_set<int64_t> truncated_level_grid(int64_t n, int64_t big_l);

}  // namespace dlab
