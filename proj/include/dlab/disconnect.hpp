#pragma once

#include <cstdint>
#include <unordered_map>
#include <vector>

#include "dlab/rng.hpp"
#include "dlab/walk.hpp"

namespace dlab {

// Occupancy of one cylinder level: a bitmask over the n^d torus sites
// plus the first-visit time of each occupied site (in visit order, so a
// time prefix is a mask prefix). Memory stays proportional to the
// visited volume.
struct LevelOcc {
  std::vector<uint64_t> words;
  int64_t count = 0;
  std::vector<std::pair<uint32_t, int64_t>> first_visits;
};

class TraceStore {
 public:
  explicit TraceStore(const Geometry& g);

  // records a visit at walk time `time`; returns true when the site is new
  bool visit(const Site& s, int64_t time);

  uint32_t flat_index(const Site& s) const;
  bool occupied(int64_t level, uint32_t flat) const;
  const LevelOcc* level(int64_t h) const;
  // occupancy mask of a level restricted to sites first visited at or before t
  std::vector<uint64_t> mask_at(int64_t h, int64_t t) const;

  int64_t min_height() const { return min_h_; }
  int64_t max_height() const { return max_h_; }
  int64_t steps() const { return steps_; }
  void set_steps(int64_t n) { steps_ = n; }
  int64_t distinct_sites() const { return distinct_; }
  bool empty() const { return levels_.empty(); }
  int64_t level_count(int64_t h) const;
  int words_per_level() const { return words_; }

  const Geometry& geometry() const { return geom_; }

 private:
  Geometry geom_;
  int words_;
  std::unordered_map<int64_t, LevelOcc> levels_;
  int64_t min_h_ = 0, max_h_ = 0;
  int64_t steps_ = 0;
  int64_t distinct_ = 0;
  bool any_ = false;
};

// Whether the complement of the trace separates the top of the cylinder
// from the bottom, under the given complement adjacency (the walk's own
// adjacency plays no role here). The search runs on the height window
// [min-1, max+1]; levels outside are fully vacant and laterally
// connected, which makes the window reduction exact.
bool disconnects(const TraceStore& trace, Adjacency complement_adjacency,
                 int64_t* witness_level = nullptr);

// Same verdict on the trace restricted to walk time t.
bool disconnects_at(const TraceStore& trace, Adjacency complement_adjacency, int64_t t,
                    int64_t* witness_level = nullptr);

// Independent verifier: plain queue flood fill over explicit sites. The
// window pad widens the searched height range beyond the minimal
// [min-1, max+1]; the verdict must not depend on it.
bool disconnects_flood(const TraceStore& trace, Adjacency complement_adjacency, int64_t t,
                       int window_pad = 1);

struct DetectSchedule {
  double ratio = 1.5;        // geometric checkpoint growth
  int64_t first = -1;        // first checkpoint; defaults to n^d
  double theta_chk = 0.25;   // extra checkpoint when a level count crosses k*theta*n^d
  bool every_step = false;   // oracle mode: test at every trace change
};

struct DisconnectionReport {
  bool found = false;
  int64_t t_disconnect = -1;
  int64_t checkpoints_probed = 0;
  int64_t window_lo = 0, window_hi = 0;
  int64_t witness_level = 0;
  int64_t steps_simulated = 0;
  int64_t distinct_sites = 0;
};

// Runs the walk and locates the exact first disconnection time. With a
// checkpoint schedule the exact value is recovered by binary search on
// the stored first-visit times; monotonicity of the verdict makes the
// result schedule independent.
DisconnectionReport detect_disconnection(const WalkConfig& cfg, const DetectSchedule& schedule,
                                         int64_t horizon, Rng& rng,
                                         Adjacency complement_adjacency = Adjacency::Linf);

}  // namespace dlab
