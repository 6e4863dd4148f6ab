#include "dlab/disconnect.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <stdexcept>
#include <unordered_set>

namespace dlab {

namespace {

int64_t ipow(int64_t b, int e) {
  int64_t r = 1;
  for (int i = 0; i < e; ++i) r *= b;
  return r;
}

}  // namespace

TraceStore::TraceStore(const Geometry& g) : geom_(g) {
  geom_.validate();
  if (geom_.dim == 2) {
    if (geom_.n > 64) throw std::invalid_argument("trace store: side length > 64 unsupported");
    words_ = geom_.n;  // one word per torus row
  } else {
    int64_t vol = ipow(geom_.n, geom_.dim);
    if (vol > (1 << 22)) throw std::invalid_argument("trace store: level volume too large");
    words_ = static_cast<int>((vol + 63) / 64);
  }
}

uint32_t TraceStore::flat_index(const Site& s) const {
  uint32_t idx = 0;
  for (int i = geom_.dim - 1; i >= 0; --i) idx = idx * geom_.n + static_cast<uint32_t>(s.torus[i]);
  return idx;
}

bool TraceStore::visit(const Site& s, int64_t time) {
  uint32_t flat = flat_index(s);
  auto& lvl = levels_[s.height];
  if (lvl.words.empty()) lvl.words.assign(words_, 0);
  uint32_t word, bit;
  if (geom_.dim == 2) {
    word = flat / geom_.n;
    bit = flat % geom_.n;
  } else {
    word = flat / 64;
    bit = flat % 64;
  }
  if (lvl.words[word] & (1ull << bit)) return false;
  lvl.words[word] |= 1ull << bit;
  lvl.count += 1;
  lvl.first_visits.emplace_back(flat, time);
  if (!any_) {
    min_h_ = max_h_ = s.height;
    any_ = true;
  } else {
    min_h_ = std::min(min_h_, s.height);
    max_h_ = std::max(max_h_, s.height);
  }
  ++distinct_;
  return true;
}

bool TraceStore::occupied(int64_t level, uint32_t flat) const {
  auto it = levels_.find(level);
  if (it == levels_.end()) return false;
  uint32_t word = geom_.dim == 2 ? flat / geom_.n : flat / 64;
  uint32_t bit = geom_.dim == 2 ? flat % geom_.n : flat % 64;
  return (it->second.words[word] >> bit) & 1ull;
}

const LevelOcc* TraceStore::level(int64_t h) const {
  auto it = levels_.find(h);
  return it == levels_.end() ? nullptr : &it->second;
}

int64_t TraceStore::level_count(int64_t h) const {
  auto it = levels_.find(h);
  return it == levels_.end() ? 0 : it->second.count;
}

std::vector<uint64_t> TraceStore::mask_at(int64_t h, int64_t t) const {
  std::vector<uint64_t> mask(words_, 0);
  auto it = levels_.find(h);
  if (it == levels_.end()) return mask;
  for (const auto& [flat, time] : it->second.first_visits) {
    if (time > t) break;  // visits are recorded in time order
    uint32_t word = geom_.dim == 2 ? flat / geom_.n : flat / 64;
    uint32_t bit = geom_.dim == 2 ? flat % geom_.n : flat % 64;
    mask[word] |= 1ull << bit;
  }
  return mask;
}

namespace {

// ---- d == 2 mask machinery: one uint64 per torus row ----

struct MaskOps {
  int n;
  uint64_t full;

  uint64_t rot1(uint64_t m) const {
    if (n == 1) return m;
    return ((m << 1) | (m >> (n - 1))) & full;
  }
  uint64_t rotm1(uint64_t m) const {
    if (n == 1) return m;
    return ((m >> 1) | (m << (n - 1))) & full;
  }

  // all sites within lateral Linf distance <= 1 (center included)
  void dilate_linf(const std::vector<uint64_t>& in, std::vector<uint64_t>& out) const {
    thread_local std::vector<uint64_t> tmp;
    tmp.assign(in.size(), 0);
    for (int y = 0; y < n; ++y) tmp[y] = in[y] | rot1(in[y]) | rotm1(in[y]);
    for (int y = 0; y < n; ++y) {
      int ym = y == 0 ? n - 1 : y - 1;
      int yp = y == n - 1 ? 0 : y + 1;
      out[y] = tmp[y] | tmp[ym] | tmp[yp];
    }
  }

  // all sites within lateral L1 distance <= 1 (center included)
  void dilate_l1(const std::vector<uint64_t>& in, std::vector<uint64_t>& out) const {
    for (int y = 0; y < n; ++y) {
      int ym = y == 0 ? n - 1 : y - 1;
      int yp = y == n - 1 ? 0 : y + 1;
      out[y] = in[y] | rot1(in[y]) | rotm1(in[y]) | in[ym] | in[yp];
    }
  }

  void fill(std::vector<uint64_t>& seed, const std::vector<uint64_t>& allowed, Adjacency adj) const {
    thread_local std::vector<uint64_t> d;
    d.assign(seed.size(), 0);
    bool changed = true;
    while (changed) {
      changed = false;
      if (adj == Adjacency::Linf)
        dilate_linf(seed, d);
      else
        dilate_l1(seed, d);
      for (int y = 0; y < n; ++y) {
        uint64_t nw = seed[y] | (d[y] & allowed[y]);
        if (nw != seed[y]) {
          seed[y] = nw;
          changed = true;
        }
      }
    }
  }
};

bool bfs_masks(const TraceStore& trace, Adjacency adj, int64_t t, int64_t* witness) {
  const Geometry& g = trace.geometry();
  const int n = g.n;
  MaskOps ops{n, n == 64 ? ~0ull : ((1ull << n) - 1)};
  const int64_t lo = trace.min_height() - 1, hi = trace.max_height() + 1;
  const size_t H = static_cast<size_t>(hi - lo + 1);
  std::vector<std::vector<uint64_t>> vac(H), reach(H);
  for (size_t i = 0; i < H; ++i) {
    auto occ = trace.mask_at(lo + static_cast<int64_t>(i), t);
    vac[i].resize(n);
    for (int y = 0; y < n; ++y) vac[i][y] = ~occ[y] & ops.full;
    reach[i].assign(n, 0);
  }
  reach[H - 1] = vac[H - 1];  // top window level is fully vacant

  std::vector<uint64_t> cand(n);
  auto relax = [&](size_t dst, size_t src) -> bool {
    // vertical move src -> dst
    if (adj == Adjacency::Linf)
      ops.dilate_linf(reach[src], cand);
    else
      cand = reach[src];
    bool grew = false;
    for (int y = 0; y < n; ++y) {
      uint64_t nw = reach[dst][y] | (cand[y] & vac[dst][y]);
      if (nw != reach[dst][y]) {
        reach[dst][y] = nw;
        grew = true;
      }
    }
    if (grew) ops.fill(reach[dst], vac[dst], adj);
    return grew;
  };

  bool changed = true;
  while (changed) {
    changed = false;
    for (size_t i = H - 1; i-- > 0;)
      if (relax(i, i + 1)) changed = true;
    for (size_t i = 1; i < H; ++i)
      if (relax(i, i - 1)) changed = true;
    bool bottom = false;
    for (int y = 0; y < n; ++y) bottom |= reach[0][y] != 0;
    if (bottom) return false;  // top and bottom connected
  }
  if (witness) {
    size_t lowest = H - 1;
    for (size_t i = 0; i < H; ++i) {
      bool nonempty = false;
      for (int y = 0; y < n; ++y) nonempty |= reach[i][y] != 0;
      if (nonempty) {
        lowest = i;
        break;
      }
    }
    *witness = lo + static_cast<int64_t>(lowest);
  }
  return true;
}

// ---- generic fallback / independent verifier: explicit flood fill ----

bool bfs_flood(const TraceStore& trace, Adjacency adj, int64_t t, int64_t* witness,
               int window_pad = 1) {
  const Geometry& g = trace.geometry();
  const int64_t lo = trace.min_height() - window_pad, hi = trace.max_height() + window_pad;
  const int64_t vol = ipow(g.n, g.dim);

  std::unordered_map<int64_t, std::vector<uint64_t>> occ;
  for (int64_t h = lo; h <= hi; ++h) occ.emplace(h, trace.mask_at(h, t));
  auto is_occ = [&](int64_t h, uint32_t flat) {
    const auto& m = occ.at(h);
    uint32_t word = g.dim == 2 ? flat / g.n : flat / 64;
    uint32_t bit = g.dim == 2 ? flat % g.n : flat % 64;
    return ((m[word] >> bit) & 1ull) != 0;
  };

  std::unordered_set<int64_t> seen;
  std::deque<std::pair<int64_t, uint32_t>> queue;
  auto push = [&](int64_t h, uint32_t flat) {
    int64_t id = (h - lo) * vol + flat;
    if (seen.insert(id).second) queue.emplace_back(h, flat);
  };
  for (uint32_t f = 0; f < static_cast<uint32_t>(vol); ++f) push(hi, f);

  Geometry cg = g;
  cg.adjacency = adj;
  int64_t lowest = hi;
  while (!queue.empty()) {
    auto [h, flat] = queue.front();
    queue.pop_front();
    lowest = std::min(lowest, h);
    if (h == lo) return false;
    Site s;
    uint32_t rem = flat;
    for (int i = 0; i < g.dim; ++i) {
      s.torus[i] = static_cast<int32_t>(rem % g.n);
      rem /= g.n;
    }
    s.height = h;
    for (const Site& nb : neighbors(cg, s)) {
      if (nb.height < lo || nb.height > hi) continue;
      uint32_t nf = trace.flat_index(nb);
      if (!is_occ(nb.height, nf)) push(nb.height, nf);
    }
  }
  if (witness) *witness = lowest;
  return true;
}

bool bfs_dispatch(const TraceStore& trace, Adjacency adj, int64_t t, int64_t* witness) {
  if (trace.empty()) return false;
  if (trace.geometry().dim == 2) return bfs_masks(trace, adj, t, witness);
  return bfs_flood(trace, adj, t, witness);
}

}  // namespace

bool disconnects(const TraceStore& trace, Adjacency adj, int64_t* witness) {
  return bfs_dispatch(trace, adj, INT64_MAX, witness);
}

bool disconnects_at(const TraceStore& trace, Adjacency adj, int64_t t, int64_t* witness) {
  return bfs_dispatch(trace, adj, t, witness);
}

bool disconnects_flood(const TraceStore& trace, Adjacency adj, int64_t t, int window_pad) {
  if (trace.empty()) return false;
  return bfs_flood(trace, adj, t, nullptr, window_pad);
}

DisconnectionReport detect_disconnection(const WalkConfig& cfg, const DetectSchedule& schedule,
                                         int64_t horizon, Rng& rng, Adjacency complement_adjacency) {
  cfg.validate();
  DisconnectionReport rep;
  TraceStore trace(cfg.geom);
  Site start = sample_start(cfg, rng);
  CylinderStepper stepper(cfg, start);
  trace.visit(start, 0);

  const int64_t vol = ipow(cfg.geom.n, cfg.geom.dim);
  const int64_t theta_step =
      schedule.theta_chk > 0 ? std::max<int64_t>(1, static_cast<int64_t>(std::ceil(
                                                        schedule.theta_chk * static_cast<double>(vol))))
                             : INT64_MAX;
  int64_t next_geom = schedule.first > 0 ? schedule.first : vol;
  int64_t last_false = -1;

  auto evaluate = [&](int64_t now) -> bool {
    ++rep.checkpoints_probed;
    if (!disconnects(trace, complement_adjacency)) {
      last_false = now;
      return false;
    }
    // exact localization: verdicts are monotone in time
    int64_t lo = last_false, hi = now;
    while (hi - lo > 1) {
      int64_t mid = lo + (hi - lo) / 2;
      ++rep.checkpoints_probed;
      if (disconnects_at(trace, complement_adjacency, mid))
        hi = mid;
      else
        lo = mid;
    }
    rep.found = true;
    rep.t_disconnect = hi;
    return true;
  };

  auto finish = [&](int64_t steps) {
    rep.steps_simulated = steps;
    trace.set_steps(steps);
    rep.window_lo = trace.min_height() - 1;
    rep.window_hi = trace.max_height() + 1;
    rep.distinct_sites = trace.distinct_sites();
    if (rep.found) disconnects_at(trace, complement_adjacency, rep.t_disconnect, &rep.witness_level);
    return rep;
  };

  if (schedule.every_step) {
    if (evaluate(0)) return finish(0);
  }
  for (int64_t n = 1; n <= horizon; ++n) {
    stepper.step(rng);
    bool fresh = trace.visit(stepper.site(), n);
    bool probe = false;
    if (schedule.every_step) {
      probe = fresh;
    } else {
      if (n >= next_geom) {
        probe = true;
        while (next_geom <= n)
          next_geom = std::max(next_geom + 1,
                               static_cast<int64_t>(static_cast<double>(next_geom) * schedule.ratio));
      }
      if (fresh && theta_step != INT64_MAX && trace.level_count(stepper.height()) % theta_step == 0)
        probe = true;
    }
    if (probe && evaluate(n)) return finish(n);
  }
  return finish(horizon);
}

}  // namespace dlab
