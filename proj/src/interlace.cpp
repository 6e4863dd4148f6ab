#include "dlab/interlace.hpp"
#include "dlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlab {

namespace {

std::vector<LPoint> box_boundary_shell(const LatBox& b) {
  std::vector<LPoint> out;
  for (const auto& p : b.sites()) {
    bool bd = false;
    for (int i = 0; i < b.dim && !bd; ++i) bd = p[i] == b.lo[i] || p[i] == b.hi[i];
    if (bd) out.push_back(p);
  }
  return out;
}

struct Dice {
  uint64_t bits = 0;
  int left = 0;
  int roll6(Rng& rng) {
    while (true) {
      if (left < 3) {
        bits = rng.next_u64();
        left = 63;
      }
      int v = static_cast<int>(bits & 7u);
      bits >>= 3;
      left -= 3;
      if (v < 6) return v;
    }
  }
};

}  // namespace

LPoint trajectory_site(const Trajectory& t, int32_t step) {
  LPoint p = t.start;
  for (int32_t i = 0; i < step; ++i) {
    uint8_t d = t.dirs[static_cast<size_t>(i)];
    p[d >> 1] += (d & 1) ? -1 : 1;
  }
  return p;
}

EquilibriumEstimate cloud_equilibrium(const LatBox& d_box, int r_esc, int64_t walks_per_site,
                                      Rng& rng) {
  LPoint center{};
  for (int i = 0; i < d_box.dim; ++i) center[i] = (d_box.lo[i] + d_box.hi[i]) / 2;
  return equilibrium_mc(box_boundary_shell(d_box), lat_ball(center, r_esc, d_box.dim),
                        walks_per_site, rng);
}

ExcursionCloud sample_cloud(double u, const LatBox& d_box, const LatBox& u_box, int r_esc,
                            Rng& rng, const EquilibriumEstimate* eq, int64_t eq_walks_per_site) {
  if (u < 0.0) throw std::invalid_argument("sample_cloud: u must be >= 0");
  if (d_box.dim != 3) throw std::invalid_argument("sample_cloud: implemented for Z^3");
  for (int i = 0; i < d_box.dim; ++i)
    if (d_box.lo[i] < u_box.lo[i] || d_box.hi[i] > u_box.hi[i])
      throw std::invalid_argument("sample_cloud: D must lie inside U");
  LPoint center{};
  int max_corner = 0;
  for (int i = 0; i < d_box.dim; ++i) {
    center[i] = (d_box.lo[i] + d_box.hi[i]) / 2;
    max_corner = std::max({max_corner, std::abs(u_box.lo[i] - center[i]),
                           std::abs(u_box.hi[i] - center[i])});
  }
  if (r_esc <= max_corner)
    throw std::invalid_argument("sample_cloud: escape radius must exceed the U box");

  ExcursionCloud cloud;
  cloud.u = u;
  cloud.d_box = d_box;
  cloud.u_box = u_box;
  cloud.r_esc = r_esc;

  EquilibriumEstimate local_eq;
  if (!eq) {
    Rng eq_rng = rng.fork(0xE9);
    local_eq = cloud_equilibrium(d_box, r_esc, eq_walks_per_site, eq_rng);
    eq = &local_eq;
  }
  cloud.cap_hat = eq->cap;
  cloud.cap_se = eq->cap_se;
  cloud.rel_bias_bound = eq->cap * green_decay_c0(d_box.dim) *
                         std::pow(static_cast<double>(r_esc), 2.0 - d_box.dim);
  cloud.bias_warn = cloud.rel_bias_bound > 0.01;

  // cumulative start weights
  std::vector<double> cum(eq->weight.size());
  double acc = 0.0;
  for (size_t i = 0; i < eq->weight.size(); ++i) {
    acc += eq->weight[i];
    cum[i] = acc;
  }

  const int64_t j = rng.next_poisson(u * eq->cap);
  std::vector<double> labels(static_cast<size_t>(j));
  for (auto& l : labels) l = u * (1.0 - rng.next_double());  // labels in (0, u]
  std::sort(labels.begin(), labels.end());

  LatBox kill = lat_ball(center, r_esc, d_box.dim);
  Dice dice;
  for (int64_t t = 0; t < j; ++t) {
    Trajectory traj;
    traj.label = labels[static_cast<size_t>(t)];
    double pick = rng.next_double() * acc;
    size_t idx = static_cast<size_t>(std::lower_bound(cum.begin(), cum.end(), pick) - cum.begin());
    idx = std::min(idx, cum.size() - 1);
    traj.start = eq->support[idx];
    LPoint pos = traj.start;
    while (kill.contains(pos)) {
      int d = dice.roll6(rng);
      traj.dirs.push_back(static_cast<uint8_t>(d));
      pos[d >> 1] += (d & 1) ? -1 : 1;
    }
    cloud.trajectories.push_back(std::move(traj));
  }

  // excursion extraction: for each trajectory, alternate between the
  // next entrance into D and the following exit from U
  for (size_t ti = 0; ti < cloud.trajectories.size(); ++ti) {
    const Trajectory& traj = cloud.trajectories[ti];
    LPoint pos = traj.start;
    int32_t steps = static_cast<int32_t>(traj.dirs.size());
    int32_t i = 0;
    while (i <= steps) {
      // find entrance into D
      while (i <= steps && !d_box.contains(pos)) {
        if (i == steps) break;
        uint8_t d = traj.dirs[static_cast<size_t>(i)];
        pos[d >> 1] += (d & 1) ? -1 : 1;
        ++i;
      }
      if (!d_box.contains(pos)) break;
      int32_t begin = i;
      while (i < steps && u_box.contains(pos)) {
        uint8_t d = traj.dirs[static_cast<size_t>(i)];
        pos[d >> 1] += (d & 1) ? -1 : 1;
        ++i;
      }
      // the trajectory leaves the kill ball, hence U, so the exit exists
      cloud.excursions.push_back({static_cast<int32_t>(ti), begin, i});
    }
  }
  return cloud;
}

int64_t VacantSample::count_vacant() const {
  int64_t c = 0;
  for (uint64_t w : mask) c += __builtin_popcountll(w);
  return c;
}

VacantSample vacant_set(const ExcursionCloud& cloud, const LatBox& box, double u_thin) {
  if (u_thin < 0.0) u_thin = cloud.u;
  VacantSample v;
  v.box = box;
  const int64_t vol = box.volume();
  v.mask.assign(static_cast<size_t>((vol + 63) / 64), ~0ull);
  // clear padding bits
  if (vol % 64) v.mask.back() = (1ull << (vol % 64)) - 1;
  int64_t stride[4] = {1, 0, 0, 0};
  for (int i = 1; i < box.dim; ++i) stride[i] = stride[i - 1] * box.side(i - 1);
  auto erase = [&](const LPoint& p) {
    if (!box.contains(p)) return;
    int64_t f = 0;
    for (int i = 0; i < box.dim; ++i) f += stride[i] * (p[i] - box.lo[i]);
    v.mask[static_cast<size_t>(f >> 6)] &= ~(1ull << (f & 63));
  };
  for (const auto& traj : cloud.trajectories) {
    if (traj.label > u_thin) continue;
    LPoint pos = traj.start;
    erase(pos);
    for (uint8_t d : traj.dirs) {
      pos[d >> 1] += (d & 1) ? -1 : 1;
      erase(pos);
    }
  }
  return v;
}

ClusterInfo vacant_clusters(const VacantSample& v, Adjacency adj) {
  const LatBox& box = v.box;
  const int64_t vol = box.volume();
  ClusterInfo info;
  info.label.assign(static_cast<size_t>(vol), -1);
  int64_t stride[4] = {1, 0, 0, 0};
  for (int i = 1; i < box.dim; ++i) stride[i] = stride[i - 1] * box.side(i - 1);

  std::vector<int64_t> stack;
  for (int64_t f0 = 0; f0 < vol; ++f0) {
    if (!v.vacant(f0) || info.label[static_cast<size_t>(f0)] >= 0) continue;
    int32_t cl = info.count++;
    LPoint mn, mx;
    stack.assign(1, f0);
    info.label[static_cast<size_t>(f0)] = cl;
    bool first = true;
    while (!stack.empty()) {
      int64_t f = stack.back();
      stack.pop_back();
      LPoint p;
      int64_t rem = f;
      for (int i = 0; i < box.dim; ++i) {
        p[i] = static_cast<int32_t>(box.lo[i] + rem % box.side(i));
        rem /= box.side(i);
      }
      if (first) {
        mn = mx = p;
        first = false;
      } else {
        for (int i = 0; i < box.dim; ++i) {
          mn[i] = std::min(mn[i], p[i]);
          mx[i] = std::max(mx[i], p[i]);
        }
      }
      // enumerate neighbors
      auto try_push = [&](const LPoint& q) {
        if (!box.contains(q)) return;
        int64_t g = 0;
        for (int i = 0; i < box.dim; ++i) g += stride[i] * (q[i] - box.lo[i]);
        if (!v.vacant(g) || info.label[static_cast<size_t>(g)] >= 0) return;
        info.label[static_cast<size_t>(g)] = cl;
        stack.push_back(g);
      };
      if (adj == Adjacency::L1) {
        for (int a = 0; a < box.dim; ++a)
          for (int s = -1; s <= 1; s += 2) {
            LPoint q = p;
            q[a] += s;
            try_push(q);
          }
      } else {
        LPoint off{};
        for (int i = 0; i < box.dim; ++i) off[i] = -1;
        while (true) {
          bool zero = true;
          for (int i = 0; i < box.dim; ++i) zero &= off[i] == 0;
          if (!zero) {
            LPoint q = p;
            for (int i = 0; i < box.dim; ++i) q[i] += off[i];
            try_push(q);
          }
          int i = 0;
          while (i < box.dim && ++off[i] > 1) {
            off[i] = -1;
            ++i;
          }
          if (i == box.dim) break;
        }
      }
    }
    int32_t diam = 0;
    for (int i = 0; i < box.dim; ++i) diam = std::max(diam, mx[i] - mn[i]);
    info.diam.push_back(diam);
  }
  return info;
}

bool exist_event(const VacantSample& v, int radius, Adjacency adj) {
  LatBox ball = lat_ball(LPoint{}, radius, v.box.dim);
  for (int i = 0; i < v.box.dim; ++i)
    if (ball.lo[i] < v.box.lo[i] || ball.hi[i] > v.box.hi[i])
      throw std::invalid_argument("exist_event: sample does not cover ball(0,R)");
  // restrict to the ball before clustering
  VacantSample w = v;
  w.box = ball;
  w.mask.assign(static_cast<size_t>((ball.volume() + 63) / 64), 0);
  int64_t stride[4] = {1, 0, 0, 0};
  for (int i = 1; i < ball.dim; ++i) stride[i] = stride[i - 1] * ball.side(i - 1);
  int64_t vstride[4] = {1, 0, 0, 0};
  for (int i = 1; i < v.box.dim; ++i) vstride[i] = vstride[i - 1] * v.box.side(i - 1);
  for (const auto& p : ball.sites()) {
    int64_t fv = 0, fw = 0;
    for (int i = 0; i < ball.dim; ++i) {
      fv += vstride[i] * (p[i] - v.box.lo[i]);
      fw += stride[i] * (p[i] - ball.lo[i]);
    }
    if (v.vacant(fv)) w.mask[static_cast<size_t>(fw >> 6)] |= 1ull << (fw & 63);
  }
  ClusterInfo info = vacant_clusters(w, adj);
  for (int32_t d : info.diam)
    if (5 * d >= radius) return true;
  return false;
}

bool unique_event(const VacantSample& v_u, const VacantSample& v_v, int radius, Adjacency adj) {
  LatBox ball = lat_ball(LPoint{}, radius, v_u.box.dim);
  LatBox ball2 = lat_ball(LPoint{}, 2 * radius, v_u.box.dim);
  for (int i = 0; i < v_v.box.dim; ++i)
    if (ball2.lo[i] < v_v.box.lo[i] || ball2.hi[i] > v_v.box.hi[i])
      throw std::invalid_argument("unique_event: lower-level sample must cover ball(0,2R)");

  // clusters of the higher-level vacant set inside ball(0,R)
  VacantSample wu;
  wu.box = ball;
  wu.mask.assign(static_cast<size_t>((ball.volume() + 63) / 64), 0);
  int64_t stride[4] = {1, 0, 0, 0};
  for (int i = 1; i < ball.dim; ++i) stride[i] = stride[i - 1] * ball.side(i - 1);
  int64_t ustride[4] = {1, 0, 0, 0};
  for (int i = 1; i < v_u.box.dim; ++i) ustride[i] = ustride[i - 1] * v_u.box.side(i - 1);
  for (const auto& p : ball.sites()) {
    int64_t fu = 0, fw = 0;
    for (int i = 0; i < ball.dim; ++i) {
      fu += ustride[i] * (p[i] - v_u.box.lo[i]);
      fw += stride[i] * (p[i] - ball.lo[i]);
    }
    if (v_u.box.contains(p) && v_u.vacant(fu))
      wu.mask[static_cast<size_t>(fw >> 6)] |= 1ull << (fw & 63);
  }
  ClusterInfo cu = vacant_clusters(wu, adj);

  ClusterInfo cv = vacant_clusters(v_v, adj);
  int64_t vstride[4] = {1, 0, 0, 0};
  for (int i = 1; i < v_v.box.dim; ++i) vstride[i] = vstride[i - 1] * v_v.box.side(i - 1);

  int32_t joined = -1;
  for (int32_t cl = 0; cl < cu.count; ++cl) {
    if (10 * cu.diam[static_cast<size_t>(cl)] < radius) continue;
    // find one site of this cluster and look up its lower-level cluster
    int32_t lower = -1;
    for (const auto& p : ball.sites()) {
      int64_t fw = 0, fv = 0;
      for (int i = 0; i < ball.dim; ++i) {
        fw += stride[i] * (p[i] - ball.lo[i]);
        fv += vstride[i] * (p[i] - v_v.box.lo[i]);
      }
      if (cu.label[static_cast<size_t>(fw)] == cl) {
        lower = cv.label[static_cast<size_t>(fv)];
        break;
      }
    }
    if (lower < 0) return false;  // vacant above but not below cannot happen on one cloud
    if (joined < 0)
      joined = lower;
    else if (joined != lower)
      return false;
  }
  return true;
}

ThetaEstimate estimate_theta(double u, int radius, int64_t samples, uint64_t seed, int kappa,
                             Adjacency adj) {
  if (radius < 4) throw std::invalid_argument("estimate_theta: radius too small");
  LatBox d_box = lat_ball(LPoint{}, radius, 3);
  LatBox u_box = lat_ball(LPoint{}, 2 * radius, 3);
  int r_esc = kappa * (4 * radius + 1);
  Rng eq_rng(seed, 0xE0);
  EquilibriumEstimate eq = cloud_equilibrium(d_box, r_esc, 2000, eq_rng);

  LatBox inner = lat_ball(LPoint{}, radius / 2, 3);
  int64_t stride[4] = {1, 0, 0, 0};
  for (int i = 1; i < 3; ++i) stride[i] = stride[i - 1] * d_box.side(i - 1);

  MeanAcc acc;
  for (int64_t s = 0; s < samples; ++s) {
    Rng rng(seed, 0x7E7A000 + static_cast<uint64_t>(s));
    ExcursionCloud cloud = sample_cloud(u, d_box, u_box, r_esc, rng, &eq);
    VacantSample v = vacant_set(cloud, d_box);
    ClusterInfo info = vacant_clusters(v, adj);
    // clusters touching the shell of ball(0,R)
    std::vector<char> reaches(static_cast<size_t>(info.count), 0);
    for (const auto& p : d_box.sites()) {
      if (chebyshev_norm(p, 3) != radius) continue;
      int64_t f = 0;
      for (int i = 0; i < 3; ++i) f += stride[i] * (p[i] - d_box.lo[i]);
      int32_t l = info.label[static_cast<size_t>(f)];
      if (l >= 0) reaches[static_cast<size_t>(l)] = 1;
    }
    int64_t good = 0;
    for (const auto& p : inner.sites()) {
      int64_t f = 0;
      for (int i = 0; i < 3; ++i) f += stride[i] * (p[i] - d_box.lo[i]);
      int32_t l = info.label[static_cast<size_t>(f)];
      if (l >= 0 && reaches[static_cast<size_t>(l)]) ++good;
    }
    acc.add(static_cast<double>(good) / static_cast<double>(inner.volume()));
  }
  return {acc.mean, acc.se()};
}

CrossingScan scan_u_star(const std::vector<double>& u_grid, const std::vector<int>& radii,
                         int64_t samples, uint64_t seed, int kappa, Adjacency adj) {
  CrossingScan scan;
  for (int radius : radii) {
    LatBox d_box = lat_ball(LPoint{}, 2 * radius, 3);
    LatBox u_box = lat_ball(LPoint{}, 3 * radius, 3);
    int r_esc = kappa * (6 * radius + 1);
    Rng eq_rng(seed, 0xE0 + static_cast<uint64_t>(radius));
    EquilibriumEstimate eq = cloud_equilibrium(d_box, r_esc, 1500, eq_rng);
    int64_t stride[4] = {1, 0, 0, 0};
    for (int i = 1; i < 3; ++i) stride[i] = stride[i - 1] * d_box.side(i - 1);
    for (size_t ui = 0; ui < u_grid.size(); ++ui) {
      int64_t crossings = 0;
      for (int64_t s = 0; s < samples; ++s) {
        Rng rng(seed, (static_cast<uint64_t>(radius) << 40) + (static_cast<uint64_t>(ui) << 28) +
                          static_cast<uint64_t>(s));
        ExcursionCloud cloud = sample_cloud(u_grid[ui], d_box, u_box, r_esc, rng, &eq);
        VacantSample v = vacant_set(cloud, d_box);
        ClusterInfo info = vacant_clusters(v, adj);
        std::vector<char> in_ball(static_cast<size_t>(info.count), 0),
            on_shell(static_cast<size_t>(info.count), 0);
        for (const auto& p : d_box.sites()) {
          int64_t f = 0;
          for (int i = 0; i < 3; ++i) f += stride[i] * (p[i] - d_box.lo[i]);
          int32_t l = info.label[static_cast<size_t>(f)];
          if (l < 0) continue;
          int norm = chebyshev_norm(p, 3);
          if (norm <= radius) in_ball[static_cast<size_t>(l)] = 1;
          if (norm == 2 * radius) on_shell[static_cast<size_t>(l)] = 1;
        }
        bool crossed = false;
        for (int32_t c = 0; c < info.count && !crossed; ++c)
          crossed = in_ball[static_cast<size_t>(c)] && on_shell[static_cast<size_t>(c)];
        crossings += crossed ? 1 : 0;
      }
      double p = static_cast<double>(crossings) / static_cast<double>(samples);
      scan.rows.push_back({u_grid[ui], radius, p, binom_se(p, samples)});
    }
  }
  // bracket: the interval spanned by the per-radius half-crossing points
  // (the u where each curve passes 1/2, linearly interpolated)
  double lo = 1e300, hi = -1e300;
  const size_t g = u_grid.size();
  for (size_t r = 0; r < radii.size(); ++r) {
    const CrossingRow* row = &scan.rows[r * g];
    for (size_t i = 0; i + 1 < g; ++i) {
      if (row[i].p_cross >= 0.5 && row[i + 1].p_cross < 0.5) {
        double t = (row[i].p_cross - 0.5) / (row[i].p_cross - row[i + 1].p_cross);
        double u_half = u_grid[i] + t * (u_grid[i + 1] - u_grid[i]);
        lo = std::min(lo, u_half);
        hi = std::max(hi, u_half);
        break;
      }
    }
  }
  if (hi >= lo) {
    scan.u_star_lo = lo;
    scan.u_star_hi = hi;
    scan.bracket_found = true;
  }
  return scan;
}

}  // namespace dlab
