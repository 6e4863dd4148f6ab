#include "dlab/potential.hpp"
#include "dlab/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>
#include <unordered_set>

namespace dlab {

std::vector<LPoint> LatBox::sites() const {
  std::vector<LPoint> out;
  out.reserve(static_cast<size_t>(volume()));
  LPoint p = lo;
  while (true) {
    out.push_back(p);
    int i = 0;
    while (i < dim && ++p[i] > hi[i]) {
      p[i] = lo[i];
      ++i;
    }
    if (i == dim) break;
  }
  return out;
}

LatBox lat_ball(const LPoint& center, int radius, int dim) {
  LatBox b;
  b.dim = dim;
  for (int i = 0; i < dim; ++i) {
    b.lo[i] = center[i] - radius;
    b.hi[i] = center[i] + radius;
  }
  return b;
}

int chebyshev_norm(const LPoint& p, int dim) {
  int m = 0;
  for (int i = 0; i < dim; ++i) m = std::max(m, std::abs(p[i]));
  return m;
}

double green_decay_c0(int dim) {
  // g(x) ~ c0 |x|^{2-D} with c0 = D * Gamma(D/2 - 1) / (2 pi^{D/2})
  return dim * std::tgamma(dim / 2.0 - 1.0) / (2.0 * std::pow(M_PI, dim / 2.0));
}

namespace {

// unbiased die with n faces fed by 3-bit (n<=6) rejection off a bit pool
struct Dice {
  uint64_t bits = 0;
  int left = 0;

  int roll6(Rng& rng) {
    while (true) {
      if (left < 3) {
        bits = rng.next_u64();
        left = 63;  // use 21 aligned triples
      }
      int v = static_cast<int>(bits & 7u);
      bits >>= 3;
      left -= 3;
      if (v < 6) return v;
    }
  }
};

struct FlatIndexer {
  LatBox box;
  int64_t stride[4];
  int64_t vol;

  explicit FlatIndexer(const LatBox& b) : box(b) {
    int64_t s = 1;
    for (int i = 0; i < b.dim; ++i) {
      stride[i] = s;
      s *= b.side(i);
    }
    vol = s;
  }
  int64_t flat(const LPoint& p) const {
    int64_t f = 0;
    for (int i = 0; i < box.dim; ++i) f += stride[i] * (p[i] - box.lo[i]);
    return f;
  }
  LPoint point(int64_t f) const {
    LPoint p{};
    for (int i = 0; i < box.dim; ++i) {
      p[i] = static_cast<int32_t>(box.lo[i] + f % box.side(i));
      f /= box.side(i);
    }
    return p;
  }
};

constexpr int32_t kOutside = -1;
constexpr int32_t kInK = -2;

}  // namespace

EquilibriumEstimate equilibrium_exact(const std::vector<LPoint>& k_sites, const LatBox& u_box,
                                      int64_t max_sites) {
  if (k_sites.empty()) throw std::invalid_argument("equilibrium: K must be nonempty");
  if (u_box.volume() > max_sites)
    throw std::invalid_argument("equilibrium_exact: domain exceeds the configured site cap");
  const int dim = u_box.dim;
  const int deg = 2 * dim;
  FlatIndexer ix(u_box);

  // classify box sites
  std::vector<int32_t> state(static_cast<size_t>(ix.vol), 0);
  for (const auto& p : k_sites) {
    if (!u_box.contains(p)) throw std::invalid_argument("equilibrium: K must lie inside U");
    state[static_cast<size_t>(ix.flat(p))] = kInK;
  }
  int64_t unknowns = 0;
  for (auto& s : state)
    if (s != kInK) s = static_cast<int32_t>(unknowns++);

  // neighbor table over unknowns
  std::vector<int32_t> nbr(static_cast<size_t>(unknowns) * deg);
  std::vector<double> b(static_cast<size_t>(unknowns), 0.0);
  const double inv_deg = 1.0 / deg;
  for (int64_t f = 0; f < ix.vol; ++f) {
    int32_t row = state[static_cast<size_t>(f)];
    if (row < 0) continue;
    LPoint p = ix.point(f);
    for (int a = 0; a < dim; ++a) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        LPoint q = p;
        q[a] += sgn == 0 ? 1 : -1;
        int32_t code;
        if (!u_box.contains(q)) {
          code = kOutside;
          b[row] += inv_deg;
        } else {
          code = state[static_cast<size_t>(ix.flat(q))];
        }
        nbr[static_cast<size_t>(row) * deg + 2 * a + sgn] = code;
      }
    }
  }

  // CG on (I - P) phi = b, P the degree-normalized adjacency on unknowns
  std::vector<double> phi(unknowns, 0.0), r(b), pvec(b), ap(unknowns);
  double rs = 0.0;
  for (double v : r) rs += v * v;
  const double tol2 = rs * 1e-24;
  for (int64_t iter = 0; iter < 10 * unknowns + 100 && rs > tol2; ++iter) {
    for (int64_t i = 0; i < unknowns; ++i) {
      double acc = 0.0;
      const int32_t* row = &nbr[static_cast<size_t>(i) * deg];
      for (int j = 0; j < deg; ++j)
        if (row[j] >= 0) acc += pvec[static_cast<size_t>(row[j])];
      ap[static_cast<size_t>(i)] = pvec[static_cast<size_t>(i)] - inv_deg * acc;
    }
    double pap = 0.0;
    for (int64_t i = 0; i < unknowns; ++i) pap += pvec[static_cast<size_t>(i)] * ap[static_cast<size_t>(i)];
    double alpha = rs / pap;
    double rs_new = 0.0;
    for (int64_t i = 0; i < unknowns; ++i) {
      phi[static_cast<size_t>(i)] += alpha * pvec[static_cast<size_t>(i)];
      r[static_cast<size_t>(i)] -= alpha * ap[static_cast<size_t>(i)];
      rs_new += r[static_cast<size_t>(i)] * r[static_cast<size_t>(i)];
    }
    double beta = rs_new / rs;
    rs = rs_new;
    for (int64_t i = 0; i < unknowns; ++i)
      pvec[static_cast<size_t>(i)] = r[static_cast<size_t>(i)] + beta * pvec[static_cast<size_t>(i)];
  }

  // e(x) = mean over neighbors of the no-return probability
  EquilibriumEstimate est;
  est.method = "exact";
  est.support = k_sites;
  est.weight.resize(k_sites.size(), 0.0);
  est.se.resize(k_sites.size(), 0.0);
  for (size_t s = 0; s < k_sites.size(); ++s) {
    const LPoint& p = k_sites[s];
    double acc = 0.0;
    for (int a = 0; a < dim; ++a) {
      for (int sgn = 0; sgn < 2; ++sgn) {
        LPoint q = p;
        q[a] += sgn == 0 ? 1 : -1;
        if (!u_box.contains(q)) {
          acc += 1.0;
        } else {
          int32_t code = state[static_cast<size_t>(ix.flat(q))];
          if (code >= 0) acc += phi[static_cast<size_t>(code)];
        }
      }
    }
    est.weight[s] = acc * inv_deg;
    est.cap += est.weight[s];
  }
  return est;
}

namespace {

// One kill-on-exit walk segment; returns +1 escape, 0 re-entered K.
template <class InK>
int escape_walk(LPoint pos, int dim, const LatBox& kill_box, InK&& in_k, Rng& rng, Dice& dice) {
  while (true) {
    if (dim == 3) {
      int d = dice.roll6(rng);
      pos[d >> 1] += (d & 1) ? -1 : 1;
    } else {
      int d = static_cast<int>(rng.next_below(static_cast<uint64_t>(2 * dim)));
      pos[d >> 1] += (d & 1) ? -1 : 1;
    }
    if (in_k(pos)) return 0;
    if (!kill_box.contains(pos)) return 1;
  }
}

}  // namespace

EquilibriumEstimate equilibrium_mc(const std::vector<LPoint>& k_sites, const LatBox& u_box,
                                   int64_t walks_per_site, Rng& rng) {
  if (k_sites.empty()) throw std::invalid_argument("equilibrium: K must be nonempty");
  const int dim = u_box.dim;
  std::unordered_set<int64_t> kset;
  FlatIndexer ix(u_box);
  for (const auto& p : k_sites) {
    if (!u_box.contains(p)) throw std::invalid_argument("equilibrium: K must lie inside U");
    kset.insert(ix.flat(p));
  }
  auto in_k = [&](const LPoint& p) { return u_box.contains(p) && kset.count(ix.flat(p)) > 0; };

  EquilibriumEstimate est;
  est.method = "mc";
  est.support = k_sites;
  est.weight.resize(k_sites.size(), 0.0);
  est.se.resize(k_sites.size(), 0.0);
  Dice dice;
  double var_acc = 0.0;
  for (size_t s = 0; s < k_sites.size(); ++s) {
    // interior sites of K cannot escape in one step
    bool boundary = false;
    for (int a = 0; a < dim && !boundary; ++a)
      for (int sgn = -1; sgn <= 1 && !boundary; sgn += 2) {
        LPoint q = k_sites[s];
        q[a] += sgn;
        boundary = !in_k(q);
      }
    if (!boundary) continue;
    int64_t esc = 0;
    for (int64_t w = 0; w < walks_per_site; ++w)
      esc += escape_walk(k_sites[s], dim, u_box, in_k, rng, dice);
    double p = static_cast<double>(esc) / static_cast<double>(walks_per_site);
    est.weight[s] = p;
    est.se[s] = binom_se(p, walks_per_site);
    est.cap += p;
    var_acc += est.se[s] * est.se[s];
  }
  est.cap_se = std::sqrt(var_acc);
  return est;
}

CapacityEstimate capacity_free(const std::vector<LPoint>& k_sites, int dim, int r_esc,
                               int64_t walks_per_site, Rng& rng) {
  if (k_sites.empty()) throw std::invalid_argument("capacity_free: K must be nonempty");
  LPoint center{};
  LPoint klo = k_sites[0], khi = k_sites[0];
  for (const auto& p : k_sites)
    for (int i = 0; i < dim; ++i) {
      klo[i] = std::min(klo[i], p[i]);
      khi[i] = std::max(khi[i], p[i]);
    }
  int diam = 0;
  for (int i = 0; i < dim; ++i) {
    center[i] = (klo[i] + khi[i]) / 2;
    diam = std::max(diam, khi[i] - klo[i]);
  }
  if (r_esc <= 2 * diam) throw std::invalid_argument("capacity_free: escape radius too small");
  LatBox kill = lat_ball(center, r_esc, dim);

  EquilibriumEstimate eq = equilibrium_mc(k_sites, kill, walks_per_site, rng);
  CapacityEstimate c;
  c.cap = eq.cap;
  c.se = eq.cap_se;
  c.rel_bias_bound = c.cap * green_decay_c0(dim) * std::pow(static_cast<double>(r_esc), 2.0 - dim);
  c.bias_warn = c.rel_bias_bound > 0.02;
  c.cap_corrected = c.cap * (1.0 - c.rel_bias_bound);
  return c;
}

GreenEstimate green_mc(const LPoint& x, const LPoint& y, int dim, int r_esc, int64_t walks,
                       Rng& rng) {
  LatBox kill = lat_ball(LPoint{}, r_esc, dim);
  if (!kill.contains(x) || !kill.contains(y))
    throw std::invalid_argument("green_mc: points must lie inside the kill ball");
  MeanAcc visits, tail;
  Dice dice;
  const double c0 = green_decay_c0(dim);
  for (int64_t w = 0; w < walks; ++w) {
    LPoint pos = x;
    int64_t v = pos == y ? 1 : 0;
    while (true) {
      if (dim == 3) {
        int d = dice.roll6(rng);
        pos[d >> 1] += (d & 1) ? -1 : 1;
      } else {
        int d = static_cast<int>(rng.next_below(static_cast<uint64_t>(2 * dim)));
        pos[d >> 1] += (d & 1) ? -1 : 1;
      }
      if (!kill.contains(pos)) break;
      if (pos == y) ++v;
    }
    visits.add(static_cast<double>(v));
    // first-order tail: expected further visits from the exit point
    double d2 = 0.0;
    for (int i = 0; i < dim; ++i) {
      double dd = pos[i] - y[i];
      d2 += dd * dd;
    }
    tail.add(c0 * std::pow(d2, 0.5 * (2.0 - dim)));
  }
  GreenEstimate g;
  g.value = visits.mean;
  g.se = visits.se();
  g.corrected = visits.mean + tail.mean;
  return g;
}

ReturnEstimate return_probability(int dim, int r_esc, int64_t walks, Rng& rng) {
  LatBox kill = lat_ball(LPoint{}, r_esc, dim);
  Dice dice;
  int64_t returned = 0;
  const LPoint origin{};
  for (int64_t w = 0; w < walks; ++w) {
    LPoint pos{};
    while (true) {
      if (dim == 3) {
        int d = dice.roll6(rng);
        pos[d >> 1] += (d & 1) ? -1 : 1;
      } else {
        int d = static_cast<int>(rng.next_below(static_cast<uint64_t>(2 * dim)));
        pos[d >> 1] += (d & 1) ? -1 : 1;
      }
      if (pos == origin) {
        ++returned;
        break;
      }
      if (!kill.contains(pos)) break;
    }
  }
  ReturnEstimate r;
  r.p_return = static_cast<double>(returned) / static_cast<double>(walks);
  r.se = binom_se(r.p_return, walks);
  return r;
}

HittingCheck hitting_distribution_check(int box_l, int ratio_k, HitLayout layout, double delta,
                                        int64_t target_hits, Rng& rng, int dim,
                                        int ref_radius_factor) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("hitting check: bad delta");
  if (delta > 0.0) {
    double cap = 1.0 / (static_cast<double>(ratio_k) * box_l * (ratio_k + box_l));
    if (delta > cap)
      throw std::invalid_argument("hitting check: drift too strong for the asserted band");
  }
  const int kl = ratio_k * std::max(box_l, 1);
  LatBox a_box = lat_ball(LPoint{}, box_l, dim);
  LatBox inner = layout == HitLayout::TwoBox ? lat_ball(LPoint{}, kl, dim)
                                             : lat_ball(LPoint{}, 10 * kl, dim);
  // internal boundary of A
  std::vector<LPoint> a_boundary;
  for (const auto& p : a_box.sites()) {
    bool bd = false;
    for (int i = 0; i < dim && !bd; ++i) bd = std::abs(p[i]) == box_l;
    if (bd) a_boundary.push_back(p);
  }
  FlatIndexer aix(a_box);
  std::vector<int32_t> a_rank(static_cast<size_t>(aix.vol), -1);
  for (size_t i = 0; i < a_boundary.size(); ++i)
    a_rank[static_cast<size_t>(aix.flat(a_boundary[i]))] = static_cast<int32_t>(i);

  // reference law: normalized equilibrium measure from an exact solve in
  // a large finite domain (the normalization makes the truncation mild)
  EquilibriumEstimate ref = equilibrium_exact(
      a_boundary, lat_ball(LPoint{}, std::max(ref_radius_factor * box_l, 2), dim),
      int64_t{4} << 22);

  HittingCheck chk;
  chk.sites = a_boundary;
  chk.ebar.resize(a_boundary.size());
  for (size_t i = 0; i < a_boundary.size(); ++i) chk.ebar[i] = ref.weight[i] / ref.cap;

  // start on the outer boundary shell of the inner box
  LPoint start{};
  start[0] = kl + 1;
  std::vector<int64_t> hits(a_boundary.size(), 0);
  if (delta > 0.0 && dim != 3)
    throw std::invalid_argument("hitting check: drifted variant implemented for Z^3 only");

  Dice dice;
  // drift as a mixture: (1-delta) * uniform + delta * (up 1/3, lateral 1/6)
  const double log1m = delta > 0.0 ? std::log1p(-delta) : 0.0;
  int64_t until_drift_event =
      delta > 0.0 ? static_cast<int64_t>(std::floor(rng.next_exp() / -log1m)) + 1 : INT64_MAX;

  auto step = [&](LPoint& pos) {
    if (--until_drift_event == 0) {
      until_drift_event = static_cast<int64_t>(std::floor(rng.next_exp() / -log1m)) + 1;
      // biased component: up with 1/3, each lateral with 1/6
      uint64_t r = rng.next_below(6);
      if (r < 2) {
        pos[dim - 1] += 1;
      } else {
        int lat = static_cast<int>(r - 2);  // 4 lateral moves in Z^3
        pos[lat >> 1] += (lat & 1) ? -1 : 1;
      }
      return;
    }
    int d = dice.roll6(rng);
    pos[d >> 1] += (d & 1) ? -1 : 1;
  };

  while (chk.hits < target_hits) {
    ++chk.attempts;
    LPoint pos = start;
    while (true) {
      step(pos);
      if (a_box.contains(pos)) {
        int32_t rank = a_rank[static_cast<size_t>(aix.flat(pos))];
        ++hits[static_cast<size_t>(rank)];
        ++chk.hits;
        break;
      }
      if (layout == HitLayout::TwoBox) {
        if (!inner.contains(pos)) break;  // first exit of U lands on its boundary
      } else {
        if (!inner.contains(pos)) break;
      }
    }
  }

  chk.freq.resize(a_boundary.size());
  chk.freq_se.resize(a_boundary.size());
  for (size_t i = 0; i < a_boundary.size(); ++i) {
    double p = static_cast<double>(hits[i]) / static_cast<double>(chk.hits);
    chk.freq[i] = p;
    chk.freq_se[i] = binom_se(p, chk.hits);
    double dev = std::fabs(p - chk.ebar[i]) / chk.ebar[i];
    double adj = std::max(0.0, std::fabs(p - chk.ebar[i]) - 3.0 * chk.freq_se[i]) / chk.ebar[i];
    if (dev > chk.max_rel_dev) {
      chk.max_rel_dev = dev;
      chk.se_at_argmax = chk.freq_se[i] / chk.ebar[i];
    }
    chk.noise_adj_dev = std::max(chk.noise_adj_dev, adj);
  }
  return chk;
}

}  // namespace dlab
