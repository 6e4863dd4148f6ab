#include "dlab/slt.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace dlab {

void SltInstance::validate() const {
  if (gbar.empty() || kernels.empty()) throw std::invalid_argument("slt: empty instance");
  auto check = [&](const std::vector<double>& g) {
    if (g.size() != gbar.size()) throw std::invalid_argument("slt: kernel size mismatch");
    double s = 0.0;
    for (size_t z = 0; z < g.size(); ++z) {
      if (g[z] < 0.0) throw std::invalid_argument("slt: negative density");
      if (gbar[z] == 0.0 && g[z] != 0.0)
        throw std::invalid_argument("slt: kernel charges a state the reference does not");
      s += g[z];
    }
    if (std::fabs(s - 1.0) > 1e-9) throw std::invalid_argument("slt: density does not sum to 1");
  };
  check(gbar);
  for (const auto& g : kernels) check(g);
}

double SltInstance::band() const {
  double b = 0.0;
  for (const auto& g : kernels)
    for (size_t z = 0; z < gbar.size(); ++z)
      if (gbar[z] > 0.0) b = std::max(b, std::fabs(g[z] / gbar[z] - 1.0));
  return b;
}

CouplingResult run_slt(const SltInstance& inst, int64_t n_draws, Rng& rng) {
  inst.validate();
  if (n_draws < 1) throw std::invalid_argument("slt: n_draws must be >= 1");
  const size_t m_space = inst.gbar.size();

  std::vector<double> gbar_cum(m_space);
  double acc = 0.0;
  for (size_t z = 0; z < m_space; ++z) {
    acc += inst.gbar[z];
    gbar_cum[z] = acc;
  }

  CouplingResult res;
  res.soft_local_time.assign(m_space, 0.0);
  double level_top = 0.0;

  auto extend_field = [&]() {
    SltArrival a;
    level_top += rng.next_exp();
    a.level = level_top;
    double pick = rng.next_double() * acc;
    size_t z = static_cast<size_t>(std::lower_bound(gbar_cum.begin(), gbar_cum.end(), pick) -
                                   gbar_cum.begin());
    a.z = static_cast<int32_t>(std::min(z, m_space - 1));
    res.arrivals.push_back(a);
  };

  std::vector<int64_t> alive;  // arrival indices not yet swallowed
  auto& G = res.soft_local_time;

  for (int64_t n = 0; n < n_draws; ++n) {
    const auto& g = inst.kernels[static_cast<size_t>(n) % inst.kernels.size()];
    while (true) {
      // best swallow candidate among materialized points
      double best = 1e300;
      int64_t best_idx = -1;
      size_t best_pos = 0;
      for (size_t pos = 0; pos < alive.size(); ++pos) {
        const SltArrival& a = res.arrivals[static_cast<size_t>(alive[pos])];
        if (g[static_cast<size_t>(a.z)] <= 0.0) continue;
        double t = a.level * inst.gbar[static_cast<size_t>(a.z)];
        double ratio = (t - G[static_cast<size_t>(a.z)]) / g[static_cast<size_t>(a.z)];
        if (ratio < best) {
          best = ratio;
          best_idx = alive[pos];
          best_pos = pos;
        }
      }
      // can an unmaterialized point (level > level_top) still win?
      double hidden = 1e300;
      for (size_t z = 0; z < m_space; ++z) {
        if (g[z] <= 0.0 || inst.gbar[z] <= 0.0) continue;
        hidden = std::min(hidden, (level_top * inst.gbar[z] - G[z]) / g[z]);
      }
      if (best_idx >= 0 && best <= hidden) {
        SltDraw d;
        d.z = res.arrivals[static_cast<size_t>(best_idx)].z;
        d.arrival = best_idx;
        d.xi = best;
        res.chain.push_back(d);
        res.t_total += best;
        for (size_t z = 0; z < m_space; ++z) G[z] += best * g[z];
        alive[best_pos] = alive.back();
        alive.pop_back();
        break;
      }
      extend_field();
      alive.push_back(static_cast<int64_t>(res.arrivals.size()) - 1);
    }
  }

  // make the i.i.d. side at least as long as the chain
  while (static_cast<int64_t>(res.arrivals.size()) < n_draws + 1) {
    extend_field();
    alive.push_back(static_cast<int64_t>(res.arrivals.size()) - 1);
  }
  res.max_checkable_level = level_top;

  res.swallow_step.assign(res.arrivals.size(), -1);
  for (size_t i = 0; i < res.chain.size(); ++i)
    res.swallow_step[static_cast<size_t>(res.chain[i].arrival)] = static_cast<int64_t>(i);
  return res;
}

InclusionReport check_inclusions(const CouplingResult& res, double eta, double lambda,
                                 double scale) {
  if (!(eta > 0.0 && eta < 0.5)) throw std::invalid_argument("slt: eta must lie in (0, 1/2)");
  if (!(lambda > 0.0 && scale > 0.0)) throw std::invalid_argument("slt: lambda, scale > 0");
  InclusionReport rep;
  const double m_start = lambda * scale;
  rep.m_lo = static_cast<int64_t>(std::ceil(m_start));
  const int64_t n_chain = static_cast<int64_t>(res.chain.size());
  const int64_t n_iid = static_cast<int64_t>(res.arrivals.size());
  rep.m_hi = static_cast<int64_t>(std::floor(
      static_cast<double>(std::min(n_chain, n_iid)) / (1.0 + 3.0 * eta)));
  rep.level_hi = res.max_checkable_level;

  // ---- clock event on [m_start, level_hi] ----
  std::vector<double> levels(res.arrivals.size());
  for (size_t i = 0; i < levels.size(); ++i) levels[i] = res.arrivals[i].level;
  auto count_le = [&](double t) {
    return static_cast<int64_t>(std::upper_bound(levels.begin(), levels.end(), t) -
                                levels.begin());
  };
  const double m_end = res.max_checkable_level;
  bool ok = true;
  if (m_start < m_end) {
    // n(0,m) < (1+eta) m: check at the left endpoint and at every jump
    if (static_cast<double>(count_le(m_start)) >= (1.0 + eta) * m_start) ok = false;
    for (size_t j = 0; ok && j < levels.size(); ++j) {
      double l = levels[j];
      if (l < m_start || l > m_end) continue;
      if (static_cast<double>(j + 1) >= (1.0 + eta) * l) ok = false;
    }
    // n(0,m) > (1-eta) m: check each constant piece against its sup
    for (size_t j = 0; ok && j + 1 < levels.size(); ++j) {
      double piece_hi = std::min(levels[j + 1], m_end);
      if (piece_hi <= m_start || levels[j] > m_end) continue;
      if (static_cast<double>(j + 1) < (1.0 - eta) * piece_hi) ok = false;
    }
    if (ok && static_cast<double>(count_le(m_end)) <= (1.0 - eta) * m_end) ok = false;
    // n(m, (1+eta)m) < 2 eta m: piecewise constant, worst right after a
    // point enters the window top, i.e. at m = level/(1+eta)
    auto window_bad = [&](double m) {
      if (m < m_start || (1.0 + eta) * m > m_end) return false;
      int64_t cnt = count_le((1.0 + eta) * m) - count_le(m);
      return static_cast<double>(cnt) >= 2.0 * eta * m;
    };
    if (window_bad(m_start)) ok = false;
    for (size_t j = 0; ok && j < levels.size(); ++j)
      if (window_bad(levels[j] / (1.0 + eta))) ok = false;
  }
  rep.event_ok = ok;

  // ---- inclusions for all integer m in [m_lo, m_hi] ----
  // prefix maxima make each check O(1) per m
  std::vector<int64_t> chain_arrival_prefmax(res.chain.size());
  int64_t pm = -1;
  for (size_t i = 0; i < res.chain.size(); ++i) {
    pm = std::max(pm, res.chain[i].arrival);
    chain_arrival_prefmax[i] = pm;
  }
  std::vector<int64_t> swallow_prefmax(res.arrivals.size());
  pm = -1;
  for (size_t i = 0; i < res.arrivals.size(); ++i) {
    int64_t s = res.swallow_step[i] < 0 ? INT64_MAX : res.swallow_step[i];
    pm = std::max(pm, s);
    swallow_prefmax[i] = pm;
  }
  for (int64_t m = rep.m_lo; m <= rep.m_hi; ++m) {
    const int64_t k = static_cast<int64_t>(std::floor((1.0 - eta) * static_cast<double>(m)));
    const int64_t big = static_cast<int64_t>(std::floor((1.0 + 3.0 * eta) * static_cast<double>(m)));
    if (k < 1) continue;  // empty prefix, nothing to check
    // chain points 1..k must be among the first `big` arrivals
    if (chain_arrival_prefmax[static_cast<size_t>(k - 1)] >= big) rep.incl1 = false;
    // arrivals 1..k must be swallowed within `big` chain steps
    if (swallow_prefmax[static_cast<size_t>(k - 1)] >= big) rep.incl2 = false;
  }
  return rep;
}

}  // namespace dlab
