#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "dlab/rng.hpp"

namespace dlab {

// Points and axis-aligned boxes of Z^D (D = dim <= 4). Walks here are
// simple random walks with L1 steps; boundaries are L1 boundaries.
using LPoint = std::array<int32_t, 4>;

struct LatBox {
  LPoint lo{}, hi{};  // inclusive
  int dim = 3;

  bool contains(const LPoint& p) const {
    for (int i = 0; i < dim; ++i)
      if (p[i] < lo[i] || p[i] > hi[i]) return false;
    return true;
  }
  int64_t volume() const {
    int64_t v = 1;
    for (int i = 0; i < dim; ++i) v *= hi[i] - lo[i] + 1;
    return v;
  }
  int side(int i) const { return hi[i] - lo[i] + 1; }
  std::vector<LPoint> sites() const;
};

LatBox lat_ball(const LPoint& center, int radius, int dim);
int chebyshev_norm(const LPoint& p, int dim);

// asymptotic constant of the Green's function decay g(x) ~ c0 |x|^{2-D}
double green_decay_c0(int dim);

struct EquilibriumEstimate {
  std::vector<LPoint> support;   // the sites of K
  std::vector<double> weight;    // escape probabilities e(x)
  std::vector<double> se;        // zero in exact mode
  double cap = 0.0;
  double cap_se = 0.0;
  const char* method = "exact";
};

// Exact absorbing-chain solve of e_{K,U}(x) = P_x[no return to K before
// leaving U]. U is a box, K an arbitrary nonempty subset of it.
EquilibriumEstimate equilibrium_exact(const std::vector<LPoint>& k_sites, const LatBox& u_box,
                                      int64_t max_sites = 100000);

// Monte Carlo estimate of the same quantities.
EquilibriumEstimate equilibrium_mc(const std::vector<LPoint>& k_sites, const LatBox& u_box,
                                   int64_t walks_per_site, Rng& rng);

struct CapacityEstimate {
  double cap = 0.0;
  double se = 0.0;
  double rel_bias_bound = 0.0;  // first-order truncation bias (relative)
  bool bias_warn = false;
  double cap_corrected = 0.0;
};

// Whole-space capacity via escape-radius truncation. Walks are killed on
// leaving the Linf ball of radius r_esc around K's center; the kill
// inflates escape probabilities by about cap * c0 / r_esc (reported, and
// warned about beyond 2%).
CapacityEstimate capacity_free(const std::vector<LPoint>& k_sites, int dim, int r_esc,
                               int64_t walks_per_site, Rng& rng);

struct GreenEstimate {
  double value = 0.0;
  double se = 0.0;
  double corrected = 0.0;  // first-order tail correction added
};

// Expected visits to y of the walk from x killed outside the ball of
// radius r_esc (centered at the origin).
GreenEstimate green_mc(const LPoint& x, const LPoint& y, int dim, int r_esc, int64_t walks,
                       Rng& rng);

struct ReturnEstimate {
  double p_return = 0.0;
  double se = 0.0;
};

// Fraction of walks from the origin that revisit it before escaping to
// radius r_esc. Independent oracle for cap({0}) = 1 - p and
// g(0,0) = 1/(1-p).
ReturnEstimate return_probability(int dim, int r_esc, int64_t walks, Rng& rng);

enum class HitLayout {
  TwoBox,   // start on the outer boundary of U = ball(0, K*L), condition on H_A < return to it
  ThreeBox  // start on the boundary of D = ball(0, K*L), kill on the boundary of U = ball(0, 10*K*L)
};

struct HittingCheck {
  std::vector<LPoint> sites;       // internal boundary of A
  std::vector<double> ebar;        // normalized equilibrium reference
  std::vector<double> freq;        // conditioned hitting frequencies
  std::vector<double> freq_se;
  int64_t hits = 0;
  int64_t attempts = 0;
  double max_rel_dev = 0.0;        // max |freq-ebar|/ebar
  double noise_adj_dev = 0.0;      // same with 3*SE subtracted first
  double se_at_argmax = 0.0;
};

// Empirical conditional hitting law of A = ball(0,L) against the
// normalized equilibrium measure. Drift (along the last axis) must
// satisfy 1/delta >= K*L*(K+L) to stay in the regime where the band is
// asserted; delta = 0 gives the simple walk.
HittingCheck hitting_distribution_check(int box_l, int ratio_k, HitLayout layout, double delta,
                                        int64_t target_hits, Rng& rng, int dim = 3,
                                        int ref_radius_factor = 8);

}  // namespace dlab
