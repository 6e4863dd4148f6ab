#pragma once

#include <cstdint>
#include <vector>

#include "dlab/lattice.hpp"
#include "dlab/potential.hpp"
#include "dlab/rng.hpp"

namespace dlab {

// One truncated trajectory of the excursion cloud: started from the
// normalized equilibrium measure of D, killed on leaving the escape
// ball, carrying its Poisson label.
struct Trajectory {
  double label = 0.0;
  LPoint start{};
  std::vector<uint8_t> dirs;  // direction k: axis k>>1, sign -(k&1)
};

struct ExcursionRef {
  int32_t trajectory = 0;
  int32_t begin = 0;  // step indices into the trajectory, [begin, end)
  int32_t end = 0;
};

// Poissonian sample of the interlacement trajectories meeting D, with
// the extracted D -> boundary-of-U excursions in lexicographic order
// (label first, then order of appearance along the trajectory).
struct ExcursionCloud {
  double u = 0.0;
  LatBox d_box, u_box;
  int r_esc = 0;
  uint64_t seed_tag = 0;
  double cap_hat = 0.0, cap_se = 0.0;
  double rel_bias_bound = 0.0;
  bool bias_warn = false;
  std::vector<Trajectory> trajectories;  // sorted by label
  std::vector<ExcursionRef> excursions;

  int64_t hit_count() const { return static_cast<int64_t>(trajectories.size()); }
  int64_t excursion_count() const { return static_cast<int64_t>(excursions.size()); }
};

LPoint trajectory_site(const Trajectory& t, int32_t step);

// Samples the cloud at level u. The equilibrium measure (with the same
// escape-ball kill) can be passed in to avoid re-estimating it per cloud.
ExcursionCloud sample_cloud(double u, const LatBox& d_box, const LatBox& u_box, int r_esc,
                            Rng& rng, const EquilibriumEstimate* eq = nullptr,
                            int64_t eq_walks_per_site = 2000);

// Equilibrium estimate matching sample_cloud's kill radius.
EquilibriumEstimate cloud_equilibrium(const LatBox& d_box, int r_esc, int64_t walks_per_site,
                                      Rng& rng);

// Bitmask over the box: bit set <=> site vacant at level u_thin (only
// trajectories with label <= u_thin are erased).
struct VacantSample {
  LatBox box;
  std::vector<uint64_t> mask;

  bool vacant(int64_t flat) const { return (mask[flat >> 6] >> (flat & 63)) & 1ull; }
  int64_t count_vacant() const;
};

VacantSample vacant_set(const ExcursionCloud& cloud, const LatBox& box, double u_thin = -1.0);

// Cluster decomposition of the vacant set under the given adjacency.
struct ClusterInfo {
  std::vector<int32_t> label;   // -1 for occupied sites
  std::vector<int32_t> diam;    // Linf diameter per cluster
  int32_t count = 0;
};
ClusterInfo vacant_clusters(const VacantSample& v, Adjacency adj = Adjacency::Linf);

// Some cluster of the vacant set inside ball(0,R) has Linf diameter at
// least R/5.
bool exist_event(const VacantSample& v, int radius, Adjacency adj = Adjacency::Linf);

// Every pair of clusters of v_u inside ball(0,R) with diameter at least
// R/10 is connected inside v_v's ball(0,2R) (v_v at a lower level on the
// same cloud, so its vacant set is larger).
bool unique_event(const VacantSample& v_u, const VacantSample& v_v, int radius,
                  Adjacency adj = Adjacency::Linf);

struct ThetaEstimate {
  double theta = 0.0;
  double se = 0.0;
};

// Finite-volume stand-in for the percolation function: the fraction of
// sites of ball(0,R/2) lying in a vacant cluster that reaches the shell
// of ball(0,R).
ThetaEstimate estimate_theta(double u, int radius, int64_t samples, uint64_t seed, int kappa = 6,
                             Adjacency adj = Adjacency::Linf);

struct CrossingRow {
  double u = 0.0;
  int radius = 0;
  double p_cross = 0.0;
  double se = 0.0;
};

// Crossing probabilities P[ball(0,R) <-> shell(0,2R) in the vacant set]
// over a u-grid, plus the empirical bracket where curves for successive
// radii cross.
struct CrossingScan {
  std::vector<CrossingRow> rows;
  double u_star_lo = 0.0, u_star_hi = 0.0;
  bool bracket_found = false;
};

CrossingScan scan_u_star(const std::vector<double>& u_grid, const std::vector<int>& radii,
                         int64_t samples, uint64_t seed, int kappa = 4,
                         Adjacency adj = Adjacency::Linf);

}  // namespace dlab
