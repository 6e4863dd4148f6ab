#pragma once

#include <cstdint>
#include <vector>

#include "dlab/rng.hpp"

namespace dlab {

// Soft-local-time coupling on a finite space: one Poisson field on
// space x R+ drives both an i.i.d. sequence with the reference density
// and a dependent chain whose n-th point is drawn from kernel g_n.
struct SltInstance {
  std::vector<double> gbar;                  // reference density, sums to 1
  std::vector<std::vector<double>> kernels;  // g_n = kernels[(n-1) mod size]

  void validate() const;
  double band() const;  // max over kernels and states of |g_n/gbar - 1|
};

struct SltArrival {
  int32_t z = 0;
  double level = 0.0;  // unit-rate Poisson arrival level
};

struct SltDraw {
  int32_t z = 0;
  int64_t arrival = -1;  // index into arrivals of the swallowed point
  double xi = 0.0;       // exponential increment of the soft local time
};

struct CouplingResult {
  std::vector<SltArrival> arrivals;  // the i.i.d. sequence, in level order
  std::vector<SltDraw> chain;        // the dependent sequence
  std::vector<int64_t> swallow_step; // arrival index -> chain step (or -1)
  std::vector<double> soft_local_time;  // final G over the space
  double t_total = 0.0;                 // sum of xi
  double max_checkable_level = 0.0;     // arrivals are complete below this level
};

// Runs the coupling for n_draws chain points. The Poisson field is
// materialized lazily but far enough that every minimization is exact
// and at least n_draws i.i.d. points are available afterwards.
CouplingResult run_slt(const SltInstance& inst, int64_t n_draws, Rng& rng);

struct InclusionReport {
  bool event_ok = true;   // the Poisson-clock event over [lambda*scale, level_hi]
  bool incl1 = true;      // chain prefix inside iid prefix, all m in range
  bool incl2 = true;      // iid prefix inside chain prefix, all m in range
  int64_t m_lo = 0, m_hi = 0;
  double level_hi = 0.0;
};

// Checks, for every integer m in [ceil(lambda*scale), m_hi], the two
// multiset inclusions between the first (1-eta)m points of one sequence
// and the first (1+3eta)m of the other, and whether the clock event
// held on the whole materialized range.
InclusionReport check_inclusions(const CouplingResult& res, double eta, double lambda,
                                 double scale);

}  // namespace dlab
