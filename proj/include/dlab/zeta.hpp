#pragma once

#include <cstdint>
#include <vector>

#include "dlab/rng.hpp"

namespace dlab {

// Modified Bessel functions of the first kind, orders 0 and 1. Power
// series below argument 8, Lentz continued fraction for the ratio above.
double bessel_i0(double x);
double bessel_i1(double x);
double bessel_ratio_i1_i0(double x);

// E[exp(-theta^2/2 * zeta(u))] for the driftless record-time law:
// theta*u / sinh(theta*u/2)^2 * I1(theta*u/2) / I0(theta*u/2),
// evaluated in the log domain so large theta*u cannot overflow.
double laplace_zeta(double u, double theta);

enum class InvScheme { Talbot, GaverStehfest };

struct CdfOptions {
  InvScheme scheme = InvScheme::Talbot;
  int order = 32;  // Talbot nodes; Gaver-Stehfest uses an even order <= 18
};

// P[zeta(u) <= t] by fixed-order numerical Laplace inversion.
double cdf_zeta(double u, double t, const CdfOptions& opt = {});

struct CdfChecked {
  double value = 0.0;
  double alt = 0.0;     // same scheme, smaller order
  bool unstable = false;  // orders disagree beyond 1e-4
};
CdfChecked cdf_zeta_checked(double u, double t, const CdfOptions& opt = {});

double zeta_quantile(double u, double p, const CdfOptions& opt = {});

struct ZetaSamples {
  std::vector<double> values;     // record times scaled by n^2
  int64_t horizon_exhausted = 0;  // replicas that never reached the threshold
};

// Monte Carlo oracle: record times inf_z S(ceil(u*n), z) / n^2 of the
// 1D simple walk; converges to zeta(u).
ZetaSamples mc_zeta(double u, int64_t n, int64_t replicas, uint64_t seed,
                    double horizon_scale = 400.0);

// Drifted variant (delta defaults to 1/n); optional restriction of the
// infimum to the truncated level grid with parameter big_l.
ZetaSamples mc_zeta_drift(double u, int64_t n, int64_t replicas, uint64_t seed,
                          double delta = -1.0, double horizon_scale = 400.0,
                          int64_t big_l = 0);

// Bundled evaluator for one (u, drift) law. The analytic transform and
// CDF exist only for the driftless case; the drifted law is served by
// Monte Carlo alone.
class ZetaLaw {
 public:
  ZetaLaw(double u, double mu = 0.0);

  double u() const { return u_; }
  double mu() const { return mu_; }
  bool analytic() const { return mu_ == 0.0; }

  double laplace(double theta) const;            // analytic only
  double cdf(double t, const CdfOptions& = {}) const;
  double quantile(double p, const CdfOptions& = {}) const;
  ZetaSamples sample(int64_t n, int64_t replicas, uint64_t seed) const;

 private:
  double u_;
  double mu_;
};

}  // namespace dlab
