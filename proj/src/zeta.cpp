#include "dlab/zeta.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <stdexcept>

#include "dlab/records.hpp"
#include "dlab/walk.hpp"

namespace dlab {

namespace {

constexpr double kSeriesCutoff = 8.0;

template <class T>
T i0_series(T x) {
  T q = x * x / 4.0;
  T sum = 1.0, term = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= q / static_cast<double>(k * k);
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum;
}

template <class T>
T i1_series(T x) {
  T q = x * x / 4.0;
  T sum = 1.0, term = 1.0;
  for (int k = 1; k < 1000; ++k) {
    term *= q / static_cast<double>(k * (k + 1));
    sum += term;
    if (std::abs(term) < std::abs(sum) * 1e-17) break;
  }
  return sum * x / 2.0;
}

// Gauss continued fraction for I1/I0 (modified Lentz).
template <class T>
T ratio_cf(T x) {
  const T tiny = T(1e-300);
  T f = tiny, c = tiny, d = T(0.0);
  for (int k = 1; k < 1000; ++k) {
    T b = T(2.0 * k) / x;
    d = b + d;
    if (std::abs(d) == 0.0) d = tiny;
    c = b + T(1.0) / c;
    if (std::abs(c) == 0.0) c = tiny;
    d = T(1.0) / d;
    T delta = c * d;
    f *= delta;
    if (std::abs(delta - T(1.0)) < 1e-16) break;
  }
  return f;
}

// log of the transform as a function of x = theta*u, analytic on the
// right half plane: log x - 2 log sinh(x/2) + log(I1/I0)(x/2).
std::complex<double> log_laplace_x(std::complex<double> x) {
  std::complex<double> y = x / 2.0;
  std::complex<double> r =
      std::abs(y) <= kSeriesCutoff ? i1_series(y) / i0_series(y) : ratio_cf(y);
  // log sinh(y) = y + log(1 - exp(-2y)) - log 2, stable for Re y > 0
  std::complex<double> logsinh = y + std::log(1.0 - std::exp(-2.0 * y)) - std::log(2.0);
  return std::log(x) - 2.0 * logsinh + std::log(r);
}

double laplace_x(double x) {
  if (x == 0.0) return 1.0;
  double y = x / 2.0;
  double r = y <= kSeriesCutoff ? i1_series(y) / i0_series(y) : ratio_cf(y);
  double logsinh = y + std::log1p(-std::exp(-2.0 * y)) - std::log(2.0);
  return std::exp(std::log(x) - 2.0 * logsinh + std::log(r));
}

}  // namespace

double bessel_i0(double x) {
  x = std::fabs(x);
  if (x <= 50.0) return i0_series(x);
  double s = 1.0, term = 1.0;
  for (int k = 1; k < 30; ++k) {
    term *= -(0.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * x * k);
    s += term;
  }
  return std::exp(x) / std::sqrt(2.0 * M_PI * x) * s;
}

double bessel_i1(double x) {
  double ax = std::fabs(x);
  double v;
  if (ax <= 50.0) {
    v = i1_series(ax);
  } else {
    double s = 1.0, term = 1.0;
    for (int k = 1; k < 30; ++k) {
      term *= -(4.0 - (2.0 * k - 1.0) * (2.0 * k - 1.0)) / (8.0 * ax * k);
      s += term;
    }
    v = std::exp(ax) / std::sqrt(2.0 * M_PI * ax) * s;
  }
  return x < 0.0 ? -v : v;
}

double bessel_ratio_i1_i0(double x) {
  if (x == 0.0) return 0.0;
  if (x < 0.0) return -bessel_ratio_i1_i0(-x);
  if (x <= kSeriesCutoff) return i1_series(x) / i0_series(x);
  return ratio_cf(x);
}

double laplace_zeta(double u, double theta) {
  if (!(u > 0.0)) throw std::invalid_argument("laplace_zeta: u must be positive");
  if (theta < 0.0) throw std::invalid_argument("laplace_zeta: theta must be >= 0");
  return laplace_x(u * theta);
}

namespace {

// transform of the CDF: L(s)/s with L(s) = E[exp(-s zeta(u))]
std::complex<double> cdf_transform(double u, std::complex<double> s) {
  std::complex<double> x = u * std::sqrt(2.0 * s);
  return std::exp(log_laplace_x(x)) / s;
}

double talbot_invert(double u, double t, int m) {
  // fixed Talbot contour (Abate-Valko)
  const double r = 2.0 * m / (5.0 * t);
  double acc = 0.5 * std::exp(r * t) * (cdf_transform(u, {r, 0.0})).real();
  for (int k = 1; k < m; ++k) {
    double th = k * M_PI / m;
    double cot = std::cos(th) / std::sin(th);
    std::complex<double> sk(r * th * cot, r * th);
    double sigma = th + (th * cot - 1.0) * cot;
    std::complex<double> val = std::exp(sk * t) * cdf_transform(u, sk) *
                               std::complex<double>(1.0, sigma);
    acc += val.real();
  }
  return std::clamp(r / m * acc, 0.0, 1.0);
}

double gaver_stehfest_invert(double u, double t, int n) {
  if (n % 2 || n < 2 || n > 18) throw std::invalid_argument("gaver-stehfest order must be even, <= 18");
  const double ln2t = std::log(2.0) / t;
  double acc = 0.0;
  for (int k = 1; k <= n; ++k) {
    long double s = 0.0;
    for (int j = (k + 1) / 2; j <= std::min(k, n / 2); ++j) {
      long double term = powl(static_cast<long double>(j), n / 2) /
                         (tgammal(static_cast<long double>(n / 2 - j + 1)) *
                          tgammal(static_cast<long double>(j + 1)) *
                          tgammal(static_cast<long double>(j)) *
                          tgammal(static_cast<long double>(k - j + 1)) *
                          tgammal(static_cast<long double>(2 * j - k + 1)));
      s += term * tgammal(static_cast<long double>(2 * j + 1));
    }
    double v = static_cast<double>(((k + n / 2) % 2 ? -1.0L : 1.0L) * s);
    double sk = k * ln2t;
    acc += v * (cdf_transform(u, {sk, 0.0})).real();
  }
  return std::clamp(ln2t * acc, 0.0, 1.0);
}

}  // namespace

double cdf_zeta(double u, double t, const CdfOptions& opt) {
  if (!(u > 0.0)) throw std::invalid_argument("cdf_zeta: u must be positive");
  if (t <= 0.0) return 0.0;
  if (opt.scheme == InvScheme::Talbot) return talbot_invert(u, t, opt.order);
  return gaver_stehfest_invert(u, t, opt.order);
}

CdfChecked cdf_zeta_checked(double u, double t, const CdfOptions& opt) {
  CdfChecked out;
  out.value = cdf_zeta(u, t, opt);
  CdfOptions alt = opt;
  alt.order = opt.scheme == InvScheme::Talbot ? std::max(8, opt.order - 8)
                                              : std::max(4, opt.order - 4);
  out.alt = cdf_zeta(u, t, alt);
  out.unstable = std::fabs(out.value - out.alt) > 1e-4;
  return out;
}

double zeta_quantile(double u, double p, const CdfOptions& opt) {
  if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("zeta_quantile: p in (0,1)");
  double lo = 1e-9, hi = 1.0;
  while (cdf_zeta(u, hi, opt) < p) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (cdf_zeta(u, mid, opt) < p)
      lo = mid;
    else
      hi = mid;
    if (hi - lo < 1e-12 * hi) break;
  }
  return 0.5 * (lo + hi);
}

namespace {

ZetaSamples run_record_mc(double u, int64_t n, int64_t replicas, uint64_t seed, double delta,
                          double horizon_scale, int64_t big_l) {
  if (n < 1 || replicas < 0) throw std::invalid_argument("record mc: bad n or replicas");
  ZetaSamples out;
  out.values.reserve(static_cast<size_t>(replicas));
  const double n2 = static_cast<double>(n) * static_cast<double>(n);
  const int64_t horizon =
      horizon_scale > 0 ? static_cast<int64_t>(horizon_scale * n2) : INT64_MAX;
  std::unordered_set<int64_t> grid;
  if (big_l > 0) grid = truncated_level_grid(n, big_l);
  for (int64_t rep = 0; rep < replicas; ++rep) {
    Rng rng(seed, static_cast<uint64_t>(rep));
    RecordResult r = one_d_record(u, n, delta, rng, horizon, big_l > 0 ? &grid : nullptr);
    if (r.reached)
      out.values.push_back(static_cast<double>(r.time) / n2);
    else
      ++out.horizon_exhausted;
  }
  return out;
}

}  // namespace

ZetaSamples mc_zeta(double u, int64_t n, int64_t replicas, uint64_t seed, double horizon_scale) {
  return run_record_mc(u, n, replicas, seed, 0.0, horizon_scale, 0);
}

ZetaSamples mc_zeta_drift(double u, int64_t n, int64_t replicas, uint64_t seed, double delta,
                          double horizon_scale, int64_t big_l) {
  if (delta < 0.0) delta = 1.0 / static_cast<double>(n);
  return run_record_mc(u, n, replicas, seed, delta, horizon_scale, big_l);
}

ZetaLaw::ZetaLaw(double u, double mu) : u_(u), mu_(mu) {
  if (!(u > 0.0)) throw std::invalid_argument("ZetaLaw: u must be positive");
}

double ZetaLaw::laplace(double theta) const {
  if (!analytic()) throw std::logic_error("ZetaLaw: no analytic transform for nonzero drift");
  return laplace_zeta(u_, theta);
}

double ZetaLaw::cdf(double t, const CdfOptions& opt) const {
  if (!analytic()) throw std::logic_error("ZetaLaw: no analytic CDF for nonzero drift");
  return cdf_zeta(u_, t, opt);
}

double ZetaLaw::quantile(double p, const CdfOptions& opt) const {
  if (!analytic()) throw std::logic_error("ZetaLaw: no analytic CDF for nonzero drift");
  return zeta_quantile(u_, p, opt);
}

ZetaSamples ZetaLaw::sample(int64_t n, int64_t replicas, uint64_t seed) const {
  if (analytic()) return mc_zeta(u_, n, replicas, seed);
  // drift mu corresponds to delta = mu/n on the walk scale
  return mc_zeta_drift(u_, n, replicas, seed, mu_ / static_cast<double>(n));
}

}  // namespace dlab
