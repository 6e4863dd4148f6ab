#include <doctest.h>

#include <cmath>

#include "dlab/stats.hpp"
#include "dlab/zeta.hpp"

using namespace dlab;

TEST_SUITE_BEGIN("zeta");

// Reference values computed with 30+ digit arithmetic (mpmath: besseli,
// sinh, and Talbot inversion at dps=40).
namespace {

struct Ref {
  double x, value;
};

constexpr Ref kLaplaceRefs[] = {
    {0.01, 0.99998854174739537},  {0.1, 0.99885497349855971}, {0.5, 0.97185162687979059},
    {1.0, 0.8930519596350564},    {2.0, 0.64642772029147892}, {5.0, 0.10449355080884846},
    {10.0, 0.0016225285889352638}, {25.0, 1.3320292173575305e-9},
    {50.0, 3.7795452339123572e-20}, {100.0, 1.4730741484125535e-41},
};

constexpr Ref kCdfRefs[] = {
    {0.05, 0.000616231275848419}, {0.1, 0.0614122335826872}, {0.15, 0.251391912962757},
    {0.2, 0.472529707632399},     {0.3, 0.785376141561613},  {0.5, 0.974385364542108},
    {1.0, 0.999916156052569},
};

}  // namespace

TEST_CASE("bessel reference values") {
  CHECK(bessel_i0(0.5) == doctest::Approx(1.0634833707413235).epsilon(1e-13));
  CHECK(bessel_i1(0.5) == doctest::Approx(0.25789430539089632).epsilon(1e-13));
  CHECK(bessel_i0(8.0) == doctest::Approx(427.56411572180479).epsilon(1e-13));
  CHECK(bessel_i1(8.0) == doctest::Approx(399.8731367825601).epsilon(1e-13));
  CHECK(bessel_ratio_i1_i0(12.5) == doctest::Approx(0.95912629707621811).epsilon(1e-13));
  CHECK(bessel_ratio_i1_i0(60.0) == doctest::Approx(0.99163135012420877).epsilon(1e-13));
  CHECK(bessel_i1(-0.5) == doctest::Approx(-0.25789430539089632).epsilon(1e-13));
  CHECK(bessel_ratio_i1_i0(0.0) == 0.0);
}

TEST_CASE("laplace transform reference values") {
  for (const Ref& r : kLaplaceRefs) {
    CHECK(laplace_zeta(1.0, r.x) == doctest::Approx(r.value).epsilon(1e-12));
    CHECK(laplace_zeta(r.x, 1.0) == doctest::Approx(r.value).epsilon(1e-12));
  }
}

TEST_CASE("transform limits and monotonicity") {
  CHECK(laplace_zeta(1.0, 0.0) == 1.0);
  CHECK(std::fabs(laplace_zeta(1.0, 1e-6) - 1.0) < 1e-10);
  double prev = 1.0;
  for (double th = 0.25; th <= 16.0; th *= 2.0) {
    double v = laplace_zeta(1.0, th);
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
    CHECK(v < prev);
    prev = v;
  }
  CHECK_THROWS(laplace_zeta(0.0, 1.0));
  CHECK_THROWS(laplace_zeta(1.0, -1.0));
}

TEST_CASE("the transform depends only on the product theta*u") {
  const double us[] = {0.5, 1.0, 2.0, 5.0};
  for (double u : us)
    for (int i = 1; i <= 20; ++i) {
      double th = 0.2 * i;
      double lhs = laplace_zeta(u, th);
      double rhs = laplace_zeta(1.0, u * th);
      CHECK(std::fabs(lhs - rhs) <= 1e-12 * std::max(lhs, rhs));
    }
}

TEST_CASE("cdf inversion hits the independent references") {
  for (const Ref& r : kCdfRefs) {
    auto c = cdf_zeta_checked(1.0, r.x);
    CHECK(c.value == doctest::Approx(r.value).epsilon(1e-7));
    CHECK_FALSE(c.unstable);
    // the alternative scheme is coarser but must agree loosely
    CdfOptions gs;
    gs.scheme = InvScheme::GaverStehfest;
    gs.order = 12;
    CHECK(cdf_zeta(1.0, r.x, gs) == doctest::Approx(r.value).epsilon(0.02));
  }
}

TEST_CASE("cdf endpoints and monotonicity") {
  CHECK(cdf_zeta(1.0, -1.0) == 0.0);
  CHECK(cdf_zeta(1.0, 1e-6) < 1e-8);
  CHECK(cdf_zeta(1.0, 20.0) > 1.0 - 1e-6);
  double prev = -1.0;
  for (double t = 0.05; t <= 2.0; t += 0.05) {
    double v = cdf_zeta(1.0, t);
    CHECK(v >= prev - 1e-10);
    prev = v;
  }
}

TEST_CASE("median from inversion") {
  CHECK(zeta_quantile(1.0, 0.5) == doctest::Approx(0.206705239188099).epsilon(1e-6));
}

TEST_CASE("threshold one collapses the record time to zero") {
  auto s = mc_zeta(1.0 / 64, 64, 50, 91);
  REQUIRE(s.values.size() == 50);
  for (double v : s.values) CHECK(v == 0.0);
}

TEST_CASE("mc record times converge to the analytic transform as 1/sqrt(n)") {
  // the walk approximation carries a discretization defect of order
  // n^{-1/2}; the deviation must shrink accordingly and the
  // sqrt-extrapolated value must agree within Monte Carlo error
  const int64_t reps = 6000;
  auto s_small = mc_zeta(1.0, 250, reps, 92);
  auto s_big = mc_zeta(1.0, 1000, reps, 92);
  REQUIRE(s_small.horizon_exhausted == 0);
  REQUIRE(s_big.horizon_exhausted == 0);
  for (double th : {0.5, 1.0, 2.0}) {
    MeanAcc small, big;
    for (double v : s_small.values) small.add(std::exp(-0.5 * th * th * v));
    for (double v : s_big.values) big.add(std::exp(-0.5 * th * th * v));
    double ref = laplace_zeta(1.0, th);
    double dev_small = std::fabs(small.mean - ref);
    double dev_big = std::fabs(big.mean - ref);
    // halving 1/sqrt(n) should halve the defect, up to MC noise
    CHECK(dev_big < 0.65 * dev_small + 3.0 * big.se());
    // 1/sqrt(250) = 2/sqrt(1000), so the linear-in-defect extrapolation
    // is 2*E_1000 - E_250
    double extrap = 2.0 * big.mean - small.mean;
    double extrap_se = std::sqrt(4.0 * big.se() * big.se() + small.se() * small.se());
    CHECK(std::fabs(extrap - ref) < 3.5 * extrap_se + 0.001);
  }
}

TEST_CASE("mc quantiles scale like u^2") {
  const int64_t n = 600, reps = 2500;
  auto s1 = mc_zeta(1.0, n, reps, 93);
  auto s2 = mc_zeta(2.0, n, reps, 94);
  double m1 = median(s1.values), m2 = median(s2.values);
  CHECK(m2 / m1 == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("median of the mc law matches the inverted cdf after extrapolation") {
  // sqrt-extrapolated over n in {250, 1000} to strip the walk's
  // discretization defect, as for the transform above
  const int64_t reps = 6000;
  auto s_small = mc_zeta(1.0, 250, reps, 95);
  auto s_big = mc_zeta(1.0, 1000, reps, 95);
  double extrap = 2.0 * median(s_big.values) - median(s_small.values);
  double analytic = zeta_quantile(1.0, 0.5);
  // median MC error at this sample size is about 0.005
  CHECK(std::fabs(extrap - analytic) < 0.02);
  CHECK(median(s_big.values) > analytic);  // the defect has a known sign
}

TEST_CASE("drift slows records and changes the law detectably") {
  // the upward drift spreads the walk, so local-time records arrive
  // later; the shift at drift 1/n is small and needs a large sample
  const int64_t n = 500, reps = 8000;
  auto plain = mc_zeta(1.0, n, reps, 96);
  auto drift = mc_zeta_drift(1.0, n, reps, 97);
  REQUIRE(plain.values.size() == drift.values.size());
  CHECK(ks2_pvalue(plain.values, drift.values) < 0.01);
  CHECK(median(drift.values) > median(plain.values));
}

TEST_CASE("delta zero reduces the drifted sampler to the plain one") {
  auto a = mc_zeta(0.8, 200, 40, 98);
  auto b = mc_zeta_drift(0.8, 200, 40, 98, 0.0);
  CHECK(a.values == b.values);
}

TEST_CASE("zeta law wrapper") {
  ZetaLaw law(1.0);
  CHECK(law.analytic());
  CHECK(law.laplace(1.0) == doctest::Approx(0.8930519596350564).epsilon(1e-12));
  CHECK(law.cdf(0.2) == doctest::Approx(0.472529707632399).epsilon(1e-6));
  ZetaLaw drifted(1.0, 1.0);
  CHECK_FALSE(drifted.analytic());
  CHECK_THROWS(drifted.laplace(1.0));
  CHECK_THROWS(drifted.cdf(0.2));
  auto s = drifted.sample(100, 20, 99);
  CHECK(s.values.size() + static_cast<size_t>(s.horizon_exhausted) == 20);
}

TEST_SUITE_END();
