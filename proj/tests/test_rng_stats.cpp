#include <doctest.h>

#include <cmath>

#include "dlab/rng.hpp"
#include "dlab/stats.hpp"

using namespace dlab;

TEST_SUITE_BEGIN("rng-stats");

TEST_CASE("streams reproduce and separate") {
  Rng a(42, 7), b(42, 7), c(42, 8), d(43, 7);
  bool equal = true, diff_stream = false, diff_seed = false;
  for (int i = 0; i < 100; ++i) {
    uint64_t va = a.next_u64();
    equal &= va == b.next_u64();
    diff_stream |= va != c.next_u64();
    diff_seed |= va != d.next_u64();
  }
  CHECK(equal);
  CHECK(diff_stream);
  CHECK(diff_seed);
}

TEST_CASE("uniform doubles have the right mean") {
  Rng rng(1, 0);
  MeanAcc acc;
  for (int i = 0; i < 100000; ++i) acc.add(rng.next_double());
  CHECK(std::fabs(acc.mean - 0.5) < 4.0 * acc.se());
}

TEST_CASE("exponential draws have unit mean") {
  Rng rng(2, 0);
  MeanAcc acc;
  for (int i = 0; i < 100000; ++i) acc.add(rng.next_exp());
  CHECK(std::fabs(acc.mean - 1.0) < 4.0 * acc.se());
}

TEST_CASE("poisson mean and variance") {
  Rng rng(3, 0);
  for (double mean : {0.7, 3.5, 45.0}) {
    MeanAcc acc;
    for (int i = 0; i < 20000; ++i) acc.add(static_cast<double>(rng.next_poisson(mean)));
    CHECK(std::fabs(acc.mean - mean) < 4.0 * acc.se());
    CHECK(acc.variance() == doctest::Approx(mean).epsilon(0.1));
  }
}

TEST_CASE("next_below is within range and roughly uniform") {
  Rng rng(4, 0);
  int64_t counts[6] = {0};
  const int n = 120000;
  for (int i = 0; i < n; ++i) ++counts[rng.next_below(6)];
  for (int k = 0; k < 6; ++k) {
    double p = static_cast<double>(counts[k]) / n;
    CHECK(std::fabs(p - 1.0 / 6) < 4.0 * binom_se(1.0 / 6, n));
  }
}

TEST_CASE("fork gives an unrelated stream") {
  Rng a(5, 1);
  Rng f = a.fork(99);
  Rng a2(5, 1);
  int agree = 0;
  for (int i = 0; i < 64; ++i) agree += f.next_u64() == a2.next_u64() ? 1 : 0;
  CHECK(agree < 4);
}

TEST_CASE("gamma_q reference values") {
  // Q(1/2, 1/2) = erfc(sqrt(1/2))
  CHECK(gamma_q(0.5, 0.5) == doctest::Approx(0.31731050786291415).epsilon(1e-10));
  CHECK(gamma_q(1.0, 0.0) == doctest::Approx(1.0));
  // chi-square 95% point with 1 dof
  CHECK(chi2_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-8));
  CHECK(chi2_sf(0.0, 5) == doctest::Approx(1.0));
}

TEST_CASE("two-sample KS distinguishes shifted samples") {
  Rng rng(6, 0);
  std::vector<double> a, b, c;
  for (int i = 0; i < 4000; ++i) {
    a.push_back(rng.next_double());
    b.push_back(rng.next_double());
    c.push_back(rng.next_double() + 0.2);
  }
  CHECK(ks2_pvalue(a, b) > 0.001);
  CHECK(ks2_pvalue(a, c) < 1e-6);
}

TEST_CASE("chi2 gof pools small cells and accepts the truth") {
  Rng rng(7, 0);
  const double mean = 4.0;
  std::vector<int64_t> obs(30, 0);
  const int64_t n = 10000;
  for (int64_t i = 0; i < n; ++i) {
    int64_t k = rng.next_poisson(mean);
    ++obs[static_cast<size_t>(std::min<int64_t>(k, 29))];
  }
  std::vector<double> prob(30, 0.0);
  double p = std::exp(-mean), acc = 0.0;
  for (int k = 0; k < 29; ++k) {
    prob[static_cast<size_t>(k)] = p;
    acc += p;
    p *= mean / (k + 1);
  }
  prob[29] = 1.0 - acc;
  auto res = chi2_gof(obs, prob, n);
  CHECK(res.pvalue > 0.001);
}

TEST_CASE("median and quantiles") {
  CHECK(median({3.0, 1.0, 2.0}) == doctest::Approx(2.0));
  std::vector<double> xs = {1.0, 2.0, 3.0, 4.0};
  CHECK(quantile_sorted(xs, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("linear fit recovers a line") {
  std::vector<double> x = {0, 1, 2, 3}, y = {1, 3, 5, 7};
  auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(2.0));
  CHECK(f.intercept == doctest::Approx(1.0));
}

TEST_SUITE_END();
