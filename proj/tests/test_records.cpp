#include <doctest.h>

#include <cmath>

#include "dlab/records.hpp"
#include "dlab/stats.hpp"

using namespace dlab;

TEST_SUITE_BEGIN("records");

namespace {

WalkConfig cyl(int n, int d, double delta) {
  WalkConfig wc;
  wc.geom.n = n;
  wc.geom.dim = d;
  wc.delta = delta;
  return wc;
}

// replay a fixed height sequence
struct FixedStream {
  const std::vector<int64_t>* hs;
  size_t i = 0;
  int64_t operator()() { return (*hs)[i++]; }
};

// brute-force record time from a full height path (index 0 = start)
RecordResult brute_force(const std::vector<int64_t>& heights, int64_t threshold,
                         std::optional<int64_t> target = std::nullopt) {
  LevelCounts counts(heights[0]);
  int64_t last = heights[0];
  RecordResult r;
  r.threshold = threshold;
  if (counts.increment(last) >= threshold && (!target || last == *target)) {
    r.reached = true;
    r.time = 0;
    r.level = last;
    return r;
  }
  for (size_t n = 1; n < heights.size(); ++n) {
    if (heights[n] == last) continue;
    last = heights[n];
    if (counts.increment(last) >= threshold && (!target || last == *target)) {
      r.reached = true;
      r.time = static_cast<int64_t>(n);
      r.level = last;
      return r;
    }
  }
  return r;
}

}  // namespace

TEST_CASE("visit thresholds") {
  CHECK(cylinder_visit_threshold(0.75, 2, 2) == 1);  // 0.75*4/3
  CHECK(cylinder_visit_threshold(1.0, 6, 2) == 12);
  CHECK(cylinder_visit_threshold(0.3, 10, 2) == 10);  // float fuzz guard
  CHECK(one_d_visit_threshold(1.0, 2000) == 2000);
  CHECK(one_d_visit_threshold(0.5, 3) == 2);
}

TEST_CASE("threshold one is reached at time zero") {
  WalkConfig wc = cyl(2, 2, 0.0);
  Rng rng(21, 0);
  auto r = cylinder_record(wc, 0.75, std::nullopt, 1000, rng);
  CHECK(r.reached);
  CHECK(r.time == 0);
  CHECK(r.level == 0);
}

TEST_CASE("deterministic zig-zag reaches threshold two at rho_2") {
  std::vector<int64_t> heights = {0, 1, 0};
  FixedStream fs{&heights, 1};
  RecordOptions opt;
  opt.threshold = 2;
  opt.target_level = 0;
  opt.horizon = 2;
  auto r = scan_record(fs, 0, opt);
  CHECK(r.reached);
  CHECK(r.time == 2);

  // with lazy (lateral) steps interleaved the skeleton times shift
  std::vector<int64_t> lazy = {0, 0, 1, 1, 0};
  FixedStream fs2{&lazy, 1};
  opt.horizon = 4;
  auto r2 = scan_record(fs2, 0, opt);
  CHECK(r2.reached);
  CHECK(r2.time == 4);
}

TEST_CASE("horizon exhaustion is distinct from a value") {
  std::vector<int64_t> heights = {0, 1, 2, 3, 4, 5};
  FixedStream fs{&heights, 1};
  RecordOptions opt;
  opt.threshold = 2;
  opt.horizon = 5;
  auto r = scan_record(fs, 0, opt);
  CHECK_FALSE(r.reached);
  CHECK(r.steps == 5);
}

TEST_CASE("level counts bookkeeping: sum equals skeleton index + 1") {
  Rng rng(22, 0);
  OneDStepper st(0.0, 0);
  LevelCounts counts(0);
  counts.increment(0);
  int64_t k = 0;
  int64_t last = 0;
  for (int n = 0; n < 20000; ++n) {
    st.step(rng);
    if (st.pos() != last) {
      last = st.pos();
      counts.increment(last);
      ++k;
    }
  }
  CHECK(counts.sum() == k + 1);  // the 1d walk never idles, but keep the general check
}

TEST_CASE("record time agrees with brute force and is monotone in u") {
  WalkConfig wc = cyl(4, 2, 0.1);
  for (uint64_t stream = 0; stream < 12; ++stream) {
    // store the height path once, then compare streaming vs brute force
    Rng rng(23, stream);
    CylinderStepper stepper(wc, Site{});
    std::vector<int64_t> heights = {0};
    for (int n = 0; n < 100000; ++n) {
      stepper.step(rng);
      heights.push_back(stepper.height());
    }
    Rng rng2(23, stream);
    CylinderStepper s2(wc, Site{});
    RecordOptions opt;
    opt.threshold = cylinder_visit_threshold(1.0, 4, 2);
    opt.horizon = 100000;
    auto streamed = scan_record([&] { s2.step(rng2); return s2.height(); }, 0, opt);
    auto brute = brute_force(heights, opt.threshold);
    CHECK(streamed.reached == brute.reached);
    if (brute.reached) {
      CHECK(streamed.time == brute.time);
      CHECK(streamed.level == brute.level);
    }
    // lowering u can only make the record earlier
    auto lower = brute_force(heights, cylinder_visit_threshold(0.5, 4, 2));
    if (brute.reached) {
      CHECK(lower.reached);
      CHECK(lower.time <= brute.time);
    }
  }
}

TEST_CASE("skeleton clock: rho_k / k converges to d+1") {
  WalkConfig wc = cyl(6, 2, 0.0);
  Rng rng(24, 0);
  CylinderStepper st(wc, Site{});
  int64_t last = 0, k = 0, n = 0;
  MeanAcc gaps;
  int64_t last_rho = 0;
  while (k < 100000) {
    st.step(rng);
    ++n;
    if (st.height() != last) {
      last = st.height();
      ++k;
      gaps.add(static_cast<double>(n - last_rho));
      last_rho = n;
    }
  }
  CHECK(std::fabs(gaps.mean - 3.0) < 3.0 * gaps.se());
}

TEST_CASE("1d record matches the generic scanner on the same stream") {
  for (uint64_t stream = 0; stream < 10; ++stream) {
    Rng a(25, stream), b(25, stream);
    auto direct = one_d_record(1.0, 50, 0.0, a, 1000000);
    OneDStepper st(0.0, 0);
    RecordOptions opt;
    opt.threshold = one_d_visit_threshold(1.0, 50);
    opt.horizon = 1000000;
    auto generic = scan_record([&] { st.step(b); return st.pos(); }, 0, opt);
    CHECK(direct.reached == generic.reached);
    CHECK(direct.time == generic.time);
    CHECK(direct.level == generic.level);
  }
}

TEST_CASE("truncated level grid upper-bounds the full infimum samplewise") {
  auto grid = truncated_level_grid(40, 4);
  CHECK(grid.count(0) == 1);
  for (uint64_t stream = 0; stream < 20; ++stream) {
    Rng a(26, stream), b(26, stream);
    auto full = one_d_record(0.5, 40, 0.025, a, 2000000);
    auto trunc = one_d_record(0.5, 40, 0.025, b, 2000000, &grid);
    REQUIRE(full.reached);
    if (trunc.reached) CHECK(trunc.time >= full.time);
  }
}

TEST_CASE("stability of scaled records across seeds") {
  // medians of S / n^{2d} for the cylinder walk, two disjoint seed sets
  WalkConfig wc = cyl(6, 2, 0.0);
  const double scale = std::pow(6.0, 4);
  auto run = [&](uint64_t seed) {
    std::vector<double> xs;
    for (uint64_t r = 0; r < 60; ++r) {
      Rng rng(seed, r);
      auto res = cylinder_record(wc, 1.0, std::nullopt, 10000000, rng);
      REQUIRE(res.reached);
      xs.push_back(static_cast<double>(res.time) / scale);
    }
    return median(xs);
  };
  double m1 = run(27), m2 = run(28);
  CHECK(m1 / m2 < 2.0);
  CHECK(m2 / m1 < 2.0);
}

TEST_SUITE_END();
