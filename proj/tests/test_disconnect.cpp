#include <doctest.h>

#include "dlab/disconnect.hpp"

using namespace dlab;

TEST_SUITE_BEGIN("disconnect");

namespace {

WalkConfig cyl(int n, int d, double delta) {
  WalkConfig wc;
  wc.geom.n = n;
  wc.geom.dim = d;
  wc.delta = delta;
  return wc;
}

Site at(int x, int y, int64_t h) {
  Site s;
  s.torus = {x, y};
  s.height = h;
  return s;
}

}  // namespace

TEST_CASE("empty trace does not disconnect") {
  TraceStore trace(cyl(5, 2, 0).geom);
  CHECK_FALSE(disconnects(trace, Adjacency::Linf));
}

TEST_CASE("one full level disconnects, one site on a big torus does not") {
  Geometry g = cyl(5, 2, 0).geom;
  TraceStore full(g);
  int64_t t = 0;
  for (int x = 0; x < 5; ++x)
    for (int y = 0; y < 5; ++y) full.visit(at(x, y, 0), t++);
  int64_t witness = 0;
  CHECK(disconnects(full, Adjacency::Linf, &witness));
  CHECK(disconnects(full, Adjacency::L1));
  CHECK(disconnects_flood(full, Adjacency::Linf, INT64_MAX));

  TraceStore single(g);
  single.visit(at(2, 2, 0), 0);
  CHECK_FALSE(disconnects(single, Adjacency::Linf));
  CHECK_FALSE(disconnects_flood(single, Adjacency::Linf, INT64_MAX));
}

TEST_CASE("side length one: a single site cuts the line") {
  Geometry g;
  g.n = 1;
  g.dim = 2;
  TraceStore trace(g);
  trace.visit(at(0, 0, 0), 0);
  CHECK(disconnects(trace, Adjacency::Linf));
  CHECK(disconnects(trace, Adjacency::L1));
}

TEST_CASE("an almost-full level leaks through the gap") {
  Geometry g = cyl(4, 2, 0).geom;
  TraceStore trace(g);
  int64_t t = 0;
  for (int x = 0; x < 4; ++x)
    for (int y = 0; y < 4; ++y)
      if (!(x == 1 && y == 2)) trace.visit(at(x, y, 0), t++);
  CHECK_FALSE(disconnects(trace, Adjacency::Linf));
  // plugging the gap one level up still leaves a diagonal route
  trace.visit(at(1, 2, 1), t++);
  CHECK_FALSE(disconnects(trace, Adjacency::Linf));
  // under L1 complement adjacency the vertical tube is blocked
  CHECK(disconnects(trace, Adjacency::L1));
  // fill the gap itself
  trace.visit(at(1, 2, 0), t++);
  CHECK(disconnects(trace, Adjacency::Linf));
}

TEST_CASE("mask search and flood fill agree on random traces") {
  Rng rng(31, 0);
  for (int rep = 0; rep < 60; ++rep) {
    Geometry g = cyl(3 + static_cast<int>(rng.next_below(3)), 2, 0).geom;
    TraceStore trace(g);
    int64_t sites = 10 + static_cast<int64_t>(rng.next_below(60));
    for (int64_t i = 0; i < sites; ++i)
      trace.visit(at(static_cast<int>(rng.next_below(g.n)), static_cast<int>(rng.next_below(g.n)),
                     static_cast<int64_t>(rng.next_below(4)) - 2),
                  i);
    for (Adjacency adj : {Adjacency::Linf, Adjacency::L1}) {
      bool v = disconnects(trace, adj);
      CHECK(v == disconnects_flood(trace, adj, INT64_MAX));
      // widening the height window must not change the verdict
      CHECK(v == disconnects_flood(trace, adj, INT64_MAX, 2));
    }
  }
}

TEST_CASE("detected time is exact: every-step oracle equals checkpoint search") {
  WalkConfig wc = cyl(4, 2, 0.0);
  for (uint64_t seed_rep = 0; seed_rep < 10; ++seed_rep) {
    DetectSchedule oracle;
    oracle.every_step = true;
    Rng r1(32, seed_rep);
    auto a = detect_disconnection(wc, oracle, 30000, r1);

    DetectSchedule fast;  // default geometric + level-count checkpoints
    Rng r2(32, seed_rep);
    auto b = detect_disconnection(wc, fast, 30000, r2);

    REQUIRE(a.found);
    REQUIRE(b.found);
    CHECK(a.t_disconnect == b.t_disconnect);
    CHECK(b.checkpoints_probed < a.checkpoints_probed);
  }
}

TEST_CASE("the verdict flips exactly at the detected time and stays monotone") {
  WalkConfig wc = cyl(4, 2, 0.0);
  Rng rng(33, 1);
  DetectSchedule sched;
  auto rep = detect_disconnection(wc, sched, 30000, rng);
  REQUIRE(rep.found);

  // rebuild the trace to probe the verdict as a function of time
  Rng rng2(33, 1);
  TraceStore trace(wc.geom);
  CylinderStepper st(wc, Site{});
  trace.visit(Site{}, 0);
  for (int64_t n = 1; n <= rep.t_disconnect + 100; ++n) {
    st.step(rng2);
    trace.visit(st.site(), n);
  }
  CHECK(disconnects_at(trace, Adjacency::Linf, rep.t_disconnect));
  CHECK_FALSE(disconnects_at(trace, Adjacency::Linf, rep.t_disconnect - 1));
  CHECK(disconnects_at(trace, Adjacency::Linf, rep.t_disconnect + 100));
  // independent verifier at the detected time
  CHECK(disconnects_flood(trace, Adjacency::Linf, rep.t_disconnect));
  CHECK_FALSE(disconnects_flood(trace, Adjacency::Linf, rep.t_disconnect - 1));
  int64_t probes[4] = {rep.t_disconnect / 4, rep.t_disconnect / 2, rep.t_disconnect - 2,
                       rep.t_disconnect + 50};
  bool prev = false;
  for (int64_t t : probes) {
    bool v = disconnects_at(trace, Adjacency::Linf, t);
    CHECK((!prev || v));  // once true, stays true
    prev = v;
  }
}

TEST_CASE("detection is schedule independent across schedules") {
  WalkConfig wc = cyl(5, 2, 0.0);
  DetectSchedule s1;
  DetectSchedule s2;
  s2.ratio = 3.0;
  s2.theta_chk = 0.0;
  DetectSchedule s3;
  s3.first = 10;
  s3.ratio = 1.1;
  int64_t t1 = -1;
  for (auto* s : {&s1, &s2, &s3}) {
    Rng rng(34, 2);
    auto rep = detect_disconnection(wc, *s, 200000, rng);
    REQUIRE(rep.found);
    if (t1 < 0)
      t1 = rep.t_disconnect;
    else
      CHECK(rep.t_disconnect == t1);
  }
}

TEST_CASE("horizon exhaustion reports not found") {
  WalkConfig wc = cyl(6, 2, 0.0);
  Rng rng(35, 0);
  DetectSchedule sched;
  auto rep = detect_disconnection(wc, sched, 50, rng);
  CHECK_FALSE(rep.found);
  CHECK(rep.steps_simulated == 50);
}

TEST_SUITE_END();
