#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dlab/disconnect.hpp"
#include "dlab/interlace.hpp"
#include "dlab/lattice.hpp"
#include "dlab/potential.hpp"
#include "dlab/records.hpp"
#include "dlab/rng.hpp"
#include "dlab/slt.hpp"
#include "dlab/walk.hpp"
#include "dlab/zeta.hpp"

namespace py = pybind11;
using namespace dlab;

namespace {

Geometry make_geometry(int n, int d, const std::string& adjacency) {
  Geometry g;
  g.n = n;
  g.dim = d;
  g.adjacency = adjacency == "linf" ? Adjacency::Linf : Adjacency::L1;
  g.validate();
  return g;
}

Site make_site(const std::vector<int32_t>& torus, int64_t height, int dim) {
  Site s;
  for (int i = 0; i < dim && i < static_cast<int>(torus.size()); ++i) s.torus[i] = torus[i];
  s.height = height;
  return s;
}

WalkConfig make_walk_config(int n, int d, double delta, uint64_t seed) {
  WalkConfig wc;
  wc.geom = make_geometry(n, d, "l1");
  wc.delta = delta;
  wc.seed = seed;
  wc.validate();
  return wc;
}

}  // namespace

PYBIND11_MODULE(_dlab, m) {
  m.doc() = "Monte Carlo laboratory: biased walks on discrete cylinders, disconnection "
            "times, record-breaking local times, random interlacements, soft local "
            "times, and the record-time limit law";

  // ---- lattice ----
  m.def(
      "neighbors",
      [](int n, int d, const std::string& adjacency, const std::vector<int32_t>& torus,
         int64_t height) {
        Geometry g = make_geometry(n, d, adjacency);
        std::vector<std::pair<std::vector<int32_t>, int64_t>> out;
        for (const Site& s : neighbors(g, make_site(torus, height, d)))
          out.emplace_back(std::vector<int32_t>(s.torus.begin(), s.torus.begin() + d), s.height);
        return out;
      },
      py::arg("n"), py::arg("d"), py::arg("adjacency"), py::arg("torus"), py::arg("height"),
      "Neighbor sites under the chosen adjacency, canonical order.");

  // ---- walk kernels ----
  m.def(
      "step_kernel",
      [](int n, int d, double delta) {
        WalkConfig wc = make_walk_config(n, d, delta, 0);
        return step_kernel(wc, Site{});
      },
      py::arg("n"), py::arg("d"), py::arg("delta"));
  m.def(
      "conditioned_step_kernel",
      [](int n, int d, double delta, int64_t height) {
        WalkConfig wc = make_walk_config(n, d, delta, 0);
        Site s;
        s.height = height;
        return conditioned_step_kernel(wc, s, Phase::BeforeRecord);
      },
      py::arg("n"), py::arg("d"), py::arg("delta"), py::arg("height"));
  m.def(
      "rn_log_ratio",
      [](int64_t up, int64_t down, int64_t length, double delta) {
        StepStats st;
        st.up = up;
        st.down = down;
        st.length = length;
        return rn_log_ratio(st, delta);
      },
      py::arg("up"), py::arg("down"), py::arg("length"), py::arg("delta"));
  m.def(
      "sample_path_heights",
      [](int n, int d, double delta, int64_t steps, uint64_t seed, uint64_t stream) {
        WalkConfig wc = make_walk_config(n, d, delta, seed);
        Rng rng(seed, stream);
        PathSample p = sample_path(wc, steps, rng);
        std::vector<int64_t> heights;
        for (const Site& s : p.sites()) heights.push_back(s.height);
        return heights;
      },
      py::arg("n"), py::arg("d"), py::arg("delta"), py::arg("steps"), py::arg("seed"),
      py::arg("stream") = 0);

  // ---- record times ----
  m.def(
      "one_d_record",
      [](double u, int64_t n, double delta, uint64_t seed, uint64_t stream, int64_t horizon) {
        Rng rng(seed, stream);
        RecordResult r = one_d_record(u, n, delta, rng, horizon);
        return py::make_tuple(r.reached, r.time, r.level, r.threshold);
      },
      py::arg("u"), py::arg("n"), py::arg("delta"), py::arg("seed"), py::arg("stream") = 0,
      py::arg("horizon") = INT64_MAX);
  m.def("mc_zeta",
        [](double u, int64_t n, int64_t replicas, uint64_t seed) {
          return mc_zeta(u, n, replicas, seed).values;
        },
        py::arg("u"), py::arg("n"), py::arg("replicas"), py::arg("seed"));

  // ---- disconnection ----
  m.def(
      "disconnection_time",
      [](int n, int d, double delta, uint64_t seed, uint64_t stream, int64_t horizon,
         bool every_step) {
        WalkConfig wc = make_walk_config(n, d, delta, seed);
        DetectSchedule sched;
        sched.every_step = every_step;
        Rng rng(seed, stream);
        DisconnectionReport rep = detect_disconnection(wc, sched, horizon, rng);
        return py::make_tuple(rep.found, rep.t_disconnect, rep.steps_simulated,
                              rep.distinct_sites);
      },
      py::arg("n"), py::arg("d"), py::arg("delta"), py::arg("seed"), py::arg("stream") = 0,
      py::arg("horizon") = 10000000, py::arg("every_step") = false);

  // ---- potential theory ----
  m.def(
      "capacity_box",
      [](int side, int r_esc, int64_t walks_per_site, uint64_t seed) {
        LatBox box;
        box.dim = 3;
        for (int i = 0; i < 3; ++i) {
          box.lo[i] = 0;
          box.hi[i] = side - 1;
        }
        Rng rng(seed, 0xCA9);
        auto est = capacity_free(box.sites(), 3, r_esc, walks_per_site, rng);
        return py::make_tuple(est.cap, est.se, est.cap_corrected);
      },
      py::arg("side"), py::arg("r_esc"), py::arg("walks_per_site"), py::arg("seed"));
  m.def(
      "green_value",
      [](const std::vector<int>& target, int r_esc, int64_t walks, uint64_t seed) {
        LPoint y{target[0], target[1], target[2], 0};
        Rng rng(seed, 0x64EE);
        auto est = green_mc(LPoint{}, y, 3, r_esc, walks, rng);
        return py::make_tuple(est.value, est.se, est.corrected);
      },
      py::arg("target"), py::arg("r_esc"), py::arg("walks"), py::arg("seed"));

  // ---- interlacements ----
  m.def(
      "cloud_counts",
      [](double u, int d_radius, int u_radius, int r_esc, int64_t clouds, uint64_t seed) {
        LatBox d_box = lat_ball(LPoint{}, d_radius, 3);
        LatBox u_box = lat_ball(LPoint{}, u_radius, 3);
        Rng eq_rng(seed, 0xE901);
        auto eq = cloud_equilibrium(d_box, r_esc, 2000, eq_rng);
        std::vector<int64_t> hits;
        for (int64_t c = 0; c < clouds; ++c) {
          Rng rng(seed, 0xC100D + static_cast<uint64_t>(c));
          hits.push_back(sample_cloud(u, d_box, u_box, r_esc, rng, &eq).hit_count());
        }
        return py::make_tuple(eq.cap, hits);
      },
      py::arg("u"), py::arg("d_radius"), py::arg("u_radius"), py::arg("r_esc"),
      py::arg("clouds"), py::arg("seed"));

  // ---- soft local time ----
  m.def(
      "slt_run",
      [](std::vector<double> gbar, std::vector<std::vector<double>> kernels, int64_t n_draws,
         double eta, double lambda, double scale, uint64_t seed, uint64_t stream) {
        SltInstance inst{std::move(gbar), std::move(kernels)};
        Rng rng(seed, stream);
        CouplingResult res = run_slt(inst, n_draws, rng);
        InclusionReport rep = check_inclusions(res, eta, lambda, scale);
        return py::make_tuple(rep.event_ok, rep.incl1, rep.incl2);
      },
      py::arg("gbar"), py::arg("kernels"), py::arg("n_draws"), py::arg("eta"), py::arg("lambda"),
      py::arg("scale"), py::arg("seed"), py::arg("stream") = 0);

  // ---- zeta law ----
  m.def("laplace_zeta", &laplace_zeta, py::arg("u"), py::arg("theta"));
  m.def("bessel_i0", &bessel_i0, py::arg("x"));
  m.def("bessel_i1", &bessel_i1, py::arg("x"));
  m.def(
      "cdf_zeta",
      [](double u, double t, const std::string& scheme, int order) {
        CdfOptions opt;
        opt.scheme = scheme == "gaver-stehfest" ? InvScheme::GaverStehfest : InvScheme::Talbot;
        if (order > 0) opt.order = order;
        else if (opt.scheme == InvScheme::GaverStehfest) opt.order = 12;
        return cdf_zeta(u, t, opt);
      },
      py::arg("u"), py::arg("t"), py::arg("scheme") = "talbot", py::arg("order") = 0);
  m.def(
      "zeta_quantile", [](double u, double p) { return zeta_quantile(u, p); }, py::arg("u"),
      py::arg("p"));

#ifdef VERSION_INFO
  m.attr("__version__") = VERSION_INFO;
#else
  m.attr("__version__") = "dev";
#endif
}
