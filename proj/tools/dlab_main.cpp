// Experiment driver: deterministic replicated runs of the lab's studies,
// configured by a JSON file with CLI overrides.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "dlab/disconnect.hpp"
#include "dlab/interlace.hpp"
#include "dlab/potential.hpp"
#include "dlab/records.hpp"
#include "dlab/rng.hpp"
#include "dlab/sim.hpp"
#include "dlab/slt.hpp"
#include "dlab/stats.hpp"
#include "dlab/walk.hpp"
#include "dlab/zeta.hpp"

using nlohmann::json;
using namespace dlab;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitHorizon = 3;

uint64_t fnv1a64(const std::string& s) {
  uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ull;
  }
  return h;
}

std::string hex64(uint64_t v) {
  char buf[19];
  snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

struct RunContext {
  json cfg;
  std::string experiment;
  fs::path out_dir;
  std::string cfg_hash;
  uint64_t seed = 1;
  int64_t replicas = 1;
  int workers = 1;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  uint64_t stream_fingerprint(int64_t replica) const {
    Rng r(seed, static_cast<uint64_t>(replica));
    return r.next_u64();
  }

  std::ofstream open_csv(const std::string& name, const std::string& header) const {
    fs::create_directories(out_dir);
    std::ofstream f(out_dir / name);
    f << header << "\n";
    return f;
  }

  void write_meta(const json& extra = {}) const {
    json meta;
    meta["experiment"] = experiment;
    meta["config"] = cfg;
    meta["config_hash"] = cfg_hash;
    meta["schema_version"] = 1;
    meta["wall_time_s"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    if (!extra.is_null()) meta["summary"] = extra;
    std::ofstream f(out_dir / (experiment + ".meta.json"));
    f << meta.dump(2) << "\n";
  }
};

Geometry geometry_from(const json& cfg) {
  Geometry g;
  const auto& jg = cfg.at("geometry");
  g.n = jg.at("n").get<int>();
  g.dim = jg.value("d", 2);
  std::string adj = jg.value("walk_adjacency", "l1");
  g.adjacency = adj == "linf" ? Adjacency::Linf : Adjacency::L1;
  g.validate();
  return g;
}

Adjacency complement_adjacency_from(const json& cfg) {
  std::string adj = cfg.value("complement_adjacency", "linf");
  return adj == "l1" ? Adjacency::L1 : Adjacency::Linf;
}

double drift_from(const json& cfg, const Geometry& g) {
  if (!cfg.contains("drift")) return 0.0;
  const auto& jd = cfg.at("drift");
  if (jd.contains("delta")) return jd.at("delta").get<double>();
  if (jd.contains("alpha")) {
    if (jd.at("alpha").is_string())  // "inf"
      return 0.0;
    return delta_from_alpha(jd.at("alpha").get<double>(), g.n, g.dim);
  }
  return 0.0;
}

WalkConfig walk_config_from(const RunContext& ctx) {
  WalkConfig wc;
  wc.geom = geometry_from(ctx.cfg);
  wc.delta = drift_from(ctx.cfg, wc.geom);
  wc.seed = ctx.seed;
  if (ctx.cfg.contains("start_level")) {
    wc.start_kind = StartKind::UniformLevel;
    wc.start_level = ctx.cfg.at("start_level").get<int64_t>();
  }
  wc.validate();
  return wc;
}

// ---------------------------------------------------------------- disconnect

int cmd_disconnect(RunContext& ctx) {
  WalkConfig wc = walk_config_from(ctx);
  const int64_t horizon = ctx.cfg.value("horizon", int64_t{100000000});
  DetectSchedule sched;
  if (ctx.cfg.contains("schedule")) {
    const auto& js = ctx.cfg.at("schedule");
    sched.ratio = js.value("ratio", sched.ratio);
    sched.first = js.value("first", sched.first);
    sched.theta_chk = js.value("theta_chk", sched.theta_chk);
    sched.every_step = js.value("every_step", false);
  }
  Adjacency cadj = complement_adjacency_from(ctx.cfg);

  auto rows = run_replicas<DisconnectionReport>(ctx.replicas, ctx.workers, [&](int64_t rep) {
    Rng rng(ctx.seed, static_cast<uint64_t>(rep));
    return detect_disconnection(wc, sched, horizon, rng, cadj);
  });

  auto csv = ctx.open_csv("disconnect_samples.csv",
                          "config_hash,seed,replica,n,d,delta,found,t_disconnect,t_scaled,steps,"
                          "distinct_sites,checkpoints,witness_level,stream_fingerprint");
  const double scale = std::pow(static_cast<double>(wc.geom.n), 2 * wc.geom.dim);
  int64_t reached = 0;
  for (int64_t i = 0; i < ctx.replicas; ++i) {
    const auto& r = rows[static_cast<size_t>(i)];
    reached += r.found ? 1 : 0;
    csv << ctx.cfg_hash << "," << ctx.seed << "," << i << "," << wc.geom.n << "," << wc.geom.dim
        << "," << wc.delta << "," << (r.found ? 1 : 0) << "," << r.t_disconnect << ","
        << (r.found ? static_cast<double>(r.t_disconnect) / scale : -1.0) << ","
        << r.steps_simulated << "," << r.distinct_sites << "," << r.checkpoints_probed << ","
        << r.witness_level << "," << hex64(ctx.stream_fingerprint(i)) << "\n";
  }
  ctx.write_meta({{"replicas_disconnected", reached}});
  return (ctx.replicas > 0 && reached == 0) ? kExitHorizon : kExitOk;
}

// -------------------------------------------------------------- record-times

int cmd_record_times(RunContext& ctx) {
  WalkConfig wc = walk_config_from(ctx);
  const int64_t horizon = ctx.cfg.value("horizon", int64_t{100000000});
  std::vector<double> u_list;
  if (ctx.cfg.contains("u_list"))
    u_list = ctx.cfg.at("u_list").get<std::vector<double>>();
  else
    u_list.push_back(ctx.cfg.value("u", 1.0));
  for (double u : u_list)
    if (!(u > 0.0)) throw std::invalid_argument("record level u must be positive");
  std::optional<int64_t> target;
  if (ctx.cfg.contains("target_level")) target = ctx.cfg.at("target_level").get<int64_t>();

  auto csv = ctx.open_csv("record_times.csv",
                          "config_hash,replica,u,threshold,reached,z_star,s_time,s_scaled,steps,"
                          "stream_fingerprint");
  int64_t reached_total = 0;
  const double scale = std::pow(static_cast<double>(wc.geom.n), 2 * wc.geom.dim);
  for (size_t ui = 0; ui < u_list.size(); ++ui) {
    const double u = u_list[ui];
    auto rows = run_replicas<RecordResult>(ctx.replicas, ctx.workers, [&](int64_t rep) {
      Rng rng(ctx.seed, (static_cast<uint64_t>(ui) << 40) ^ static_cast<uint64_t>(rep));
      return cylinder_record(wc, u, target, horizon, rng);
    });
    for (int64_t i = 0; i < ctx.replicas; ++i) {
      const auto& r = rows[static_cast<size_t>(i)];
      reached_total += r.reached ? 1 : 0;
      csv << ctx.cfg_hash << "," << i << "," << u << "," << r.threshold << ","
          << (r.reached ? 1 : 0) << "," << r.level << "," << r.time << ","
          << (r.reached ? static_cast<double>(r.time) / scale : -1.0) << "," << r.steps << ","
          << hex64(ctx.stream_fingerprint(i)) << "\n";
    }
  }
  ctx.write_meta({{"records_reached", reached_total}});
  return (ctx.replicas > 0 && reached_total == 0) ? kExitHorizon : kExitOk;
}

// ---------------------------------------------------------------------- zeta

int cmd_zeta(RunContext& ctx) {
  const auto thetas = ctx.cfg.value("theta_grid", std::vector<double>{0.5, 1.0, 2.0});
  const auto us = ctx.cfg.value("u_list", std::vector<double>{1.0});
  const auto ts = ctx.cfg.value("t_grid", std::vector<double>{0.05, 0.1, 0.2, 0.3, 0.5, 1.0});

  auto lap = ctx.open_csv("zeta_laplace.csv", "config_hash,u,theta,value");
  for (double u : us)
    for (double th : thetas)
      lap << ctx.cfg_hash << "," << u << "," << th << "," << laplace_zeta(u, th) << "\n";

  auto cdf = ctx.open_csv("zeta_cdf.csv", "config_hash,u,t,cdf,alt_order,unstable");
  for (double u : us)
    for (double t : ts) {
      auto c = cdf_zeta_checked(u, t);
      cdf << ctx.cfg_hash << "," << u << "," << t << "," << c.value << "," << c.alt << ","
          << (c.unstable ? 1 : 0) << "\n";
    }

  json summary;
  if (ctx.cfg.contains("mc")) {
    const auto& jm = ctx.cfg.at("mc");
    const double u = jm.value("u", 1.0);
    const int64_t n = jm.value("n", int64_t{2000});
    const int64_t reps = jm.value("replicas", int64_t{20000});
    ZetaSamples s = mc_zeta(u, n, reps, ctx.seed);

    std::ofstream dump(ctx.out_dir / "zeta_mc_samples.jsonl");
    for (size_t i = 0; i < s.values.size(); ++i) {
      json row = {{"config_hash", ctx.cfg_hash},
                  {"replica", i},
                  {"u", u},
                  {"n", n},
                  {"s_scaled", s.values[i]},
                  {"stream_fingerprint", hex64(ctx.stream_fingerprint(static_cast<int64_t>(i)))}};
      dump << row.dump() << "\n";
    }

    auto inv = ctx.open_csv("zeta_invariance.csv",
                            "config_hash,theta,mc_mean,mc_se,analytic,z_score");
    for (double th : thetas) {
      MeanAcc acc;
      for (double v : s.values) acc.add(std::exp(-0.5 * th * th * v));
      double ref = laplace_zeta(u, th);
      double z = (acc.mean - ref) / std::max(acc.se(), 1e-300);
      inv << ctx.cfg_hash << "," << th << "," << acc.mean << "," << acc.se() << "," << ref << ","
          << z << "\n";
    }
    summary["mc_replicas"] = s.values.size();
    summary["mc_horizon_exhausted"] = s.horizon_exhausted;
  }
  ctx.write_meta(summary);
  return kExitOk;
}

// ----------------------------------------------------------------- potential

int cmd_potential(RunContext& ctx) {
  json summary;
  if (ctx.cfg.contains("capacity")) {
    const auto& jc = ctx.cfg.at("capacity");
    const auto sides = jc.value("box_sides", std::vector<int>{4, 8, 16});
    const int r_esc = jc.value("r_esc", 100);
    const int64_t wps = jc.value("walks_per_site", int64_t{1500});
    auto csv = ctx.open_csv("potential_capacity.csv",
                            "config_hash,box_side,cap,se,cap_corrected,rel_bias_bound,bias_warn");
    for (size_t i = 0; i < sides.size(); ++i) {
      int side = sides[i];
      LatBox box;
      box.dim = 3;
      for (int k = 0; k < 3; ++k) {
        box.lo[k] = 0;
        box.hi[k] = side - 1;
      }
      Rng rng(ctx.seed, 0xCAF0 + i);
      auto est = capacity_free(box.sites(), 3, r_esc, wps, rng);
      csv << ctx.cfg_hash << "," << side << "," << est.cap << "," << est.se << ","
          << est.cap_corrected << "," << est.rel_bias_bound << "," << (est.bias_warn ? 1 : 0)
          << "\n";
    }
  }
  if (ctx.cfg.contains("green")) {
    const auto& jg = ctx.cfg.at("green");
    const int r_esc = jg.value("r_esc", 100);
    const int64_t walks = jg.value("walks", int64_t{200000});
    auto pairs = jg.value("targets", std::vector<std::vector<int>>{{4, 0, 0}, {8, 0, 0}});
    auto csv = ctx.open_csv("potential_green.csv", "config_hash,dx,dy,dz,g,se,corrected");
    for (size_t i = 0; i < pairs.size(); ++i) {
      LPoint y{pairs[i][0], pairs[i][1], pairs[i][2], 0};
      Rng rng(ctx.seed, 0x64EE + i);
      auto est = green_mc(LPoint{}, y, 3, r_esc, walks, rng);
      csv << ctx.cfg_hash << "," << y[0] << "," << y[1] << "," << y[2] << "," << est.value << ","
          << est.se << "," << est.corrected << "\n";
    }
  }
  if (ctx.cfg.contains("equilibrium")) {
    const auto& je = ctx.cfg.at("equilibrium");
    const int k_radius = je.value("k_radius", 1);
    const int u_radius = je.value("u_radius", 8);
    const int64_t wps = je.value("walks_per_site", int64_t{20000});
    LatBox u_box = lat_ball(LPoint{}, u_radius, 3);
    auto k_sites = lat_ball(LPoint{}, k_radius, 3).sites();
    auto exact = equilibrium_exact(k_sites, u_box, je.value("max_sites", int64_t{100000}));
    Rng rng(ctx.seed, 0xE01A);
    auto mc = equilibrium_mc(k_sites, u_box, wps, rng);
    auto csv = ctx.open_csv("potential_equilibrium.csv",
                            "config_hash,x,y,z,e_exact,e_mc,mc_se,z_score");
    for (size_t i = 0; i < k_sites.size(); ++i) {
      double z = mc.se[i] > 0 ? (mc.weight[i] - exact.weight[i]) / mc.se[i] : 0.0;
      csv << ctx.cfg_hash << "," << k_sites[i][0] << "," << k_sites[i][1] << "," << k_sites[i][2]
          << "," << exact.weight[i] << "," << mc.weight[i] << "," << mc.se[i] << "," << z << "\n";
    }
    summary["cap_exact"] = exact.cap;
    summary["cap_mc"] = mc.cap;
  }
  if (ctx.cfg.contains("hitting")) {
    const auto& jh = ctx.cfg.at("hitting");
    const int L = jh.value("L", 4);
    const int K = jh.value("K", 16);
    const int64_t hits = jh.value("hits", int64_t{200000});
    const double delta = jh.value("delta", 0.0);
    Rng rng(ctx.seed, 0x817);
    auto chk = hitting_distribution_check(L, K, HitLayout::TwoBox, delta, hits, rng);
    auto csv = ctx.open_csv("potential_hitting.csv",
                            "config_hash,x,y,z,ebar,freq,freq_se,rel_dev");
    for (size_t i = 0; i < chk.sites.size(); ++i)
      csv << ctx.cfg_hash << "," << chk.sites[i][0] << "," << chk.sites[i][1] << ","
          << chk.sites[i][2] << "," << chk.ebar[i] << "," << chk.freq[i] << "," << chk.freq_se[i]
          << "," << std::fabs(chk.freq[i] - chk.ebar[i]) / chk.ebar[i] << "\n";
    summary["hitting_max_rel_dev"] = chk.max_rel_dev;
    summary["hitting_noise_adj_dev"] = chk.noise_adj_dev;
  }
  ctx.write_meta(summary);
  return kExitOk;
}

// ------------------------------------------------------------- interlacements

int cmd_interlacements(RunContext& ctx) {
  json summary;
  if (ctx.cfg.contains("clouds")) {
    const auto& jc = ctx.cfg.at("clouds");
    const double u = jc.value("u", 1.0);
    const int d_radius = jc.value("d_radius", 2);
    const int u_radius = jc.value("u_radius", 6);
    const int kappa = jc.value("kappa", 10);
    const int64_t count = jc.value("count", int64_t{100});
    LatBox d_box = lat_ball(LPoint{}, d_radius, 3);
    LatBox u_box = lat_ball(LPoint{}, u_radius, 3);
    const int r_esc = kappa * (2 * u_radius + 1);
    Rng eq_rng(ctx.seed, 0xE901);
    auto eq = cloud_equilibrium(d_box, r_esc, jc.value("eq_walks_per_site", int64_t{2000}),
                                eq_rng);
    auto csv = ctx.open_csv("interlacement_counts.csv",
                            "config_hash,cloud,u,cap_hat,j_hit,n_excursions,stream_fingerprint");
    int64_t dump_count = jc.value("dump_clouds", int64_t{1});
    std::ofstream dump(ctx.out_dir / "interlacement_clouds.txt");
    for (int64_t c = 0; c < count; ++c) {
      Rng rng(ctx.seed, 0xC100D + static_cast<uint64_t>(c));
      ExcursionCloud cloud = sample_cloud(u, d_box, u_box, r_esc, rng, &eq);
      csv << ctx.cfg_hash << "," << c << "," << u << "," << cloud.cap_hat << ","
          << cloud.hit_count() << "," << cloud.excursion_count() << ","
          << hex64(ctx.stream_fingerprint(c)) << "\n";
      if (c < dump_count) {
        dump << "cloud " << c << " u=" << u << " D=[" << -d_radius << "," << d_radius
             << "]^3 U=[" << -u_radius << "," << u_radius << "]^3 r_esc=" << r_esc
             << " seed=" << ctx.seed << " trajectories=" << cloud.hit_count()
             << " excursions=" << cloud.excursion_count() << "\n";
        for (const auto& t : cloud.trajectories) {
          dump << "  label=" << t.label << " start=(" << t.start[0] << "," << t.start[1] << ","
               << t.start[2] << ") steps=";
          for (uint8_t d : t.dirs) dump << int(d);
          dump << "\n";
        }
      }
    }
    summary["cap_hat"] = eq.cap;
  }
  if (ctx.cfg.contains("theta")) {
    const auto& jt = ctx.cfg.at("theta");
    const auto grid = jt.value("u_grid", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5});
    const int radius = jt.value("radius", 8);
    const int64_t samples = jt.value("samples", int64_t{100});
    const int kappa = jt.value("kappa", 6);
    auto csv = ctx.open_csv("interlacement_theta.csv", "config_hash,u,radius,theta,se");
    for (double u : grid) {
      auto est = estimate_theta(u, radius, samples, ctx.seed, kappa);
      csv << ctx.cfg_hash << "," << u << "," << radius << "," << est.theta << "," << est.se
          << "\n";
    }
  }
  if (ctx.cfg.contains("scan")) {
    const auto& js = ctx.cfg.at("scan");
    const auto grid = js.value("u_grid", std::vector<double>{0.1, 0.2, 0.3, 0.4, 0.5, 0.6});
    const auto radii = js.value("radii", std::vector<int>{4, 6});
    const int64_t samples = js.value("samples", int64_t{150});
    const int kappa = js.value("kappa", 4);
    auto scanr = scan_u_star(grid, radii, samples, ctx.seed, kappa);
    auto csv = ctx.open_csv("interlacement_scan.csv", "config_hash,u,radius,p_cross,se");
    for (const auto& row : scanr.rows)
      csv << ctx.cfg_hash << "," << row.u << "," << row.radius << "," << row.p_cross << ","
          << row.se << "\n";
    summary["u_star_lo"] = scanr.u_star_lo;
    summary["u_star_hi"] = scanr.u_star_hi;
    summary["bracket_found"] = scanr.bracket_found;
  }
  ctx.write_meta(summary);
  return kExitOk;
}

// ----------------------------------------------------------------------- slt

int cmd_slt(RunContext& ctx) {
  const double delta = ctx.cfg.value("delta", 0.05);
  const double eta = ctx.cfg.value("eta", 0.3);
  const double lambda = ctx.cfg.value("lambda", 1.0);
  const auto scales = ctx.cfg.value("scales", std::vector<double>{50, 100, 200});
  const int64_t runs = ctx.cfg.value("runs", int64_t{500});
  const int m_sigma = ctx.cfg.value("space_size", 2);

  SltInstance inst;
  inst.gbar.assign(static_cast<size_t>(m_sigma), 1.0 / m_sigma);
  std::vector<double> g1(inst.gbar), g2(inst.gbar);
  g1[0] *= 1.0 + delta;
  g1[1] *= 1.0 - delta * (inst.gbar[0] / inst.gbar[1]);
  g2[0] *= 1.0 - delta;
  g2[1] *= 1.0 + delta * (inst.gbar[0] / inst.gbar[1]);
  inst.kernels = {g1, g2};

  double max_scale = 0;
  for (double s : scales) max_scale = std::max(max_scale, s);
  const int64_t n_draws = static_cast<int64_t>(std::ceil((1.0 + 3.0 * eta) * lambda * max_scale * 1.3)) + 8;

  auto csv = ctx.open_csv("slt_summary.csv",
                          "config_hash,delta,eta,lambda,scale,runs,event_rate,incl1_rate,"
                          "incl2_rate,incl_given_event");
  for (double scale : scales) {
    int64_t ev = 0, i1 = 0, i2 = 0, both_given_ev = 0;
    for (int64_t r = 0; r < runs; ++r) {
      Rng rng(ctx.seed, static_cast<uint64_t>(r));
      CouplingResult res = run_slt(inst, n_draws, rng);
      InclusionReport rep = check_inclusions(res, eta, lambda, scale);
      ev += rep.event_ok ? 1 : 0;
      i1 += rep.incl1 ? 1 : 0;
      i2 += rep.incl2 ? 1 : 0;
      if (rep.event_ok && rep.incl1 && rep.incl2) ++both_given_ev;
    }
    csv << ctx.cfg_hash << "," << delta << "," << eta << "," << lambda << "," << scale << ","
        << runs << "," << static_cast<double>(ev) / runs << ","
        << static_cast<double>(i1) / runs << "," << static_cast<double>(i2) / runs << ","
        << (ev > 0 ? static_cast<double>(both_given_ev) / ev : 1.0) << "\n";
  }
  ctx.write_meta();
  return kExitOk;
}

// --------------------------------------------------------- conditioned-check

int cmd_conditioned_check(RunContext& ctx) {
  WalkConfig wc = walk_config_from(ctx);
  const int64_t threshold = ctx.cfg.value("threshold", int64_t{2});
  const int64_t target_accepted = ctx.cfg.value("accepted_target", int64_t{100000});
  const int64_t horizon = ctx.cfg.value("horizon", int64_t{20000});
  const int deg = 2 * (wc.geom.dim + 1);

  // transition counts by height class (positive / zero / negative)
  std::array<std::vector<int64_t>, 3> counts;
  for (auto& c : counts) c.assign(static_cast<size_t>(deg), 0);
  int64_t accepted = 0, attempts = 0;

  Rng rng(ctx.seed, 0xC01D);
  std::vector<uint8_t> dirs;
  std::vector<int64_t> heights;
  while (accepted < target_accepted) {
    ++attempts;
    dirs.clear();
    heights.clear();
    CylinderStepper st(wc, wc.start);
    int64_t visits = 1;  // skeleton starts on the target level
    int64_t last = 0, s_time = -1;
    heights.push_back(0);
    for (int64_t n = 1; n <= horizon; ++n) {
      int d = st.step(rng);
      dirs.push_back(static_cast<uint8_t>(d));
      int64_t h = st.height();
      heights.push_back(h);
      if (h != last) {
        last = h;
        if (h == 0 && ++visits >= threshold) {
          s_time = n;
          break;
        }
      }
    }
    if (s_time < 0) continue;
    ++accepted;
    for (int64_t n = 0; n < s_time; ++n) {
      int cls = heights[static_cast<size_t>(n)] > 0 ? 0 : (heights[static_cast<size_t>(n)] == 0 ? 1 : 2);
      ++counts[static_cast<size_t>(cls)][dirs[static_cast<size_t>(n)]];
    }
  }

  auto csv = ctx.open_csv(
      "conditioned_check.csv",
      "config_hash,height_class,direction,observed_freq,se,conditioned_kernel,z_score");
  const char* cls_names[3] = {"positive", "zero", "negative"};
  Site probe;
  double max_abs_z = 0.0;
  for (int cls = 0; cls < 3; ++cls) {
    probe.height = cls == 0 ? 1 : (cls == 1 ? 0 : -1);
    auto kernel = conditioned_step_kernel(wc, probe, Phase::BeforeRecord);
    int64_t total = 0;
    for (int64_t c : counts[static_cast<size_t>(cls)]) total += c;
    for (int d = 0; d < deg; ++d) {
      double freq = total > 0 ? static_cast<double>(counts[static_cast<size_t>(cls)][d]) / total : 0.0;
      double se = total > 0 ? binom_se(freq, total) : 0.0;
      double z = se > 0 ? (freq - kernel[static_cast<size_t>(d)]) / se : 0.0;
      max_abs_z = std::max(max_abs_z, std::fabs(z));
      csv << ctx.cfg_hash << "," << cls_names[cls] << "," << d << "," << freq << "," << se << ","
          << kernel[static_cast<size_t>(d)] << "," << z << "\n";
    }
  }
  ctx.write_meta({{"accepted", accepted},
                  {"attempts", attempts},
                  {"acceptance_rate", static_cast<double>(accepted) / attempts},
                  {"max_abs_z", max_abs_z}});
  return accepted == 0 ? kExitHorizon : kExitOk;
}

json default_config(const std::string& experiment) {
  json cfg;
  cfg["experiment"] = experiment;
  cfg["seed"] = 1;
  cfg["replicas"] = 8;
  cfg["workers"] = 1;
  if (experiment == "disconnect") {
    cfg["geometry"] = {{"n", 6}, {"d", 2}};
    cfg["drift"] = {{"delta", 0.0}};
    cfg["horizon"] = 50000000;
  } else if (experiment == "record-times") {
    cfg["geometry"] = {{"n", 6}, {"d", 2}};
    cfg["drift"] = {{"delta", 0.0}};
    cfg["u"] = 1.0;
    cfg["horizon"] = 50000000;
  } else if (experiment == "zeta") {
    cfg["u_list"] = {1.0};
    cfg["theta_grid"] = {0.5, 1.0, 2.0};
    cfg["t_grid"] = {0.05, 0.1, 0.2, 0.3, 0.5, 1.0};
  } else if (experiment == "potential") {
    cfg["capacity"] = {{"box_sides", {4, 8}}, {"r_esc", 60}, {"walks_per_site", 400}};
    cfg["green"] = {{"r_esc", 60}, {"walks", 50000}};
  } else if (experiment == "interlacements") {
    cfg["clouds"] = {{"u", 1.0}, {"d_radius", 2}, {"u_radius", 6}, {"count", 100}};
  } else if (experiment == "slt") {
    cfg["delta"] = 0.05;
    cfg["eta"] = 0.3;
    cfg["lambda"] = 1.0;
    cfg["scales"] = {50.0, 100.0, 200.0};
    cfg["runs"] = 300;
  } else if (experiment == "conditioned-check") {
    cfg["geometry"] = {{"n", 3}, {"d", 2}};
    cfg["drift"] = {{"delta", 0.3}};
    cfg["threshold"] = 2;
    cfg["accepted_target"] = 50000;
    cfg["horizon"] = 20000;
  }
  return cfg;
}

void apply_override(json& cfg, const std::string& kv) {
  auto eq = kv.find('=');
  if (eq == std::string::npos) throw std::invalid_argument("override must be key=value: " + kv);
  std::string key = kv.substr(0, eq);
  std::string val = kv.substr(eq + 1);
  json parsed;
  try {
    parsed = json::parse(val);
  } catch (...) {
    parsed = val;  // plain string
  }
  // dotted path into nested objects
  json* node = &cfg;
  size_t pos = 0;
  while (true) {
    size_t dot = key.find('.', pos);
    std::string part = key.substr(pos, dot == std::string::npos ? std::string::npos : dot - pos);
    if (dot == std::string::npos) {
      (*node)[part] = parsed;
      break;
    }
    node = &(*node)[part];
    pos = dot + 1;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo laboratory for cylinder disconnection, record times, and "
               "random interlacements"};
  app.require_subcommand(1);

  std::string config_path, out_dir;
  std::vector<std::string> overrides;
  std::optional<uint64_t> seed_flag;
  std::optional<int64_t> replicas_flag;
  std::optional<int> workers_flag;

  const std::vector<std::string> names = {"disconnect",      "record-times", "zeta",
                                          "potential",       "interlacements", "slt",
                                          "conditioned-check"};
  for (const auto& name : names) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--set", overrides, "override config keys (dotted.path=value)");
    sub->add_option("--out", out_dir, "output directory (default $DLAB_OUT or .)");
    sub->add_option("--seed", seed_flag, "RNG seed");
    sub->add_option("--replicas", replicas_flag, "replica count");
    sub->add_option("--workers", workers_flag, "worker threads");
  }

  CLI11_PARSE(app, argc, argv);
  const std::string experiment = app.get_subcommands().front()->get_name();

  RunContext ctx;
  try {
    ctx.cfg = default_config(experiment);
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) throw std::runtime_error("cannot open config file: " + config_path);
      json file_cfg = json::parse(f);
      ctx.cfg.merge_patch(file_cfg);
    }
    for (const auto& kv : overrides) apply_override(ctx.cfg, kv);
    if (seed_flag) ctx.cfg["seed"] = *seed_flag;
    if (replicas_flag) ctx.cfg["replicas"] = *replicas_flag;
    if (workers_flag) ctx.cfg["workers"] = *workers_flag;

    ctx.experiment = experiment;
    ctx.seed = ctx.cfg.value("seed", uint64_t{1});
    ctx.replicas = ctx.cfg.value("replicas", int64_t{1});
    ctx.workers = std::max(1, ctx.cfg.value("workers", 1));
    if (ctx.replicas < 0) throw std::invalid_argument("replicas must be >= 0");

    std::string dir = !out_dir.empty() ? out_dir
                      : ctx.cfg.contains("out_dir") ? ctx.cfg["out_dir"].get<std::string>()
                      : std::getenv("DLAB_OUT") ? std::getenv("DLAB_OUT")
                                                : ".";
    ctx.out_dir = dir;
    ctx.cfg_hash = hex64(fnv1a64(ctx.cfg.dump()));
  } catch (const std::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    if (experiment == "disconnect") return cmd_disconnect(ctx);
    if (experiment == "record-times") return cmd_record_times(ctx);
    if (experiment == "zeta") return cmd_zeta(ctx);
    if (experiment == "potential") return cmd_potential(ctx);
    if (experiment == "interlacements") return cmd_interlacements(ctx);
    if (experiment == "slt") return cmd_slt(ctx);
    if (experiment == "conditioned-check") return cmd_conditioned_check(ctx);
  } catch (const std::invalid_argument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitConfig;
}
