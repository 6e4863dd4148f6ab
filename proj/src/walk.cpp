#include "dlab/walk.hpp"

#include <cmath>
#include <stdexcept>

namespace dlab {

double delta_from_alpha(double alpha, int n, int dim) {
  if (std::isinf(alpha)) return 0.0;
  if (alpha <= 0.0) throw std::invalid_argument("alpha must be positive (or inf)");
  return std::pow(static_cast<double>(n), -static_cast<double>(dim) * alpha);
}

void WalkConfig::validate() const {
  geom.validate();
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("drift delta must lie in [0,1)");
}

Site sample_start(const WalkConfig& cfg, Rng& rng) {
  if (cfg.start_kind == StartKind::Point) return cfg.start;
  Site s;
  for (int i = 0; i < cfg.geom.dim; ++i)
    s.torus[i] = static_cast<int32_t>(rng.next_below(static_cast<uint64_t>(cfg.geom.n)));
  s.height = cfg.start_level;
  return s;
}

namespace {

std::vector<double> kernel_with_drift(int dim, double delta) {
  const int deg = 2 * (dim + 1);
  std::vector<double> p(deg, 1.0 / deg);
  p[2 * dim] = (1.0 + delta) / deg;      // up
  p[2 * dim + 1] = (1.0 - delta) / deg;  // down
  return p;
}

}  // namespace

std::vector<double> step_kernel(const WalkConfig& cfg, const Site& from) {
  cfg.validate();
  if (!site_valid(cfg.geom, from)) throw std::invalid_argument("step_kernel: invalid site");
  return kernel_with_drift(cfg.geom.dim, cfg.delta);
}

std::vector<double> conditioned_step_kernel(const WalkConfig& cfg, const Site& from, Phase phase) {
  cfg.validate();
  if (!site_valid(cfg.geom, from)) throw std::invalid_argument("conditioned_step_kernel: invalid site");
  if (phase == Phase::AfterRecord) return kernel_with_drift(cfg.geom.dim, cfg.delta);
  if (from.height > 0) return kernel_with_drift(cfg.geom.dim, -cfg.delta);
  if (from.height < 0) return kernel_with_drift(cfg.geom.dim, cfg.delta);
  return kernel_with_drift(cfg.geom.dim, 0.0);
}

std::vector<Site> PathSample::sites() const {
  std::vector<Site> out;
  out.reserve(dirs.size() + 1);
  Site cur = start;
  out.push_back(cur);
  for (uint8_t d : dirs) {
    int axis = d / 2;
    int sign = (d % 2 == 0) ? 1 : -1;
    if (axis == geom.dim) {
      cur.height += sign;
    } else {
      int32_t x = cur.torus[axis] + sign;
      cur.torus[axis] = geom.space == Space::Cylinder ? wrap_coord(x, geom.n) : x;
    }
    out.push_back(cur);
  }
  return out;
}

StepStats step_stats(const PathSample& path) {
  StepStats s;
  s.length = static_cast<int64_t>(path.dirs.size());
  const uint8_t up_dir = static_cast<uint8_t>(2 * path.geom.dim);
  const uint8_t down_dir = up_dir + 1;
  for (uint8_t d : path.dirs) {
    if (d == up_dir) ++s.up;
    else if (d == down_dir) ++s.down;
  }
  return s;
}

PathSample sample_path(const WalkConfig& cfg, int64_t n_steps, Rng& rng) {
  cfg.validate();
  if (n_steps < 0) throw std::invalid_argument("sample_path: n_steps must be >= 0");
  PathSample p;
  p.geom = cfg.geom;
  p.start = sample_start(cfg, rng);
  p.dirs.reserve(static_cast<size_t>(n_steps));
  CylinderStepper stepper(cfg, p.start);
  for (int64_t i = 0; i < n_steps; ++i)
    p.dirs.push_back(static_cast<uint8_t>(stepper.step(rng)));
  return p;
}

double rn_log_ratio(const StepStats& s, double delta) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  return static_cast<double>(s.up) * std::log1p(delta) +
         static_cast<double>(s.down) * std::log1p(-delta);
}

LogBracket rn_log_bracket(const StepStats& s, double delta) {
  LogBracket b;
  const double l = static_cast<double>(s.length);
  const double h = static_cast<double>(s.height());
  b.lo = 0.5 * l * std::log1p(-delta * delta) +
         0.5 * h * (std::log1p(-delta) - std::log1p(delta));
  b.hi = 0.5 * h * (std::log1p(delta) - std::log1p(-delta));
  return b;
}

std::vector<int64_t> sample_1d(double delta, int64_t start, int64_t n_steps, Rng& rng) {
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  std::vector<int64_t> w;
  w.reserve(static_cast<size_t>(n_steps) + 1);
  OneDStepper st(delta, start);
  w.push_back(st.pos());
  for (int64_t i = 0; i < n_steps; ++i) {
    st.step(rng);
    w.push_back(st.pos());
  }
  return w;
}

CylinderStepper::CylinderStepper(const WalkConfig& cfg, const Site& start)
    : geom_(cfg.geom), site_(start) {
  cfg.validate();
  auto p = kernel_with_drift(geom_.dim, cfg.delta);
  degree_ = static_cast<int>(p.size());
  double acc = 0.0;
  for (int i = 0; i < degree_; ++i) {
    acc += p[i];
    cum_[i] = acc;
  }
  cum_[degree_ - 1] = 1.0;  // guard against rounding
}

int CylinderStepper::step(Rng& rng) {
  const double u = rng.next_double();
  int d = 0;
  while (u >= cum_[d]) ++d;
  int axis = d / 2;
  int sign = (d % 2 == 0) ? 1 : -1;
  if (axis == geom_.dim) {
    site_.height += sign;
  } else {
    int32_t x = site_.torus[axis] + sign;
    site_.torus[axis] = geom_.space == Space::Cylinder ? wrap_coord(x, geom_.n) : x;
  }
  return d;
}

}  // namespace dlab
