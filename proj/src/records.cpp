#include "dlab/records.hpp"

#include <cmath>
#include <stdexcept>

namespace dlab {

namespace {

int64_t guarded_ceil(double x) {
  if (x <= 0.0) throw std::invalid_argument("visit threshold must be positive");
  double fuzz = 1e-9 * std::max(1.0, std::fabs(x));
  return static_cast<int64_t>(std::ceil(x - fuzz));
}

}  // namespace

int64_t cylinder_visit_threshold(double u, int n, int dim) {
  double t = u * std::pow(static_cast<double>(n), dim) / static_cast<double>(dim + 1);
  return guarded_ceil(t);
}

int64_t one_d_visit_threshold(double u, int64_t n) {
  return guarded_ceil(u * static_cast<double>(n));
}

RecordResult cylinder_record(const WalkConfig& cfg, double u,
                             std::optional<int64_t> target_level, int64_t horizon, Rng& rng) {
  cfg.validate();
  if (u <= 0.0) throw std::invalid_argument("record level u must be positive");
  Site start = sample_start(cfg, rng);
  CylinderStepper stepper(cfg, start);
  RecordOptions opt;
  opt.threshold = cylinder_visit_threshold(u, cfg.geom.n, cfg.geom.dim);
  opt.target_level = target_level;
  opt.horizon = horizon;
  return scan_record([&] { stepper.step(rng); return stepper.height(); }, start.height, opt);
}

RecordResult one_d_record(double u, int64_t n, double delta, Rng& rng, int64_t horizon,
                          const std::unordered_set<int64_t>* level_grid) {
  if (u <= 0.0 || n < 1) throw std::invalid_argument("one_d_record: need u > 0 and n >= 1");
  OneDStepper st(delta, 0);
  RecordOptions opt;
  opt.threshold = one_d_visit_threshold(u, n);
  opt.horizon = horizon;
  opt.level_grid = level_grid;
  return scan_record([&] { st.step(rng); return st.pos(); }, 0, opt);
}

std::unordered_set<int64_t> truncated_level_grid(int64_t n, int64_t big_l) {
  std::unordered_set<int64_t> grid;
  for (int64_t l = -big_l * big_l; l <= big_l * big_l; ++l)
    grid.insert(static_cast<int64_t>(std::floor(static_cast<double>(l) * static_cast<double>(n) /
                                                static_cast<double>(big_l))));
  return grid;
}

}  // namespace dlab
