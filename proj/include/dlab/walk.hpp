#pragma once

#include <cstdint>
#include <vector>

#include "dlab/lattice.hpp"
#include "dlab/rng.hpp"

namespace dlab {

// Drift parameterization: either an explicit delta in [0,1) or the
// exponent alpha with delta = n^{-d*alpha} (alpha = inf means delta = 0).
double delta_from_alpha(double alpha, int n, int dim);

enum class StartKind { Point, UniformLevel };

struct WalkConfig {
  Geometry geom;
  double delta = 0.0;
  StartKind start_kind = StartKind::Point;
  Site start;             // for StartKind::Point
  int64_t start_level = 0;  // for StartKind::UniformLevel
  uint64_t seed = 0;

  void validate() const;
};

Site sample_start(const WalkConfig& cfg, Rng& rng);

// Transition probabilities over the 2d+2 unit moves, in the canonical
// direction order (+e1, -e1, ..., +e_{d+1}, -e_{d+1}). The vertical
// pair is the last one: index 2d is up, 2d+1 is down. Lateral moves get
// 1/(2d+2), up gets (1+delta)/(2d+2), down gets (1-delta)/(2d+2).
std::vector<double> step_kernel(const WalkConfig& cfg, const Site& from);

// Kernel of the walk conditioned to keep revisiting a target level:
// before the record time the drift points toward level 0 (uniform on
// level 0 itself), afterwards the walk reverts to step_kernel.
enum class Phase { BeforeRecord, AfterRecord };
std::vector<double> conditioned_step_kernel(const WalkConfig& cfg, const Site& from, Phase phase);

struct PathSample {
  Geometry geom;
  Site start;
  std::vector<uint8_t> dirs;  // direction indices into the kernel order

  std::vector<Site> sites() const;
};

struct StepStats {
  int64_t length = 0;
  int64_t up = 0;
  int64_t down = 0;
  int64_t height() const { return std::abs(up - down); }
};

StepStats step_stats(const PathSample& path);

PathSample sample_path(const WalkConfig& cfg, int64_t n_steps, Rng& rng);

// log of p_bias(e)/p(e) = up*log(1+delta) + down*log(1-delta).
double rn_log_ratio(const StepStats& s, double delta);

// Bracket (log domain): lower = (l/2)log(1-delta^2) + (h/2)log((1-d)/(1+d)),
// upper = (h/2)log((1+d)/(1-d)).
struct LogBracket {
  double lo = 0.0, hi = 0.0;
};
LogBracket rn_log_bracket(const StepStats& s, double delta);

// 1D biased walk: steps +-1 with probabilities (1 +- delta)/2.
std::vector<int64_t> sample_1d(double delta, int64_t start, int64_t n_steps, Rng& rng);

// Incremental samplers for long simulations.
class CylinderStepper {
 public:
  CylinderStepper(const WalkConfig& cfg, const Site& start);

  // advances one step, returns the direction index taken
  int step(Rng& rng);
  const Site& site() const { return site_; }
  int64_t height() const { return site_.height; }

 private:
  Geometry geom_;
  double cum_[2 * (kMaxTorusDim + 1)];
  int degree_;
  Site site_;
};

class OneDStepper {
 public:
  OneDStepper(double delta, int64_t start)
      : p_up_((1.0 + delta) / 2.0), symmetric_(delta == 0.0), pos_(start) {}

  void step(Rng& rng) {
    if (symmetric_) {
      // one random word feeds 64 steps
      if (left_ == 0) {
        bits_ = rng.next_u64();
        left_ = 64;
      }
      pos_ += (bits_ & 1) ? 1 : -1;
      bits_ >>= 1;
      --left_;
    } else {
      pos_ += rng.next_double() < p_up_ ? 1 : -1;
    }
  }
  int64_t pos() const { return pos_; }

 private:
  double p_up_;
  bool symmetric_;
  int64_t pos_;
  uint64_t bits_ = 0;
  int left_ = 0;
};

}  // namespace dlab
