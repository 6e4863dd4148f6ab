#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dlab {

// Geometry of the state spaces: a cylinder (torus)^d x Z, or the full
// lattice Z^{d+1}. Two adjacency relations are used: walks step along
// L1 edges (2d+2 neighbors), complement connectivity defaults to Linf
// (3^{d+1}-1 neighbors).
enum class Space { Cylinder, FullLattice };
enum class Adjacency { L1, Linf };

constexpr int kMaxTorusDim = 6;

struct Geometry {
  int n = 1;          // torus side length
  int dim = 2;        // number of torus coordinates d
  Space space = Space::Cylinder;
  Adjacency adjacency = Adjacency::L1;

  void validate() const;
  int degree() const;
};

// A point of the cylinder: d torus coordinates (canonical, in [0,n))
// plus an unbounded height. Heights are never wrapped.
struct Site {
  std::array<int32_t, kMaxTorusDim> torus{};
  int64_t height = 0;

  static Site origin() { return Site{}; }
};

bool site_equal(const Geometry& g, const Site& a, const Site& b);
bool site_valid(const Geometry& g, const Site& s);

// All sites at the configured adjacency distance 1, in canonical order:
// +e1, -e1, ..., +e_{d+1}, -e_{d+1}, then (Linf only) the remaining
// diagonal offsets lexicographically. Torus coordinates wrap mod n.
std::vector<Site> neighbors(const Geometry& g, const Site& s);

// The two canonical projections.
inline std::pair<std::array<int32_t, kMaxTorusDim>, int64_t> project(const Site& s) {
  return {s.torus, s.height};
}

inline int32_t wrap_coord(int32_t x, int n) {
  int32_t r = x % n;
  return r < 0 ? r + n : r;
}

std::string to_string(const Geometry& g, const Site& s);

}  // namespace dlab
