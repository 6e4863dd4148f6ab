#include "dlab/lattice.hpp"

#include <sstream>
#include <stdexcept>

namespace dlab {

void Geometry::validate() const {
  if (n < 1) throw std::invalid_argument("geometry: side length must be >= 1");
  if (dim < 2 || dim > kMaxTorusDim) throw std::invalid_argument("geometry: torus dimension out of range");
}

int Geometry::degree() const {
  if (adjacency == Adjacency::L1) return 2 * (dim + 1);
  int deg = 1;
  for (int i = 0; i < dim + 1; ++i) deg *= 3;
  return deg - 1;
}

bool site_valid(const Geometry& g, const Site& s) {
  if (g.space == Space::FullLattice) return true;
  for (int i = 0; i < g.dim; ++i)
    if (s.torus[i] < 0 || s.torus[i] >= g.n) return false;
  return true;
}

bool site_equal(const Geometry& g, const Site& a, const Site& b) {
  if (a.height != b.height) return false;
  for (int i = 0; i < g.dim; ++i)
    if (a.torus[i] != b.torus[i]) return false;
  return true;
}

namespace {

Site offset_site(const Geometry& g, const Site& s, const std::array<int, kMaxTorusDim + 1>& off) {
  Site t = s;
  for (int i = 0; i < g.dim; ++i) {
    int32_t x = s.torus[i] + off[i];
    t.torus[i] = g.space == Space::Cylinder ? wrap_coord(x, g.n) : x;
  }
  t.height = s.height + off[g.dim];
  return t;
}

}  // namespace

std::vector<Site> neighbors(const Geometry& g, const Site& s) {
  if (!site_valid(g, s)) throw std::invalid_argument("neighbors: invalid site");
  std::vector<Site> out;
  out.reserve(g.degree());
  std::array<int, kMaxTorusDim + 1> off{};
  // unit directions first
  for (int i = 0; i <= g.dim; ++i) {
    off.fill(0);
    off[i] = 1;
    out.push_back(offset_site(g, s, off));
    off[i] = -1;
    out.push_back(offset_site(g, s, off));
  }
  if (g.adjacency == Adjacency::Linf) {
    // remaining {-1,0,1}^{d+1} offsets, lexicographic
    const int m = g.dim + 1;
    std::array<int, kMaxTorusDim + 1> v{};
    v.fill(-1);
    while (true) {
      int nonzero = 0, axis = -1;
      for (int i = 0; i < m; ++i)
        if (v[i] != 0) { ++nonzero; axis = i; }
      (void)axis;
      if (nonzero >= 2) {
        off.fill(0);
        for (int i = 0; i < m; ++i) off[i] = v[i];
        out.push_back(offset_site(g, s, off));
      }
      int i = m - 1;
      while (i >= 0 && v[i] == 1) { v[i] = -1; --i; }
      if (i < 0) break;
      ++v[i];
    }
  }
  return out;
}

std::string to_string(const Geometry& g, const Site& s) {
  std::ostringstream os;
  os << "(";
  for (int i = 0; i < g.dim; ++i) os << s.torus[i] << ",";
  os << s.height << ")";
  return os.str();
}

}  // namespace dlab
