#include "gff/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

#include "gff/constants.hpp"
#include "gff/errors.hpp"

namespace gff {

DomainSpec DomainSpec::unit_square() {
  DomainSpec d;
  d.shape = Shape::unit_square;
  return d;
}

DomainSpec DomainSpec::disc(double cx, double cy, double radius) {
  DomainSpec d;
  d.shape = Shape::disc;
  d.cx = cx;
  d.cy = cy;
  d.radius = radius;
  return d;
}

DomainSpec DomainSpec::annulus(double cx, double cy, double r_in, double r_out) {
  DomainSpec d;
  d.shape = Shape::annulus;
  d.cx = cx;
  d.cy = cy;
  d.r_in = r_in;
  d.r_out = r_out;
  return d;
}

void DomainSpec::validate() const {
  switch (shape) {
    case Shape::unit_square:
      return;
    case Shape::disc:
      if (!(radius > 0.0)) throw ValidationError("domain: disc radius must be > 0");
      return;
    case Shape::annulus:
      if (!(r_in > 0.0 && r_in < r_out)) {
        throw ValidationError("domain: annulus requires 0 < r_in < r_out");
      }
      return;
  }
  throw ValidationError("domain: unknown shape");
}

namespace {

// Largest t such that the sup-norm ball of radius t around (dx,dy)-offset
// point stays inside the disc of radius r around the origin: the far corner
// satisfies (|dx|+t)^2 + (|dy|+t)^2 <= r^2.
double disc_margin(double dx, double dy, double r) {
  const double ax = std::fabs(dx), ay = std::fabs(dy);
  const double d2 = ax * ax + ay * ay;
  if (d2 >= r * r) return 0.0;
  const double s = ax + ay;
  const double t = 0.5 * (-s + std::sqrt(s * s + 2.0 * (r * r - d2)));
  return std::max(t, 0.0);
}

// Largest t such that the sup-norm ball of radius t around the offset point
// avoids the closed disc of radius r around the origin. The near point of
// the ball sits at per-axis distance max(|d|-t, 0) from the center.
double avoid_disc_margin(double dx, double dy, double r) {
  double a = std::fabs(dx), b = std::fabs(dy);
  if (a < b) std::swap(a, b);
  if (a * a + b * b <= r * r) return 0.0;
  if (a - r >= b) return a - r;
  const double disc = 2.0 * r * r - (a - b) * (a - b);
  return 0.5 * (a + b - std::sqrt(disc));
}

}  // namespace

double DomainSpec::dist_inf_to_complement(double px, double py) const {
  switch (shape) {
    case Shape::unit_square: {
      const double m = std::min(std::min(px, 1.0 - px), std::min(py, 1.0 - py));
      return std::max(m, 0.0);
    }
    case Shape::disc:
      return disc_margin(px - cx, py - cy, radius);
    case Shape::annulus: {
      const double outer = disc_margin(px - cx, py - cy, r_out);
      const double inner = avoid_disc_margin(px - cx, py - cy, r_in);
      return std::min(outer, inner);
    }
  }
  return 0.0;
}

double DomainSpec::area() const {
  switch (shape) {
    case Shape::unit_square:
      return 1.0;
    case Shape::disc:
      return k_pi * radius * radius;
    case Shape::annulus:
      return k_pi * (r_out * r_out - r_in * r_in);
  }
  return 0.0;
}

std::string DomainSpec::describe() const {
  char buf[160];
  switch (shape) {
    case Shape::unit_square:
      return "unit-square";
    case Shape::disc:
      std::snprintf(buf, sizeof(buf), "disc(center=(%g,%g), radius=%g)", cx, cy, radius);
      return buf;
    case Shape::annulus:
      std::snprintf(buf, sizeof(buf), "annulus(center=(%g,%g), r_in=%g, r_out=%g)", cx, cy,
                    r_in, r_out);
      return buf;
  }
  return "unknown";
}

int Lattice::index_of(Site s) const {
  auto it = std::lower_bound(sites.begin(), sites.end(), s);
  if (it == sites.end() || *it != s) return -1;
  return static_cast<int>(it - sites.begin());
}

std::vector<int> Lattice::neighbors_of(int index) const {
  std::vector<int> out;
  for (int j : neighbor_slots[static_cast<std::size_t>(index)]) {
    if (j >= 0) out.push_back(j);
  }
  return out;
}

namespace {

void fill_neighbors(Lattice& lat) {
  const std::size_t n = lat.sites.size();
  lat.neighbor_slots.assign(n, {-1, -1, -1, -1});
  lat.degree_out.assign(n, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const Site s = lat.sites[i];
    const Site steps[4] = {{s.x - 1, s.y}, {s.x + 1, s.y}, {s.x, s.y - 1}, {s.x, s.y + 1}};
    int out = 0;
    for (int k = 0; k < 4; ++k) {
      const int j = lat.index_of(steps[k]);
      lat.neighbor_slots[i][static_cast<std::size_t>(k)] = j;
      if (j < 0) ++out;
    }
    lat.degree_out[i] = out;
  }
}

}  // namespace

Lattice build_lattice(const DomainSpec& spec, int N) {
  spec.validate();
  if (N < 1) throw ValidationError("build_lattice: N must be >= 1");
  // Bounding box of the domain in lattice units, padded by one.
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  if (spec.shape == Shape::disc) {
    lo_x = spec.cx - spec.radius;
    hi_x = spec.cx + spec.radius;
    lo_y = spec.cy - spec.radius;
    hi_y = spec.cy + spec.radius;
  } else if (spec.shape == Shape::annulus) {
    lo_x = spec.cx - spec.r_out;
    hi_x = spec.cx + spec.r_out;
    lo_y = spec.cy - spec.r_out;
    hi_y = spec.cy + spec.r_out;
  }
  const int x0 = static_cast<int>(std::floor(lo_x * N)) - 1;
  const int x1 = static_cast<int>(std::ceil(hi_x * N)) + 1;
  const int y0 = static_cast<int>(std::floor(lo_y * N)) - 1;
  const int y1 = static_cast<int>(std::ceil(hi_y * N)) + 1;

  Lattice lat;
  lat.N = N;
  const double margin = 1.0 / N;
  for (int x = x0; x <= x1; ++x) {
    for (int y = y0; y <= y1; ++y) {
      const double d = spec.dist_inf_to_complement(static_cast<double>(x) / N,
                                                   static_cast<double>(y) / N);
      if (d > margin) lat.sites.push_back({x, y});
    }
  }
  fill_neighbors(lat);
  return lat;
}

Lattice lattice_from_sites(std::vector<Site> sites, int N) {
  if (N < 1) throw ValidationError("lattice_from_sites: N must be >= 1");
  std::sort(sites.begin(), sites.end());
  sites.erase(std::unique(sites.begin(), sites.end()), sites.end());
  Lattice lat;
  lat.N = N;
  lat.sites = std::move(sites);
  fill_neighbors(lat);
  return lat;
}

std::size_t SubsetMask::count() const {
  std::size_t c = 0;
  for (std::uint8_t b : bits) c += (b != 0);
  return c;
}

SubsetMask interior_mask_by_threshold(const Lattice& lat, double threshold) {
  if (lat.empty()) throw ValidationError("interior_mask: lattice is empty");
  SubsetMask mask;
  mask.threshold = threshold;
  mask.bits.assign(lat.size(), 0);

  // Complement points 4-adjacent to the lattice. Any nearest complement
  // point can be walked toward the site along its dominant axis without
  // increasing the distance, so the minimum over this set is the true
  // distance to the complement.
  std::set<Site> cand_set;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Site s = lat.sites[i];
    const Site steps[4] = {{s.x - 1, s.y}, {s.x + 1, s.y}, {s.x, s.y - 1}, {s.x, s.y + 1}};
    for (int k = 0; k < 4; ++k) {
      if (lat.neighbor_slots[i][static_cast<std::size_t>(k)] < 0) cand_set.insert(steps[k]);
    }
  }
  const std::vector<Site> cands(cand_set.begin(), cand_set.end());

  const double thr2 = threshold * threshold;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Site s = lat.sites[i];
    long long best = std::numeric_limits<long long>::max();
    for (const Site& c : cands) {
      const long long dx = s.x - c.x, dy = s.y - c.y;
      best = std::min(best, dx * dx + dy * dy);
    }
    if (static_cast<double>(best) > thr2) mask.bits[i] = 1;
  }
  return mask;
}

SubsetMask interior_mask(const Lattice& lat, double delta) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw ValidationError("interior_mask: delta must lie in (0,1)");
  }
  return interior_mask_by_threshold(lat, std::pow(static_cast<double>(lat.N), 1.0 - delta));
}

namespace {
int floor_div(int a, int b) {
  int q = a / b, r = a % b;
  return (r != 0 && ((r < 0) != (b < 0))) ? q - 1 : q;
}
}  // namespace

std::vector<SubsetMask> box_partition(const Lattice& lat, int side) {
  if (side < 1) throw ValidationError("box_partition: side must be >= 1");
  std::set<Site> keys;
  for (const Site& s : lat.sites) {
    keys.insert({floor_div(s.x, side), floor_div(s.y, side)});
  }
  const std::vector<Site> ordered(keys.begin(), keys.end());
  std::vector<SubsetMask> out(ordered.size());
  for (SubsetMask& m : out) {
    m.box_side = side;
    m.bits.assign(lat.size(), 0);
  }
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Site s = lat.sites[i];
    const Site cell{floor_div(s.x, side), floor_div(s.y, side)};
    const auto it = std::lower_bound(ordered.begin(), ordered.end(), cell);
    out[static_cast<std::size_t>(it - ordered.begin())].bits[i] = 1;
  }
  return out;
}

std::string lattice_to_csv(const Lattice& lat) {
  std::string out = "# schema=1\nindex,x,y,degree_out\n";
  char buf[96];
  for (std::size_t i = 0; i < lat.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%zu,%d,%d,%d\n", i, lat.sites[i].x, lat.sites[i].y,
                  lat.degree_out[i]);
    out += buf;
  }
  return out;
}

}  // namespace gff
