#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace gff {

struct Site {
  int x = 0;
  int y = 0;
  friend auto operator<=>(const Site&, const Site&) = default;
};

enum class Shape { unit_square, disc, annulus };

// Planar domain with an analytic sup-norm distance to its complement.
struct DomainSpec {
  Shape shape = Shape::unit_square;
  double cx = 0.0;
  double cy = 0.0;
  double radius = 0.0;   // disc
  double r_in = 0.0;     // annulus
  double r_out = 0.0;    // annulus

  static DomainSpec unit_square();
  static DomainSpec disc(double cx, double cy, double radius);
  static DomainSpec annulus(double cx, double cy, double r_in, double r_out);

  // Throws ValidationError when radii violate the shape constraints.
  void validate() const;

  // Exact sup-norm distance from p to the closed complement of the domain;
  // 0 when p lies outside. No boundary discretization is involved.
  double dist_inf_to_complement(double px, double py) const;

  double area() const;
  std::string describe() const;
};

// Finite subset of Z^2 with neighbor structure. neighbor slot -1 means the
// step leaves the lattice (the walk dies there).
struct Lattice {
  int N = 0;
  std::vector<Site> sites;                        // lexicographic order
  std::vector<std::array<int, 4>> neighbor_slots; // -x, +x, -y, +y
  std::vector<int> degree_out;

  std::size_t size() const { return sites.size(); }
  bool empty() const { return sites.empty(); }

  // Dense index of a site, or -1 when the site is not in the lattice.
  int index_of(Site s) const;

  std::vector<int> neighbors_of(int index) const;
};

// Sites x with dist_inf(x/N, complement of D) > 1/N, in lexicographic order.
Lattice build_lattice(const DomainSpec& spec, int N);

// Fixture factory: wraps an explicit site list (sorted, deduplicated) with
// the same neighbor bookkeeping as build_lattice.
Lattice lattice_from_sites(std::vector<Site> sites, int N);

struct SubsetMask {
  std::vector<std::uint8_t> bits; // one per lattice index
  double threshold = 0.0;         // distance threshold, when applicable
  int box_side = 0;               // box side, when applicable

  std::size_t count() const;
  bool contains(std::size_t index) const { return bits[index] != 0; }
};

// Sites whose Euclidean distance to the site-complement of the lattice is
// strictly greater than N^(1-delta). Distances are exact: the nearest
// complement point is always 4-adjacent to the lattice, so scanning those
// candidates with integer squared distances suffices.
SubsetMask interior_mask(const Lattice& lat, double delta);

// Same selection with an explicit distance threshold.
SubsetMask interior_mask_by_threshold(const Lattice& lat, double threshold);

// Disjoint cover of the lattice by grid cells of the given side anchored at
// the origin of Z^2; only non-empty cells are returned, in lexicographic
// order of cell coordinates.
std::vector<SubsetMask> box_partition(const Lattice& lat, int side);

// CSV dump with columns index,x,y,degree_out.
std::string lattice_to_csv(const Lattice& lat);

}  // namespace gff
