#pragma once

#include <Eigen/Dense>
#include <cstddef>
#include <vector>

#include "gff/lattice.hpp"
#include "gff/rng.hpp"

namespace gff {

inline constexpr std::size_t k_default_dense_cap = 5000;

// Killed-walk Green function G = (I - P)^-1 on the lattice, dense.
struct GreenMatrix {
  Lattice lattice;
  Eigen::MatrixXd G;
  double max_diag = 0.0;
  int argmax_diag = 0;

  std::size_t size() const { return lattice.size(); }
};

struct CholFactor {
  Eigen::MatrixXd L;  // lower triangular, L L^T = G (+ jitter I when needed)
  double jitter = 0.0;

  std::size_t size() const { return static_cast<std::size_t>(L.rows()); }
};

// Dense solve of (I - P) G = I, column blocks through one factorization.
// Throws ResourceCapError when |sites| exceeds dense_cap; the message states
// the cap and the 8*|sites|^2 byte footprint.
GreenMatrix green_exact(const Lattice& lat, std::size_t dense_cap = k_default_dense_cap);

struct GreenMcRow {
  std::vector<double> mean;
  std::vector<double> se;
  long long walks = 0;
};

// Monte Carlo estimate of the row G(x, .) by direct walk simulation. Each
// walk contributes its per-site visit counts; a 1e7-step cap per walk guards
// against bugs (exit is a.s. finite).
GreenMcRow green_mc(const Lattice& lat, Site x, long long walks, RngStream& rng);

// q_N(x, y) = G(x, y) / max_diag, clamped to [0, 1].
double overlap(const GreenMatrix& G, Site x, Site y);
double overlap_by_index(const GreenMatrix& G, int i, int j);

// LLT factor for sampling; one round of diagonal jitter 1e-10 * max_diag is
// applied and recorded if the first factorization fails.
CholFactor cholesky(const GreenMatrix& G);

}  // namespace gff
