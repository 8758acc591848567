#pragma once

#include <cstdint>
#include <vector>

#include "gff/greens.hpp"
#include "gff/lattice.hpp"
#include "gff/rng.hpp"

namespace gff {

enum class FieldModel { dgff, rem };

struct FieldSample {
  std::vector<double> h;
  FieldModel model = FieldModel::dgff;
  int N = 0;                    // lattice scale, drives log N^2 statistics
  std::uint64_t stream_key = 0; // provenance
};

// h = L z with z iid standard normal.
FieldSample sample_dgff(const CholFactor& chol, int N, RngStream& rng);

// iid N(0, max_diag) energies on n_sites sites.
FieldSample sample_rem(std::size_t n_sites, int N, double max_diag, RngStream& rng);

// Batched DGFF sampler: column j of the result is the field drawn from the
// stream (master, tag, j). Matches sample_dgff draw-for-draw per column.
Eigen::MatrixXd sample_dgff_block(const CholFactor& chol, std::size_t count,
                                  std::uint64_t master_seed, const char* tag);

struct GibbsWeights {
  double beta = 0.0;
  std::vector<double> log_w;  // beta * h
  double log_z = 0.0;

  std::vector<double> probabilities() const;
  // Cumulative probabilities for repeated site draws.
  std::vector<double> cumulative() const;
};

GibbsWeights gibbs(const FieldSample& field, double beta);

// Draws a site index from the Gibbs measure given its cumulative table.
int sample_site(const std::vector<double>& cumulative, RngStream& rng);

// log Z_{beta,N} / log N^2. Needs at least two sites and N >= 2.
double free_energy(const FieldSample& field, double beta);

struct HighPointsReport {
  long long count = 0;
  double threshold = 0.0;
  double exponent = 0.0;  // log(count)/log N^2, -inf sentinel when count = 0
};

// Sites with h >= lambda * sqrt(g) * log N^2.
HighPointsReport high_points(const FieldSample& field, double lambda);

struct ExtremalStats {
  double max_value = 0.0;
  double m_n = 0.0;
  double recentered_max = 0.0;
  std::vector<int> local_maxima;  // indices of r-local maxima, ascending
};

// r-local maxima in the Euclidean ball of radius r; on ties only the
// lexicographically smallest site in the tied cluster is reported.
ExtremalStats extremal_stats(const FieldSample& field, const Lattice& lat, int r);

}  // namespace gff
