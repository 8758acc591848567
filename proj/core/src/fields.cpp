#include "gff/fields.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gff/constants.hpp"
#include "gff/errors.hpp"
#include "gff/stats.hpp"

namespace gff {

FieldSample sample_dgff(const CholFactor& chol, int N, RngStream& rng) {
  const Eigen::Index n = chol.L.rows();
  Eigen::VectorXd z(n);
  for (Eigen::Index i = 0; i < n; ++i) z(i) = rng.normal();
  const Eigen::VectorXd h = chol.L.triangularView<Eigen::Lower>() * z;
  FieldSample f;
  f.model = FieldModel::dgff;
  f.N = N;
  f.stream_key = rng.key();
  f.h.assign(h.data(), h.data() + n);
  return f;
}

FieldSample sample_rem(std::size_t n_sites, int N, double max_diag, RngStream& rng) {
  if (!(max_diag > 0.0)) throw ValidationError("sample_rem: max_diag must be > 0");
  FieldSample f;
  f.model = FieldModel::rem;
  f.N = N;
  f.stream_key = rng.key();
  const double sd = std::sqrt(max_diag);
  f.h.resize(n_sites);
  for (double& v : f.h) v = sd * rng.normal();
  return f;
}

Eigen::MatrixXd sample_dgff_block(const CholFactor& chol, std::size_t count,
                                  std::uint64_t master_seed, const char* tag) {
  const Eigen::Index n = chol.L.rows();
  Eigen::MatrixXd out(n, static_cast<Eigen::Index>(count));
  Eigen::VectorXd z(n);
  // Column-at-a-time with the same triangular kernel as sample_dgff keeps the
  // two samplers bit-identical, not just equal in distribution.
  for (std::size_t j = 0; j < count; ++j) {
    RngStream s = RngStream::make(master_seed, tag, j);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = s.normal();
    out.col(static_cast<Eigen::Index>(j)) = chol.L.triangularView<Eigen::Lower>() * z;
  }
  return out;
}

std::vector<double> GibbsWeights::probabilities() const {
  std::vector<double> p(log_w.size());
  for (std::size_t i = 0; i < log_w.size(); ++i) p[i] = std::exp(log_w[i] - log_z);
  return p;
}

std::vector<double> GibbsWeights::cumulative() const {
  std::vector<double> c(log_w.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < log_w.size(); ++i) {
    acc += std::exp(log_w[i] - log_z);
    c[i] = acc;
  }
  if (!c.empty()) c.back() = 1.0;
  return c;
}

GibbsWeights gibbs(const FieldSample& field, double beta) {
  if (beta < 0.0) throw ValidationError("gibbs: beta must be >= 0");
  if (field.h.empty()) throw ValidationError("gibbs: empty field");
  GibbsWeights w;
  w.beta = beta;
  w.log_w.resize(field.h.size());
  for (std::size_t i = 0; i < field.h.size(); ++i) w.log_w[i] = beta * field.h[i];
  w.log_z = log_sum_exp(w.log_w);
  return w;
}

int sample_site(const std::vector<double>& cumulative, RngStream& rng) {
  const double u = rng.uniform01();
  const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  const std::size_t i = std::min(static_cast<std::size_t>(it - cumulative.begin()),
                                 cumulative.size() - 1);
  return static_cast<int>(i);
}

double free_energy(const FieldSample& field, double beta) {
  if (field.h.size() < 2 || field.N < 2) {
    throw ValidationError("free_energy: needs at least two sites and N >= 2");
  }
  const GibbsWeights w = gibbs(field, beta);
  return w.log_z / (2.0 * std::log(static_cast<double>(field.N)));
}

HighPointsReport high_points(const FieldSample& field, double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0)) {
    throw ValidationError("high_points: lambda must lie in (0, 1]");
  }
  if (field.h.empty()) throw ValidationError("high_points: empty field");
  HighPointsReport r;
  r.threshold = lambda * k_sqrt_g * 2.0 * std::log(static_cast<double>(field.N));
  for (double v : field.h) {
    if (v >= r.threshold) ++r.count;
  }
  r.exponent = r.count > 0
                   ? std::log(static_cast<double>(r.count)) /
                         (2.0 * std::log(static_cast<double>(field.N)))
                   : -std::numeric_limits<double>::infinity();
  return r;
}

ExtremalStats extremal_stats(const FieldSample& field, const Lattice& lat, int r) {
  if (r < 0) throw ValidationError("extremal_stats: r must be >= 0");
  if (field.h.size() != lat.size() || lat.empty()) {
    throw ValidationError("extremal_stats: field/lattice size mismatch or empty");
  }
  ExtremalStats out;
  out.max_value = *std::max_element(field.h.begin(), field.h.end());
  out.m_n = max_centering(field.N);
  out.recentered_max = out.max_value - out.m_n;

  const long long r2 = static_cast<long long>(r) * r;
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const Site s = lat.sites[i];
    const double hi = field.h[i];
    bool is_max = true;
    for (int dx = -r; dx <= r && is_max; ++dx) {
      for (int dy = -r; dy <= r && is_max; ++dy) {
        if (dx == 0 && dy == 0) continue;
        if (static_cast<long long>(dx) * dx + static_cast<long long>(dy) * dy > r2) continue;
        const int j = lat.index_of({s.x + dx, s.y + dy});
        if (j < 0) continue;
        const double hj = field.h[static_cast<std::size_t>(j)];
        if (hj > hi) is_max = false;
        // Tied values: only the lexicographically smallest site survives.
        if (hj == hi && j < static_cast<int>(i)) is_max = false;
      }
    }
    if (is_max) out.local_maxima.push_back(static_cast<int>(i));
  }
  return out;
}

}  // namespace gff
