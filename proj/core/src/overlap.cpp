#include "gff/overlap.hpp"

#include <algorithm>
#include <cmath>

#include "gff/constants.hpp"
#include "gff/errors.hpp"
#include "gff/parallel.hpp"
#include "gff/stats.hpp"

namespace gff {

std::vector<double> overlap_threshold_grid() {
  std::vector<double> a(9);
  for (int i = 0; i < 9; ++i) a[static_cast<std::size_t>(i)] = 0.1 * (i + 1);
  return a;
}

double sample_pair_overlap(const FieldSample& field, const GreenMatrix& G, double beta,
                           double beta_prime, RngStream& rng) {
  if (field.h.size() != G.size()) {
    throw ValidationError("sample_pair_overlap: field/green size mismatch");
  }
  const auto cum_u = gibbs(field, beta).cumulative();
  const auto cum_v = gibbs(field, beta_prime).cumulative();
  const int u = sample_site(cum_u, rng);
  const int v = sample_site(cum_v, rng);
  return overlap_by_index(G, u, v);
}

namespace {

struct ReplicaOverlap {
  double mean_q = 0.0;
  std::vector<double> p_ge;
  std::vector<double> draws;
};

OverlapEstimate reduce_replicas(std::vector<ReplicaOverlap> reps, double beta,
                                double beta_prime, int N, std::size_t pairs,
                                std::uint64_t seed, bool keep_draws) {
  OverlapEstimate est;
  est.beta = beta;
  est.beta_prime = beta_prime;
  est.N = N;
  est.replicas = reps.size();
  est.pairs_per_replica = pairs;
  est.seed = seed;
  est.thresholds = overlap_threshold_grid();
  const std::size_t t = est.thresholds.size();

  std::vector<double> means;
  means.reserve(reps.size());
  std::vector<std::vector<double>> tails(t);
  for (auto& r : reps) {
    means.push_back(r.mean_q);
    for (std::size_t k = 0; k < t; ++k) tails[k].push_back(r.p_ge[k]);
    if (keep_draws) {
      est.draws.insert(est.draws.end(), r.draws.begin(), r.draws.end());
    }
  }
  const Summary s = summarize(means);
  est.mean = s.mean;
  est.se = s.se;
  est.p_ge.resize(t);
  est.p_ge_se.resize(t);
  for (std::size_t k = 0; k < t; ++k) {
    const Summary ts = summarize(tails[k]);
    est.p_ge[k] = ts.mean;
    est.p_ge_se[k] = ts.se;
  }
  return est;
}

}  // namespace

OverlapEstimate overlap_distribution(const GreenMatrix& G, const CholFactor& chol,
                                     double beta, double beta_prime, std::size_t replicas,
                                     std::size_t pairs_per_replica,
                                     std::uint64_t master_seed, int threads) {
  if (replicas < 1 || pairs_per_replica < 1) {
    throw ValidationError("overlap_distribution: counts must be >= 1");
  }
  const auto grid = overlap_threshold_grid();
  auto reps = parallel_map<ReplicaOverlap>(
      replicas, threads, [&](std::size_t k) {
        RngStream rng = RngStream::make(master_seed, "overlap", k);
        const FieldSample field = sample_dgff(chol, G.lattice.N, rng);
        const auto cum_u = gibbs(field, beta).cumulative();
        const auto cum_v = gibbs(field, beta_prime).cumulative();
        ReplicaOverlap rep;
        rep.p_ge.assign(grid.size(), 0.0);
        rep.draws.reserve(pairs_per_replica);
        double acc = 0.0;
        for (std::size_t p = 0; p < pairs_per_replica; ++p) {
          const int u = sample_site(cum_u, rng);
          const int v = sample_site(cum_v, rng);
          const double q = overlap_by_index(G, u, v);
          acc += q;
          rep.draws.push_back(q);
          for (std::size_t a = 0; a < grid.size(); ++a) {
            if (q >= grid[a]) rep.p_ge[a] += 1.0;
          }
        }
        rep.mean_q = acc / static_cast<double>(pairs_per_replica);
        for (double& v2 : rep.p_ge) v2 /= static_cast<double>(pairs_per_replica);
        return rep;
      });
  return reduce_replicas(std::move(reps), beta, beta_prime, G.lattice.N, pairs_per_replica,
                         master_seed, true);
}

OverlapEstimate overlap_distribution_exact(const GreenMatrix& G, const CholFactor& chol,
                                           double beta, double beta_prime,
                                           std::size_t replicas, std::uint64_t master_seed,
                                           int threads) {
  const std::size_t n = G.size();
  if (n > 200) {
    throw ValidationError(
        "overlap_distribution_exact: oracle mode is capped at 200 sites; use sampling");
  }
  if (replicas < 1) throw ValidationError("overlap_distribution_exact: replicas must be >= 1");
  const auto grid = overlap_threshold_grid();
  const Eigen::Index ni = static_cast<Eigen::Index>(n);

  auto reps = parallel_map<ReplicaOverlap>(
      replicas, threads, [&](std::size_t k) {
        RngStream rng = RngStream::make(master_seed, "overlap-exact", k);
        const FieldSample field = sample_dgff(chol, G.lattice.N, rng);
        const auto pu = gibbs(field, beta).probabilities();
        const auto pv = gibbs(field, beta_prime).probabilities();
        Eigen::Map<const Eigen::VectorXd> u(pu.data(), ni);
        Eigen::Map<const Eigen::VectorXd> v(pv.data(), ni);
        ReplicaOverlap rep;
        rep.mean_q = u.dot(G.G * v) / G.max_diag;
        // Mass per threshold bucket; bucket b = number of grid points <= q.
        std::vector<double> bucket(grid.size() + 1, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) {
            const double q = overlap_by_index(G, static_cast<int>(i), static_cast<int>(j));
            std::size_t b = 0;
            while (b < grid.size() && q >= grid[b]) ++b;
            bucket[b] += pu[i] * pv[j];
          }
        }
        rep.p_ge.assign(grid.size(), 0.0);
        double tail = 0.0;
        for (std::size_t b = grid.size(); b >= 1; --b) {
          tail += bucket[b];
          rep.p_ge[b - 1] = tail;
        }
        return rep;
      });
  return reduce_replicas(std::move(reps), beta, beta_prime, G.lattice.N, 0, master_seed,
                         false);
}

DerivativeReport derivative_identity(const GreenMatrix& G, const CholFactor& chol,
                                     double beta, double delta_beta, std::size_t replicas,
                                     std::uint64_t master_seed, int threads) {
  if (!(delta_beta > 0.0) || !(beta - delta_beta > 0.0)) {
    throw ValidationError("derivative_identity: need delta_beta > 0 and beta - delta_beta > 0");
  }
  if (replicas < 2) throw ValidationError("derivative_identity: needs >= 2 replicas");
  const int N = G.lattice.N;
  const double log_n2 = 2.0 * std::log(static_cast<double>(N));
  const bool five_point = beta - 2.0 * delta_beta > 0.0;
  const Eigen::Index ni = static_cast<Eigen::Index>(G.size());

  struct Rep {
    double fd = 0.0;       // central difference of f_N
    double rhs = 0.0;      // (beta/pi)(1 - qbar)
    double exact = 0.0;    // finite-N IBP derivative of E f_N given this field
    double stencil = 0.0;  // third-derivative combination
  };

  auto reps = parallel_map<Rep>(replicas, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "derivative", k);
    const FieldSample field = sample_dgff(chol, N, rng);
    const auto logz = [&](double b) { return gibbs(field, b).log_z; };
    Rep r;
    const double fp = logz(beta + delta_beta) / log_n2;
    const double fm = logz(beta - delta_beta) / log_n2;
    r.fd = (fp - fm) / (2.0 * delta_beta);
    if (five_point) {
      const double fp2 = logz(beta + 2.0 * delta_beta) / log_n2;
      const double fm2 = logz(beta - 2.0 * delta_beta) / log_n2;
      r.stencil = (fp2 - 2.0 * fp + 2.0 * fm - fm2) /
                  (2.0 * delta_beta * delta_beta * delta_beta);
    }
    const auto probs = gibbs(field, beta).probabilities();
    Eigen::Map<const Eigen::VectorXd> p(probs.data(), ni);
    const double quad = p.dot(G.G * p);         // p^T G p
    const double diag = G.G.diagonal().dot(p);  // Gibbs mean of G(u,u)
    const double qbar = quad / G.max_diag;
    r.rhs = (beta / k_pi) * (1.0 - qbar);
    r.exact = (beta / log_n2) * (diag - quad);
    return r;
  });

  std::vector<double> fds, rhss, diffs, norm_bias, stencils;
  fds.reserve(replicas);
  for (const Rep& r : reps) {
    fds.push_back(r.fd);
    rhss.push_back(r.rhs);
    diffs.push_back(r.fd - r.rhs);
    norm_bias.push_back(r.exact - r.rhs);
    stencils.push_back(r.stencil);
  }
  DerivativeReport rep;
  rep.beta = beta;
  rep.delta_beta = delta_beta;
  rep.N = N;
  rep.replicas = replicas;
  const Summary sl = summarize(fds), sr = summarize(rhss), sd = summarize(diffs);
  rep.lhs_mean = sl.mean;
  rep.lhs_se = sl.se;
  rep.rhs_mean = sr.mean;
  rep.rhs_se = sr.se;
  rep.diff_mean = sd.mean;
  rep.diff_se = sd.se;
  rep.bias_discretization =
      five_point ? (delta_beta * delta_beta / 6.0) * summarize(stencils).mean : 0.0;
  rep.bias_normalization = summarize(norm_bias).mean;
  return rep;
}

NearFarReport near_far_mass(const FieldSample& field, const GreenMatrix& G, double beta,
                            double beta_prime, double r, std::size_t pairs, RngStream& rng) {
  if (!(r >= 1.0)) throw ValidationError("near_far_mass: r must be >= 1");
  if (pairs < 1) throw ValidationError("near_far_mass: pairs must be >= 1");
  const auto cum_u = gibbs(field, beta).cumulative();
  const auto cum_v = gibbs(field, beta_prime).cumulative();
  const double hi = static_cast<double>(G.lattice.N) / r;
  std::size_t hits = 0;
  for (std::size_t p = 0; p < pairs; ++p) {
    const int u = sample_site(cum_u, rng);
    const int v = sample_site(cum_v, rng);
    const Site a = G.lattice.sites[static_cast<std::size_t>(u)];
    const Site b = G.lattice.sites[static_cast<std::size_t>(v)];
    const double dx = a.x - b.x, dy = a.y - b.y;
    const double dist = std::sqrt(dx * dx + dy * dy);
    if (dist > r && dist < hi) ++hits;
  }
  NearFarReport out;
  out.pairs = pairs;
  out.fraction = static_cast<double>(hits) / static_cast<double>(pairs);
  out.se = std::sqrt(out.fraction * (1.0 - out.fraction) / static_cast<double>(pairs));
  return out;
}

double near_far_band_uniform(const Lattice& lat, double r) {
  if (!(r >= 1.0)) throw ValidationError("near_far_band_uniform: r must be >= 1");
  const std::size_t n = lat.size();
  if (n == 0) throw ValidationError("near_far_band_uniform: empty lattice");
  const double hi = static_cast<double>(lat.N) / r;
  std::size_t hits = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double dx = lat.sites[i].x - lat.sites[j].x;
      const double dy = lat.sites[i].y - lat.sites[j].y;
      const double dist = std::sqrt(dx * dx + dy * dy);
      if (dist > r && dist < hi) ++hits;
    }
  }
  return static_cast<double>(hits) / (static_cast<double>(n) * static_cast<double>(n));
}

IbpFunction ibp_function_from_name(const std::string& name) {
  if (name == "linear") return IbpFunction::linear;
  if (name == "product") return IbpFunction::product;
  if (name == "softmax") return IbpFunction::softmax;
  if (name == "square") return IbpFunction::square;
  throw ValidationError("ibp: unknown test function '" + name +
                        "' (catalog: linear, product, softmax, square)");
}

std::string ibp_function_name(IbpFunction f) {
  switch (f) {
    case IbpFunction::linear: return "linear";
    case IbpFunction::product: return "product";
    case IbpFunction::softmax: return "softmax";
    case IbpFunction::square: return "square";
  }
  return "unknown";
}

namespace {

// Value and gradient of the catalog functions.
double ibp_eval(IbpFunction f, const Eigen::VectorXd& z, Eigen::VectorXd& grad) {
  const Eigen::Index d = z.size();
  grad.resize(d);
  switch (f) {
    case IbpFunction::linear:
      grad.setOnes();
      return z.sum();
    case IbpFunction::product: {
      double prod = 1.0;
      for (Eigen::Index i = 0; i < d; ++i) prod *= z(i);
      for (Eigen::Index i = 0; i < d; ++i) {
        double rest = 1.0;
        for (Eigen::Index j = 0; j < d; ++j) {
          if (j != i) rest *= z(j);
        }
        grad(i) = rest;
      }
      return prod;
    }
    case IbpFunction::softmax: {
      const double m = z.maxCoeff();
      const Eigen::VectorXd e = (z.array() - m).exp();
      const double s = e.sum();
      grad = e / s;
      return m + std::log(s);
    }
    case IbpFunction::square:
      grad = 2.0 * z;
      return z.squaredNorm();
  }
  grad.setZero();
  return 0.0;
}

}  // namespace

IbpReport gaussian_ibp_check(const Eigen::MatrixXd& cov, IbpFunction f,
                             std::size_t mc_samples, RngStream& rng) {
  const Eigen::Index m = cov.rows();
  if (m != cov.cols() || m < 2) {
    throw ValidationError("ibp: covariance must be square with dimension >= 2");
  }
  const Eigen::Index d = m - 1;
  if (d > 6) throw ValidationError("ibp: dimension d must be <= 6");
  if (mc_samples < 2) throw ValidationError("ibp: needs >= 2 samples");
  const double scale = cov.cwiseAbs().maxCoeff();
  if ((cov - cov.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0)) {
    throw ValidationError("ibp: covariance must be symmetric");
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(cov);
  Eigen::VectorXd lam = eig.eigenvalues();
  const double lmax = std::max(lam.maxCoeff(), 0.0);
  for (Eigen::Index i = 0; i < m; ++i) {
    if (lam(i) < -1e-10 * std::max(lmax, 1.0)) {
      throw ValidationError("ibp: covariance is not positive semidefinite");
    }
    lam(i) = std::max(lam(i), 0.0);
  }
  const Eigen::MatrixXd A = eig.eigenvectors() * lam.cwiseSqrt().asDiagonal();

  std::vector<double> paired(mc_samples);
  double sum_a = 0.0, sum_b = 0.0;
  Eigen::VectorXd w(m), y(m), grad(d);
  for (std::size_t s = 0; s < mc_samples; ++s) {
    for (Eigen::Index i = 0; i < m; ++i) w(i) = rng.normal();
    y = A * w;
    const double x = y(0);
    const Eigen::VectorXd z = y.tail(d);
    const double fv = ibp_eval(f, z, grad);
    const double a = x * fv;
    double b = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) b += cov(0, j + 1) * grad(j);
    sum_a += a;
    sum_b += b;
    paired[s] = a - b;
  }
  IbpReport rep;
  rep.samples = mc_samples;
  rep.lhs = sum_a / static_cast<double>(mc_samples);
  rep.rhs = sum_b / static_cast<double>(mc_samples);
  const Summary sd = summarize(paired);
  rep.diff = sd.mean;
  rep.se = sd.se;
  return rep;
}

}  // namespace gff
