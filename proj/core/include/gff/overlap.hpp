#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "gff/fields.hpp"
#include "gff/greens.hpp"
#include "gff/lattice.hpp"
#include "gff/rng.hpp"

namespace gff {

// Fixed threshold grid for P(q >= a) tables; keeps CSV schemas stable.
std::vector<double> overlap_threshold_grid();

struct OverlapEstimate {
  double beta = 0.0;
  double beta_prime = 0.0;
  int N = 0;
  std::size_t replicas = 0;
  std::size_t pairs_per_replica = 0;
  std::uint64_t seed = 0;
  std::vector<double> draws;      // pooled overlap draws (empty in exact mode)
  double mean = 0.0;
  double se = 0.0;                // replica-level standard error
  std::vector<double> thresholds;
  std::vector<double> p_ge;       // P(q >= a) per threshold
  std::vector<double> p_ge_se;    // replica-level standard errors
};

// One pair draw: u ~ Gibbs(beta), v ~ Gibbs(beta') given the field.
double sample_pair_overlap(const FieldSample& field, const GreenMatrix& G, double beta,
                           double beta_prime, RngStream& rng);

// Pooled pair sampling over independent field replicas. Per-replica streams
// are derived from the master seed, so results do not depend on threads.
OverlapEstimate overlap_distribution(const GreenMatrix& G, const CholFactor& chol,
                                     double beta, double beta_prime, std::size_t replicas,
                                     std::size_t pairs_per_replica,
                                     std::uint64_t master_seed, int threads);

// Exact conditional expectations per field (sum over all site pairs),
// Monte Carlo only over fields. Oracle mode, capped at 200 sites.
OverlapEstimate overlap_distribution_exact(const GreenMatrix& G, const CholFactor& chol,
                                           double beta, double beta_prime,
                                           std::size_t replicas, std::uint64_t master_seed,
                                           int threads);

struct DerivativeReport {
  double beta = 0.0;
  double delta_beta = 0.0;
  int N = 0;
  std::size_t replicas = 0;
  double lhs_mean = 0.0;  // central finite difference of f_N in beta
  double lhs_se = 0.0;
  double rhs_mean = 0.0;  // (beta/pi) (1 - E[Gibbs x Gibbs overlap])
  double rhs_se = 0.0;
  double diff_mean = 0.0; // paired lhs - rhs
  double diff_se = 0.0;
  // (delta^2/6) f''' from the five-point stencil.
  double bias_discretization = 0.0;
  // Exact finite-N derivative (Gaussian IBP) minus the asymptotic rhs form;
  // accounts for G(u,u) != max_diag at finite N.
  double bias_normalization = 0.0;
};

DerivativeReport derivative_identity(const GreenMatrix& G, const CholFactor& chol,
                                     double beta, double delta_beta, std::size_t replicas,
                                     std::uint64_t master_seed, int threads);

struct NearFarReport {
  double fraction = 0.0;
  double se = 0.0;
  std::size_t pairs = 0;
};

// Fraction of sampled Gibbs pairs with r < |u - v| < N / r (Euclidean).
NearFarReport near_far_mass(const FieldSample& field, const GreenMatrix& G, double beta,
                            double beta_prime, double r, std::size_t pairs, RngStream& rng);

// Exact band mass under beta = beta' = 0 (uniform pairs); enumeration oracle.
double near_far_band_uniform(const Lattice& lat, double r);

enum class IbpFunction { linear, product, softmax, square };

IbpFunction ibp_function_from_name(const std::string& name);
std::string ibp_function_name(IbpFunction f);

struct IbpReport {
  double lhs = 0.0;  // E[X F(Z)]
  double rhs = 0.0;  // sum_i E[X Z_i] E[d_i F(Z)]
  double diff = 0.0;
  double se = 0.0;   // paired standard error on diff
  std::size_t samples = 0;
};

// Gaussian integration by parts on (X, Z_1..Z_d): cov is the (d+1)x(d+1)
// covariance with X first. Draws are shared between both sides.
IbpReport gaussian_ibp_check(const Eigen::MatrixXd& cov, IbpFunction f,
                             std::size_t mc_samples, RngStream& rng);

}  // namespace gff
