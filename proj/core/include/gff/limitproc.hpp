#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gff/lattice.hpp"
#include "gff/rng.hpp"
#include "gff/stats.hpp"

namespace gff {

// Poisson point process with intensity e^(-beta_c h) dh truncated to [-L, inf).
struct PointConfiguration {
  double L = 0.0;
  std::vector<double> xi;
};

// Neglected mean mass int_{-inf}^{-L} e^{beta h} e^{-beta_c h} dh for beta > beta_c.
double truncation_tail_bound(double beta, double L);

// Smallest truncation level whose tail bound meets epsilon for every beta.
double truncation_level_for(const std::vector<double>& betas, double epsilon);

// Atom count ~ Poisson(e^{beta_c L}/beta_c), atoms iid -L + Exp(beta_c).
PointConfiguration sample_ppp(double L, RngStream& rng);

// Normalized Gibbs weights e^{beta xi_k} / sum, sorted descending.
std::vector<double> pd_weights(const PointConfiguration& config, double beta);

struct DecorationModel {
  enum class Kind { constant, two_site, dgff_ball };
  Kind kind = Kind::constant;
  double c = 1.0;                  // constant value / fixed two-site gap
  int window_sites = 1;            // constant model: off-origin sites at value c
  std::vector<double> gap_values;  // two-site random gaps; empty means fixed c
  std::vector<double> gap_probs;
  int r = 2;                       // dgff-ball: nonnegativity-conditioned radius
  int R = 8;                       // dgff-ball: window radius
  int burn_in = 64;                // dgff-ball: heat-bath sweeps

  static DecorationModel constant(double c, int window_sites = 1);
  static DecorationModel two_site(double c);
  static DecorationModel two_site_random(std::vector<double> values, std::vector<double> probs);
  static DecorationModel dgff_ball(int r, int R, int burn_in = 64);

  void validate() const;
  bool is_random() const;
  std::string describe() const;
};

struct DecorationField {
  std::vector<Site> support;  // support[0] is the origin
  std::vector<double> phi;    // phi[0] = 0
};

DecorationField draw_decoration(const DecorationModel& model, RngStream& rng);

// X_beta = (1/beta) log sum_x e^{-beta phi_x}, log-sum-exp; >= 0 since the
// origin contributes e^0.
double x_beta_of(const DecorationField& field, double beta);

// Closed form for a two-valued field (0, c): (1/beta) log(1 + e^{-beta c}).
double x_beta_of_gap(double c, double beta);

// Heat-bath chain for the ball decoration: pinned DGFF on the R-ball with
// drift (2/sqrt(g)) * a(x), conditioned nonnegative on the r-ball. Neighbors
// outside the window stay frozen at the drift.
class DgffBallSampler {
 public:
  DgffBallSampler(int r, int R);

  void reset();
  void sweep(RngStream& rng);
  // As sweep; for every truncated-site draw also records the probability
  // integral transform of the value under its conditional CDF. Exact
  // conditionals make these iid Uniform(0,1).
  void sweep_recording_pit(RngStream& rng, std::vector<double>& pit_pool);

  const std::vector<Site>& support() const { return support_; }
  const std::vector<double>& phi() const { return phi_; }
  std::size_t truncated_count() const { return n_truncated_; }
  bool truncated(std::size_t i) const { return truncated_[i] != 0; }
  double conditional_mean(std::size_t i) const;  // (1/4) * current neighbor sum
  DecorationField field() const;

 private:
  int r_ = 0, R_ = 0;
  std::vector<Site> support_;
  std::vector<double> phi_;
  std::vector<double> drift_;
  std::vector<std::array<int, 4>> nbr_;      // indices, -1 = frozen at drift
  std::vector<std::array<double, 4>> frozen_; // drift values for frozen slots
  std::vector<std::uint8_t> truncated_;
  std::size_t n_truncated_ = 0;
};

// CDF of a standard-variance normal with the given mean truncated to [0, inf).
double truncated_normal_cdf(double mean, double value);

struct QEstimate {
  double beta = 0.0;
  double beta_prime = 0.0;
  double L = 0.0;
  double epsilon = 0.0;
  std::vector<double> tail_bounds;  // per requested beta
  std::size_t replicates = 0;
  std::uint64_t seed = 0;
  std::vector<double> values;       // per-replicate Q, in (0, 1]
  double mean = 0.0;
  double se = 0.0;
  long long deepen_events = 0;      // empty-configuration retries (L + 1 each)
};

// Q for one explicit configuration. xi, x_beta, x_beta_prime give per-atom
// values in matching order; the atom order itself does not matter (a canonical
// sort runs first, so permuting the atoms is bit-exact invariant).
double q_of_configuration(const std::vector<double>& xi, const std::vector<double>& x_beta,
                          const std::vector<double>& x_beta_prime, double beta,
                          double beta_prime);

// Q = sum_k e^{beta(xi+X_beta)} e^{beta'(xi+X_beta')} / (sum e^{beta(xi+X_beta)}
// sum e^{beta'(xi+X_beta')}), decorations iid per atom. Atoms are sorted into
// canonical descending order before the log-sum-exp passes, so the value is
// invariant under any permutation of the atom list.
QEstimate sample_Q(double beta, double beta_prime, const DecorationModel& model, double L,
                   std::size_t replicates, std::uint64_t master_seed, int threads,
                   double epsilon);

QEstimate sample_Q_rem(double beta, double beta_prime, double L, std::size_t replicates,
                       std::uint64_t master_seed, int threads, double epsilon);

struct YSample {
  std::vector<double> draws;  // X_beta' - X_beta under the tilted law
  double ess = 0.0;           // effective sample size of the importance weights
  std::size_t pool = 0;
  bool ess_warning = false;
};

// Self-normalized importance resampling with weights e^{beta_c X_beta}.
YSample sample_Y(const DecorationModel& model, double beta, double beta_prime,
                 std::size_t n, std::size_t pool, RngStream& rng);

struct ShiftReport {
  double beta = 0.0;
  double L = 0.0;
  std::size_t n = 0;
  double c_beta = 0.0;
  double c_beta_se = 0.0;
  double shift_offset = 0.0;  // nonzero for negative controls
  KsResult ks;
  double level = 0.05;
  bool reject = false;
};

// Compares log sum_k e^{beta(xi_k + X_k)} against log sum_k e^{beta(xi_k + c_beta)}
// on independent configurations; the two are equal in law.
ShiftReport verify_shift(double beta, const DecorationModel& model, double L, std::size_t n,
                         std::uint64_t master_seed, int threads, double epsilon,
                         double shift_offset = 0.0);

struct JointShiftReport {
  ShiftReport marginal_beta;
  ShiftReport marginal_beta_prime;
  double corr_lhs = 0.0;
  double corr_rhs = 0.0;
  double corr_z = 0.0;  // Fisher z statistic for the correlation difference
  bool corr_reject = false;
  bool reject = false;
};

// Pair functional (S_beta, S_beta') against the shift representation with
// iid Y attached per atom.
JointShiftReport verify_shift_joint(double beta, double beta_prime,
                                    const DecorationModel& model, double L, std::size_t n,
                                    std::uint64_t master_seed, int threads, double epsilon);

struct PerturbedIpReport {
  double expectation = 0.0;  // E[sum_n ptilde_n q_n]
  double baseline = 0.0;     // sum_n p_n q_n
  double gap = 0.0;          // baseline - expectation
  bool strict = false;
  bool hypotheses_hold = false;  // A non-constant, q non-constant, all p_n > 0
  long long outcomes = 0;
  double se = 0.0;  // zero in exact mode
  bool exact = true;
};

// Exact enumeration over |support(A)|^len outcomes of the random reweighting
// ptilde_n = A_n p_n / sum_k A_k p_k.
PerturbedIpReport perturbed_inner_product(const std::vector<double>& p,
                                          const std::vector<double>& q,
                                          const std::vector<double>& a_values,
                                          const std::vector<double>& a_probs);

PerturbedIpReport perturbed_inner_product_mc(const std::vector<double>& p,
                                             const std::vector<double>& q,
                                             const std::vector<double>& a_values,
                                             const std::vector<double>& a_probs,
                                             std::size_t samples, RngStream& rng);

struct QInfinityEstimate {
  QEstimate q;       // Q(beta, inf)
  QEstimate rem;     // Q_REM(beta, inf), same atom sets
};

// Mass of the leading atom under the decorated / plain Gibbs weights.
QInfinityEstimate q_at_infinity(double beta, const DecorationModel& model, double L,
                                std::size_t replicates, std::uint64_t master_seed,
                                int threads, double epsilon);

struct GapReport {
  QEstimate q;
  QEstimate rem;
  double diff_mean = 0.0;  // mean(Q - Q_REM), paired on shared atoms
  double diff_se = 0.0;
  double p_one_sided = 1.0;  // H1: E[Q] < E[Q_REM]
};

// Paired replicates share the atom configuration; decorations only enter the
// Q side. beta = beta' is allowed and should show no significant difference.
GapReport theorem2_gap(double beta, double beta_prime, const DecorationModel& model,
                       double L, std::size_t replicates, std::uint64_t master_seed,
                       int threads, double epsilon);

}  // namespace gff
