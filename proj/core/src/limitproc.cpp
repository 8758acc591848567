#include "gff/limitproc.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <numeric>

#include "gff/constants.hpp"
#include "gff/errors.hpp"
#include "gff/parallel.hpp"
#include "gff/potential_kernel.hpp"

namespace gff {

double truncation_tail_bound(double beta, double L) {
  if (!(beta > k_beta_c)) {
    throw ValidationError("truncation_tail_bound: beta must exceed beta_c = sqrt(2*pi)");
  }
  return std::exp(-(beta - k_beta_c) * L) / (beta - k_beta_c);
}

double truncation_level_for(const std::vector<double>& betas, double epsilon) {
  if (!(epsilon > 0.0)) throw ValidationError("truncation_level_for: epsilon must be > 0");
  if (betas.empty()) throw ValidationError("truncation_level_for: no betas given");
  double L = 0.0;
  for (double b : betas) {
    if (!(b > k_beta_c)) {
      throw ValidationError("truncation_level_for: beta must exceed beta_c = sqrt(2*pi)");
    }
    L = std::max(L, -std::log(epsilon * (b - k_beta_c)) / (b - k_beta_c));
  }
  L = std::max(L, 0.5);
  // The log round-trip can leave the recomputed bound one ulp above epsilon;
  // nudge so callers re-checking the bound never see a spurious excess.
  for (double b : betas) {
    while (truncation_tail_bound(b, L) > epsilon) {
      L = std::nextafter(L, std::numeric_limits<double>::infinity());
    }
  }
  return L;
}

PointConfiguration sample_ppp(double L, RngStream& rng) {
  if (!(L >= 0.0)) throw ValidationError("sample_ppp: L must be >= 0");
  PointConfiguration c;
  c.L = L;
  const double mean = std::exp(k_beta_c * L) / k_beta_c;
  const long long count = rng.poisson(mean);
  c.xi.resize(static_cast<std::size_t>(count));
  for (double& x : c.xi) x = -L + rng.exponential(k_beta_c);
  return c;
}

std::vector<double> pd_weights(const PointConfiguration& config, double beta) {
  if (!(beta > k_beta_c)) {
    throw ValidationError("pd_weights: beta must exceed beta_c = sqrt(2*pi)");
  }
  if (config.xi.empty()) {
    throw EmptyConfigurationError(
        "pd_weights: empty point configuration; resample or deepen L");
  }
  std::vector<double> w(config.xi.size());
  double m = -std::numeric_limits<double>::infinity();
  for (double x : config.xi) m = std::max(m, beta * x);
  double s = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = std::exp(beta * config.xi[i] - m);
    s += w[i];
  }
  for (double& v : w) v /= s;
  std::sort(w.begin(), w.end(), std::greater<double>());
  return w;
}

DecorationModel DecorationModel::constant(double c, int window_sites) {
  DecorationModel m;
  m.kind = Kind::constant;
  m.c = c;
  m.window_sites = window_sites;
  m.validate();
  return m;
}

DecorationModel DecorationModel::two_site(double c) {
  DecorationModel m;
  m.kind = Kind::two_site;
  m.c = c;
  m.validate();
  return m;
}

DecorationModel DecorationModel::two_site_random(std::vector<double> values,
                                                 std::vector<double> probs) {
  DecorationModel m;
  m.kind = Kind::two_site;
  m.gap_values = std::move(values);
  m.gap_probs = std::move(probs);
  m.validate();
  return m;
}

DecorationModel DecorationModel::dgff_ball(int r, int R, int burn_in) {
  DecorationModel m;
  m.kind = Kind::dgff_ball;
  m.r = r;
  m.R = R;
  m.burn_in = burn_in;
  m.validate();
  return m;
}

void DecorationModel::validate() const {
  switch (kind) {
    case Kind::constant:
      if (!(c >= 0.0) || !std::isfinite(c)) {
        throw ValidationError("decoration: constant value must be finite and >= 0");
      }
      if (window_sites < 1) throw ValidationError("decoration: window_sites must be >= 1");
      return;
    case Kind::two_site:
      if (gap_values.empty()) {
        if (!(c >= 0.0) || !std::isfinite(c)) {
          throw ValidationError("decoration: two-site gap must be finite and >= 0");
        }
        return;
      }
      if (gap_values.size() != gap_probs.size()) {
        throw ValidationError("decoration: gap value/probability lists differ in length");
      }
      {
        double sum = 0.0;
        for (std::size_t i = 0; i < gap_values.size(); ++i) {
          if (!(gap_values[i] >= 0.0) || !std::isfinite(gap_values[i])) {
            throw ValidationError("decoration: gap values must be finite and >= 0");
          }
          if (!(gap_probs[i] >= 0.0)) {
            throw ValidationError("decoration: gap probabilities must be >= 0");
          }
          sum += gap_probs[i];
        }
        if (std::fabs(sum - 1.0) > 1e-9) {
          throw ValidationError("decoration: gap probabilities must sum to 1");
        }
      }
      return;
    case Kind::dgff_ball:
      if (r < 0 || R < 1 || r > R) {
        throw ValidationError("decoration: dgff-ball needs 0 <= r <= R and R >= 1");
      }
      if (burn_in < 1) throw ValidationError("decoration: burn_in must be >= 1");
      return;
  }
  throw ValidationError("decoration: unknown kind");
}

bool DecorationModel::is_random() const {
  switch (kind) {
    case Kind::constant:
      return false;
    case Kind::two_site:
      return gap_values.size() >= 2;
    case Kind::dgff_ball:
      return true;
  }
  return false;
}

std::string DecorationModel::describe() const {
  char buf[160];
  switch (kind) {
    case Kind::constant:
      std::snprintf(buf, sizeof(buf), "constant(c=%g, window=%d)", c, window_sites);
      return buf;
    case Kind::two_site:
      if (gap_values.empty()) {
        std::snprintf(buf, sizeof(buf), "two-site(c=%g)", c);
      } else {
        std::string vals;
        for (std::size_t i = 0; i < gap_values.size(); ++i) {
          char t[48];
          std::snprintf(t, sizeof(t), "%s%g:%g", i ? "," : "", gap_values[i], gap_probs[i]);
          vals += t;
        }
        std::snprintf(buf, sizeof(buf), "two-site-random(%s)", vals.c_str());
      }
      return buf;
    case Kind::dgff_ball:
      std::snprintf(buf, sizeof(buf), "dgff-ball(r=%d, R=%d, burn_in=%d)", r, R, burn_in);
      return buf;
  }
  return "unknown";
}

double x_beta_of_gap(double c, double beta) {
  if (!(beta > 0.0)) throw ValidationError("x_beta: beta must be > 0");
  return std::log1p(std::exp(-beta * c)) / beta;
}

double x_beta_of(const DecorationField& field, double beta) {
  if (!(beta > 0.0)) throw ValidationError("x_beta: beta must be > 0");
  if (field.phi.empty()) throw ValidationError("x_beta: empty decoration field");
  std::vector<double> terms(field.phi.size());
  for (std::size_t i = 0; i < field.phi.size(); ++i) terms[i] = -beta * field.phi[i];
  return log_sum_exp(terms) / beta;
}

DecorationField draw_decoration(const DecorationModel& model, RngStream& rng) {
  model.validate();
  DecorationField f;
  switch (model.kind) {
    case DecorationModel::Kind::constant: {
      f.support.push_back({0, 0});
      f.phi.push_back(0.0);
      for (int k = 1; k <= model.window_sites; ++k) {
        f.support.push_back({k, 0});
        f.phi.push_back(model.c);
      }
      return f;
    }
    case DecorationModel::Kind::two_site: {
      double gap = model.c;
      if (!model.gap_values.empty()) {
        double u = rng.uniform01();
        std::size_t i = 0;
        for (; i + 1 < model.gap_values.size(); ++i) {
          if (u < model.gap_probs[i]) break;
          u -= model.gap_probs[i];
        }
        gap = model.gap_values[i];
      }
      f.support = {{0, 0}, {1, 0}};
      f.phi = {0.0, gap};
      return f;
    }
    case DecorationModel::Kind::dgff_ball: {
      DgffBallSampler chain(model.r, model.R);
      for (int s = 0; s < model.burn_in; ++s) chain.sweep(rng);
      return chain.field();
    }
  }
  throw ValidationError("decoration: unknown kind");
}

DgffBallSampler::DgffBallSampler(int r, int R) : r_(r), R_(R) {
  if (r < 0 || R < 1 || r > R) {
    throw ValidationError("dgff-ball: needs 0 <= r <= R and R >= 1");
  }
  const long long R2 = static_cast<long long>(R) * R;
  for (int x = -R; x <= R; ++x) {
    for (int y = -R; y <= R; ++y) {
      if (static_cast<long long>(x) * x + static_cast<long long>(y) * y <= R2) {
        support_.push_back({x, y});
      }
    }
  }
  std::sort(support_.begin(), support_.end());

  const double drift_scale = 2.0 / k_sqrt_g;
  drift_.resize(support_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    drift_[i] = drift_scale * potential_kernel(support_[i].x, support_[i].y);
  }

  const long long r2 = static_cast<long long>(r) * r;
  truncated_.assign(support_.size(), 0);
  nbr_.assign(support_.size(), {-1, -1, -1, -1});
  frozen_.assign(support_.size(), {0.0, 0.0, 0.0, 0.0});
  for (std::size_t i = 0; i < support_.size(); ++i) {
    const Site s = support_[i];
    if (static_cast<long long>(s.x) * s.x + static_cast<long long>(s.y) * s.y <= r2 &&
        !(s.x == 0 && s.y == 0)) {
      truncated_[i] = 1;
      ++n_truncated_;
    }
    const Site steps[4] = {{s.x - 1, s.y}, {s.x + 1, s.y}, {s.x, s.y - 1}, {s.x, s.y + 1}};
    for (int k = 0; k < 4; ++k) {
      const auto it = std::lower_bound(support_.begin(), support_.end(), steps[k]);
      if (it != support_.end() && *it == steps[k]) {
        nbr_[i][static_cast<std::size_t>(k)] = static_cast<int>(it - support_.begin());
      } else {
        // Outside the window the field stays at its drift value.
        nbr_[i][static_cast<std::size_t>(k)] = -1;
        frozen_[i][static_cast<std::size_t>(k)] =
            drift_scale * potential_kernel(steps[k].x, steps[k].y);
      }
    }
  }
  reset();
}

void DgffBallSampler::reset() { phi_ = drift_; }

double DgffBallSampler::conditional_mean(std::size_t i) const {
  double s = 0.0;
  for (int k = 0; k < 4; ++k) {
    const int j = nbr_[i][static_cast<std::size_t>(k)];
    s += j >= 0 ? phi_[static_cast<std::size_t>(j)] : frozen_[i][static_cast<std::size_t>(k)];
  }
  return 0.25 * s;
}

void DgffBallSampler::sweep(RngStream& rng) {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].x == 0 && support_[i].y == 0) continue;  // pinned
    const double mu = conditional_mean(i);
    phi_[i] = truncated_[i] ? rng.truncated_normal_nonneg(mu) : mu + rng.normal();
  }
}

void DgffBallSampler::sweep_recording_pit(RngStream& rng, std::vector<double>& pit_pool) {
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (support_[i].x == 0 && support_[i].y == 0) continue;
    const double mu = conditional_mean(i);
    if (truncated_[i]) {
      const double v = rng.truncated_normal_nonneg(mu);
      phi_[i] = v;
      pit_pool.push_back(truncated_normal_cdf(mu, v));
    } else {
      phi_[i] = mu + rng.normal();
    }
  }
}

DecorationField DgffBallSampler::field() const {
  DecorationField f;
  const auto origin = std::lower_bound(support_.begin(), support_.end(), Site{0, 0});
  const std::size_t oi = static_cast<std::size_t>(origin - support_.begin());
  f.support.push_back({0, 0});
  f.phi.push_back(phi_[oi]);
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (i == oi) continue;
    f.support.push_back(support_[i]);
    f.phi.push_back(phi_[i]);
  }
  return f;
}

double truncated_normal_cdf(double mean, double value) {
  if (value <= 0.0) return 0.0;
  const double lo = normal_cdf(-mean);
  const double denom = 1.0 - lo;
  if (denom <= 0.0) return 1.0;
  return std::clamp((normal_cdf(value - mean) - lo) / denom, 0.0, 1.0);
}

namespace {

// Fast per-atom decoration functional sampler: closed forms for the constant
// and two-site models, full field draws for the ball model.
class XPairSampler {
 public:
  XPairSampler(const DecorationModel& m, double beta, double beta_prime)
      : model_(m), beta_(beta), beta_prime_(beta_prime) {
    switch (m.kind) {
      case DecorationModel::Kind::constant: {
        const double w = static_cast<double>(m.window_sites);
        fixed_ = {std::log1p(w * std::exp(-beta_ * m.c)) / beta_,
                  std::log1p(w * std::exp(-beta_prime_ * m.c)) / beta_prime_};
        mode_ = Mode::fixed;
        return;
      }
      case DecorationModel::Kind::two_site: {
        if (m.gap_values.empty()) {
          fixed_ = {x_beta_of_gap(m.c, beta_), x_beta_of_gap(m.c, beta_prime_)};
          mode_ = Mode::fixed;
          return;
        }
        table_.reserve(m.gap_values.size());
        cum_.reserve(m.gap_values.size());
        double acc = 0.0;
        for (std::size_t i = 0; i < m.gap_values.size(); ++i) {
          table_.push_back({x_beta_of_gap(m.gap_values[i], beta_),
                            x_beta_of_gap(m.gap_values[i], beta_prime_)});
          acc += m.gap_probs[i];
          cum_.push_back(acc);
        }
        cum_.back() = 1.0;
        mode_ = Mode::table;
        return;
      }
      case DecorationModel::Kind::dgff_ball:
        mode_ = Mode::field;
        return;
    }
  }

  struct XPair {
    double xb;
    double xbp;
  };

  XPair draw(RngStream& rng) const {
    switch (mode_) {
      case Mode::fixed:
        return fixed_;
      case Mode::table: {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), u);
        const std::size_t i =
            std::min(static_cast<std::size_t>(it - cum_.begin()), cum_.size() - 1);
        return table_[i];
      }
      case Mode::field: {
        const DecorationField f = draw_decoration(model_, rng);
        return {x_beta_of(f, beta_), x_beta_of(f, beta_prime_)};
      }
    }
    return fixed_;
  }

 private:
  enum class Mode { fixed, table, field };
  const DecorationModel& model_;
  double beta_;
  double beta_prime_;
  Mode mode_ = Mode::fixed;
  XPair fixed_{0.0, 0.0};
  std::vector<XPairSampler::XPair> table_;
  std::vector<double> cum_;
};

struct AtomTriple {
  double xi;
  double xb;
  double xbp;
};

// Canonical descending order; makes every downstream sum a symmetric
// function of the atom multiset.
void canonical_sort(std::vector<AtomTriple>& atoms) {
  std::sort(atoms.begin(), atoms.end(), [](const AtomTriple& a, const AtomTriple& b) {
    if (a.xi != b.xi) return a.xi > b.xi;
    if (a.xb != b.xb) return a.xb > b.xb;
    return a.xbp > b.xbp;
  });
}

double lse_terms(const std::vector<AtomTriple>& atoms, double (*term)(const AtomTriple&, double, double),
                 double beta, double beta_prime) {
  double m = -std::numeric_limits<double>::infinity();
  for (const auto& a : atoms) m = std::max(m, term(a, beta, beta_prime));
  double s = 0.0;
  for (const auto& a : atoms) s += std::exp(term(a, beta, beta_prime) - m);
  return m + std::log(s);
}

double term_num(const AtomTriple& a, double b, double bp) {
  return b * (a.xi + a.xb) + bp * (a.xi + a.xbp);
}
double term_d1(const AtomTriple& a, double b, double) { return b * (a.xi + a.xb); }
double term_d2(const AtomTriple& a, double, double bp) { return bp * (a.xi + a.xbp); }

double q_from_atoms(std::vector<AtomTriple>& atoms, double beta, double beta_prime) {
  canonical_sort(atoms);
  const double ln = lse_terms(atoms, term_num, beta, beta_prime);
  const double l1 = lse_terms(atoms, term_d1, beta, beta_prime);
  const double l2 = lse_terms(atoms, term_d2, beta, beta_prime);
  return std::min(std::exp(ln - l1 - l2), 1.0);
}

PointConfiguration sample_ppp_deepening(double L, RngStream& rng, long long* deepened) {
  double cur = L;
  for (int attempt = 0; attempt < 5; ++attempt) {
    PointConfiguration c = sample_ppp(cur, rng);
    if (!c.xi.empty()) return c;
    cur += 1.0;
    if (deepened) ++*deepened;
  }
  throw EmptyConfigurationError(
      "point process stayed empty after 5 attempts with deepened truncation");
}

void check_tail(const char* who, double beta, double L, double epsilon) {
  if (!(beta > k_beta_c)) {
    char msg[160];
    std::snprintf(msg, sizeof(msg), "%s: beta = %.6g must exceed beta_c = sqrt(2*pi) = %.6g",
                  who, beta, k_beta_c);
    throw ValidationError(msg);
  }
  const double tb = truncation_tail_bound(beta, L);
  if (tb > epsilon) {
    char msg[200];
    std::snprintf(msg, sizeof(msg),
                  "%s: truncation tail bound %.3g at beta=%.6g, L=%.4g exceeds epsilon=%.3g; "
                  "increase L",
                  who, tb, beta, L, epsilon);
    throw ValidationError(msg);
  }
}

QEstimate finalize_q(double beta, double beta_prime, double L, double epsilon,
                     std::uint64_t seed, std::vector<double> values, long long deepened) {
  QEstimate est;
  est.beta = beta;
  est.beta_prime = beta_prime;
  est.L = L;
  est.epsilon = epsilon;
  est.tail_bounds = {truncation_tail_bound(beta, L), truncation_tail_bound(beta_prime, L)};
  est.replicates = values.size();
  est.seed = seed;
  est.deepen_events = deepened;
  const Summary s = summarize(values);
  est.mean = s.mean;
  est.se = s.se;
  est.values = std::move(values);
  return est;
}

}  // namespace

double q_of_configuration(const std::vector<double>& xi, const std::vector<double>& x_beta,
                          const std::vector<double>& x_beta_prime, double beta,
                          double beta_prime) {
  if (xi.empty()) throw EmptyConfigurationError("q_of_configuration: no atoms");
  if (xi.size() != x_beta.size() || xi.size() != x_beta_prime.size())
    throw ValidationError("q_of_configuration: xi, x_beta, x_beta_prime lengths differ");
  if (!(beta > 0.0) || !(beta_prime > 0.0))
    throw ValidationError("q_of_configuration: beta and beta_prime must be positive");
  std::vector<AtomTriple> atoms(xi.size());
  for (std::size_t k = 0; k < xi.size(); ++k) atoms[k] = {xi[k], x_beta[k], x_beta_prime[k]};
  return q_from_atoms(atoms, beta, beta_prime);
}

QEstimate sample_Q(double beta, double beta_prime, const DecorationModel& model, double L,
                   std::size_t replicates, std::uint64_t master_seed, int threads,
                   double epsilon) {
  model.validate();
  check_tail("sample_Q", beta, L, epsilon);
  check_tail("sample_Q", beta_prime, L, epsilon);
  if (replicates < 1) throw ValidationError("sample_Q: replicates must be >= 1");

  struct Rep {
    double q;
    long long deepened;
  };
  const XPairSampler xs(model, beta, beta_prime);
  auto reps = parallel_map<Rep>(replicates, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "limit-q", k);
    Rep r{0.0, 0};
    const PointConfiguration c = sample_ppp_deepening(L, rng, &r.deepened);
    std::vector<AtomTriple> atoms(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      const auto x = xs.draw(rng);
      atoms[j] = {c.xi[j], x.xb, x.xbp};
    }
    r.q = q_from_atoms(atoms, beta, beta_prime);
    return r;
  });
  std::vector<double> values;
  values.reserve(replicates);
  long long deepened = 0;
  for (const auto& r : reps) {
    values.push_back(r.q);
    deepened += r.deepened;
  }
  return finalize_q(beta, beta_prime, L, epsilon, master_seed, std::move(values), deepened);
}

QEstimate sample_Q_rem(double beta, double beta_prime, double L, std::size_t replicates,
                       std::uint64_t master_seed, int threads, double epsilon) {
  check_tail("sample_Q_rem", beta, L, epsilon);
  check_tail("sample_Q_rem", beta_prime, L, epsilon);
  if (replicates < 1) throw ValidationError("sample_Q_rem: replicates must be >= 1");

  struct Rep {
    double q;
    long long deepened;
  };
  auto reps = parallel_map<Rep>(replicates, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "limit-q-rem", k);
    Rep r{0.0, 0};
    const PointConfiguration c = sample_ppp_deepening(L, rng, &r.deepened);
    std::vector<AtomTriple> atoms(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) atoms[j] = {c.xi[j], 0.0, 0.0};
    r.q = q_from_atoms(atoms, beta, beta_prime);
    return r;
  });
  std::vector<double> values;
  values.reserve(replicates);
  long long deepened = 0;
  for (const auto& r : reps) {
    values.push_back(r.q);
    deepened += r.deepened;
  }
  return finalize_q(beta, beta_prime, L, epsilon, master_seed, std::move(values), deepened);
}

YSample sample_Y(const DecorationModel& model, double beta, double beta_prime,
                 std::size_t n, std::size_t pool, RngStream& rng) {
  model.validate();
  if (n < 1 || pool < 2) throw ValidationError("sample_Y: need n >= 1 and pool >= 2");
  const XPairSampler xs(model, beta, beta_prime);
  std::vector<double> delta(pool), w(pool);
  double sum_w = 0.0, sum_w2 = 0.0;
  for (std::size_t i = 0; i < pool; ++i) {
    const auto x = xs.draw(rng);
    delta[i] = x.xbp - x.xb;
    w[i] = std::exp(k_beta_c * x.xb);
    sum_w += w[i];
    sum_w2 += w[i] * w[i];
  }
  YSample ys;
  ys.pool = pool;
  ys.ess = sum_w * sum_w / sum_w2;
  ys.ess_warning = ys.ess < static_cast<double>(n);
  std::vector<double> cum(pool);
  double acc = 0.0;
  for (std::size_t i = 0; i < pool; ++i) {
    acc += w[i];
    cum[i] = acc;
  }
  ys.draws.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double u = rng.uniform01() * sum_w;
    const auto it = std::upper_bound(cum.begin(), cum.end(), u);
    const std::size_t i = std::min(static_cast<std::size_t>(it - cum.begin()), pool - 1);
    ys.draws[k] = delta[i];
  }
  return ys;
}

namespace {

// Exact Y distribution for tabulated models: values X_beta' - X_beta with
// probabilities proportional to p_i e^{beta_c X_beta,i}.
bool exact_y_table(const DecorationModel& m, double beta, double beta_prime,
                   std::vector<double>& values, std::vector<double>& cum) {
  std::vector<double> gaps, probs;
  if (m.kind == DecorationModel::Kind::constant) {
    gaps = {m.c};
    probs = {1.0};
  } else if (m.kind == DecorationModel::Kind::two_site) {
    if (m.gap_values.empty()) {
      gaps = {m.c};
      probs = {1.0};
    } else {
      gaps = m.gap_values;
      probs = m.gap_probs;
    }
  } else {
    return false;
  }
  values.clear();
  cum.clear();
  double total = 0.0;
  std::vector<double> w(gaps.size());
  for (std::size_t i = 0; i < gaps.size(); ++i) {
    double xb;
    if (m.kind == DecorationModel::Kind::constant) {
      xb = std::log1p(m.window_sites * std::exp(-beta * gaps[i])) / beta;
    } else {
      xb = x_beta_of_gap(gaps[i], beta);
    }
    w[i] = probs[i] * std::exp(k_beta_c * xb);
    total += w[i];
    double xbp;
    if (m.kind == DecorationModel::Kind::constant) {
      xbp = std::log1p(m.window_sites * std::exp(-beta_prime * gaps[i])) / beta_prime;
    } else {
      xbp = x_beta_of_gap(gaps[i], beta_prime);
    }
    values.push_back(xbp - xb);
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    acc += w[i] / total;
    cum.push_back(acc);
  }
  cum.back() = 1.0;
  return true;
}

struct CBetaEstimate {
  double c_beta;
  double se;
};

CBetaEstimate estimate_c_beta(const DecorationModel& model, double beta,
                              std::uint64_t master_seed, std::size_t pool) {
  const XPairSampler xs(model, beta, beta);
  RngStream rng = RngStream::make(master_seed, "c-beta", 0);
  std::vector<double> w(pool);
  for (std::size_t i = 0; i < pool; ++i) w[i] = std::exp(k_beta_c * xs.draw(rng).xb);
  const Summary s = summarize(w);
  CBetaEstimate est;
  est.c_beta = std::log(s.mean) / k_beta_c;
  est.se = s.se / (s.mean * k_beta_c);
  return est;
}

}  // namespace

ShiftReport verify_shift(double beta, const DecorationModel& model, double L, std::size_t n,
                         std::uint64_t master_seed, int threads, double epsilon,
                         double shift_offset) {
  model.validate();
  check_tail("verify_shift", beta, L, epsilon);
  if (n < 8) throw ValidationError("verify_shift: n must be >= 8");

  const CBetaEstimate cb = estimate_c_beta(model, beta, master_seed, 200000);
  const XPairSampler xs(model, beta, beta);

  auto lhs = parallel_map<double>(n, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "shift-lhs", k);
    long long d = 0;
    const PointConfiguration c = sample_ppp_deepening(L, rng, &d);
    std::vector<double> terms(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      terms[j] = beta * (c.xi[j] + xs.draw(rng).xb);
    }
    return log_sum_exp(terms);
  });
  const double shift = beta * (cb.c_beta + shift_offset);
  auto rhs = parallel_map<double>(n, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "shift-rhs", k);
    long long d = 0;
    const PointConfiguration c = sample_ppp_deepening(L, rng, &d);
    std::vector<double> terms(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) terms[j] = beta * c.xi[j];
    return shift + log_sum_exp(terms);
  });

  ShiftReport rep;
  rep.beta = beta;
  rep.L = L;
  rep.n = n;
  rep.c_beta = cb.c_beta;
  rep.c_beta_se = cb.se;
  rep.shift_offset = shift_offset;
  rep.ks = ks_two_sample(std::move(lhs), std::move(rhs));
  rep.reject = rep.ks.p_value < rep.level;
  return rep;
}

JointShiftReport verify_shift_joint(double beta, double beta_prime,
                                    const DecorationModel& model, double L, std::size_t n,
                                    std::uint64_t master_seed, int threads, double epsilon) {
  model.validate();
  check_tail("verify_shift_joint", beta, L, epsilon);
  check_tail("verify_shift_joint", beta_prime, L, epsilon);
  if (n < 8) throw ValidationError("verify_shift_joint: n must be >= 8");

  const CBetaEstimate cb = estimate_c_beta(model, beta, master_seed, 200000);
  const XPairSampler xs(model, beta, beta_prime);

  struct Pair {
    double s1;
    double s2;
  };
  auto lhs = parallel_map<Pair>(n, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "joint-lhs", k);
    long long d = 0;
    const PointConfiguration c = sample_ppp_deepening(L, rng, &d);
    std::vector<double> t1(c.xi.size()), t2(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      const auto x = xs.draw(rng);
      t1[j] = beta * (c.xi[j] + x.xb);
      t2[j] = beta_prime * (c.xi[j] + x.xbp);
    }
    return Pair{log_sum_exp(t1), log_sum_exp(t2)};
  });

  std::vector<double> y_values, y_cum;
  const bool exact_y = exact_y_table(model, beta, beta_prime, y_values, y_cum);
  YSample pool_ys;
  if (!exact_y) {
    RngStream rng = RngStream::make(master_seed, "joint-y-pool", 0);
    pool_ys = sample_Y(model, beta, beta_prime, 200000, 200000, rng);
  }

  auto rhs = parallel_map<Pair>(n, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "joint-rhs", k);
    long long d = 0;
    const PointConfiguration c = sample_ppp_deepening(L, rng, &d);
    std::vector<double> t1(c.xi.size()), t2(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      double y;
      if (exact_y) {
        const double u = rng.uniform01();
        const auto it = std::upper_bound(y_cum.begin(), y_cum.end(), u);
        const std::size_t i =
            std::min(static_cast<std::size_t>(it - y_cum.begin()), y_values.size() - 1);
        y = y_values[i];
      } else {
        y = pool_ys.draws[static_cast<std::size_t>(
            rng.uniform_index(pool_ys.draws.size()))];
      }
      t1[j] = beta * (c.xi[j] + cb.c_beta);
      t2[j] = beta_prime * (c.xi[j] + cb.c_beta + y);
    }
    return Pair{log_sum_exp(t1), log_sum_exp(t2)};
  });

  std::vector<double> l1, l2, r1, r2;
  l1.reserve(n);
  for (const auto& p : lhs) {
    l1.push_back(p.s1);
    l2.push_back(p.s2);
  }
  for (const auto& p : rhs) {
    r1.push_back(p.s1);
    r2.push_back(p.s2);
  }

  JointShiftReport rep;
  rep.corr_lhs = pearson_correlation(l1, l2);
  rep.corr_rhs = pearson_correlation(r1, r2);
  const double z1 = std::atanh(std::clamp(rep.corr_lhs, -0.999999, 0.999999));
  const double z2 = std::atanh(std::clamp(rep.corr_rhs, -0.999999, 0.999999));
  rep.corr_z = (z1 - z2) / std::sqrt(2.0 / (static_cast<double>(n) - 3.0));
  rep.corr_reject = std::fabs(rep.corr_z) > 1.959963984540054;

  auto fill_marginal = [&](ShiftReport& m, std::vector<double> a, std::vector<double> b,
                           double b_used) {
    m.beta = b_used;
    m.L = L;
    m.n = n;
    m.c_beta = cb.c_beta;
    m.c_beta_se = cb.se;
    m.ks = ks_two_sample(std::move(a), std::move(b));
    m.reject = m.ks.p_value < m.level;
  };
  fill_marginal(rep.marginal_beta, l1, r1, beta);
  fill_marginal(rep.marginal_beta_prime, l2, r2, beta_prime);
  rep.reject = rep.marginal_beta.reject || rep.marginal_beta_prime.reject || rep.corr_reject;
  return rep;
}

namespace {

void validate_ip_inputs(const std::vector<double>& p, const std::vector<double>& q,
                        const std::vector<double>& a_values,
                        const std::vector<double>& a_probs) {
  if (p.empty() || p.size() != q.size()) {
    throw ValidationError("perturbed_inner_product: p and q must be non-empty, equal length");
  }
  double sum_p = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (!(p[i] >= 0.0)) throw ValidationError("perturbed_inner_product: p must be >= 0");
    if (!(q[i] >= 0.0)) throw ValidationError("perturbed_inner_product: q must be >= 0");
    if (i + 1 < p.size() && p[i] < p[i + 1]) {
      throw ValidationError("perturbed_inner_product: p must be nonincreasing");
    }
    if (i + 1 < q.size() && q[i] < q[i + 1]) {
      throw ValidationError("perturbed_inner_product: q must be nonincreasing");
    }
    sum_p += p[i];
  }
  if (std::fabs(sum_p - 1.0) > 1e-9) {
    throw ValidationError("perturbed_inner_product: p must sum to 1");
  }
  if (a_values.empty() || a_values.size() != a_probs.size()) {
    throw ValidationError("perturbed_inner_product: A needs matching values and probabilities");
  }
  double sum_a = 0.0;
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (!(a_values[i] > 0.0) || !std::isfinite(a_values[i])) {
      throw ValidationError("perturbed_inner_product: A values must be positive and finite");
    }
    if (!(a_probs[i] >= 0.0)) {
      throw ValidationError("perturbed_inner_product: A probabilities must be >= 0");
    }
    sum_a += a_probs[i];
  }
  if (std::fabs(sum_a - 1.0) > 1e-9) {
    throw ValidationError("perturbed_inner_product: A probabilities must sum to 1");
  }
}

bool ip_hypotheses(const std::vector<double>& p, const std::vector<double>& q,
                   const std::vector<double>& a_values, const std::vector<double>& a_probs) {
  bool all_p_positive = true;
  for (double v : p) all_p_positive = all_p_positive && v > 0.0;
  const bool q_nonconstant = q.front() != q.back();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (std::size_t i = 0; i < a_values.size(); ++i) {
    if (a_probs[i] > 0.0) {
      lo = std::min(lo, a_values[i]);
      hi = std::max(hi, a_values[i]);
    }
  }
  const bool a_nonconstant = hi > lo;
  return all_p_positive && q_nonconstant && a_nonconstant;
}

double ip_value(const std::vector<double>& p, const std::vector<double>& q,
                const std::vector<double>& a_values, const std::vector<std::size_t>& digits) {
  double denom = 0.0, num = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double ap = a_values[digits[i]] * p[i];
    denom += ap;
    num += ap * q[i];
  }
  return num / denom;
}

PerturbedIpReport ip_common(const std::vector<double>& p, const std::vector<double>& q) {
  PerturbedIpReport rep;
  double base = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) base += p[i] * q[i];
  rep.baseline = base;
  return rep;
}

}  // namespace

PerturbedIpReport perturbed_inner_product(const std::vector<double>& p,
                                          const std::vector<double>& q,
                                          const std::vector<double>& a_values,
                                          const std::vector<double>& a_probs) {
  validate_ip_inputs(p, q, a_values, a_probs);
  const std::size_t len = p.size(), base = a_values.size();
  double budget = 1.0;
  for (std::size_t i = 0; i < len; ++i) {
    budget *= static_cast<double>(base);
    if (budget > 1e6) {
      throw ValidationError(
          "perturbed_inner_product: enumeration budget of 1e6 outcomes exceeded; "
          "use the Monte Carlo mode");
    }
  }
  const long long total = static_cast<long long>(budget);

  PerturbedIpReport rep = ip_common(p, q);
  rep.exact = true;
  rep.outcomes = total;
  rep.hypotheses_hold = ip_hypotheses(p, q, a_values, a_probs);

  std::vector<std::size_t> digits(len, 0);
  double expectation = 0.0;
  for (long long outcome = 0; outcome < total; ++outcome) {
    long long rest = outcome;
    double prob = 1.0;
    for (std::size_t i = 0; i < len; ++i) {
      digits[i] = static_cast<std::size_t>(rest % static_cast<long long>(base));
      rest /= static_cast<long long>(base);
      prob *= a_probs[digits[i]];
    }
    if (prob == 0.0) continue;
    expectation += prob * ip_value(p, q, a_values, digits);
  }
  rep.expectation = expectation;
  rep.gap = rep.baseline - expectation;
  rep.strict = rep.gap > 1e-12 * std::max(1.0, std::fabs(rep.baseline));
  return rep;
}

PerturbedIpReport perturbed_inner_product_mc(const std::vector<double>& p,
                                             const std::vector<double>& q,
                                             const std::vector<double>& a_values,
                                             const std::vector<double>& a_probs,
                                             std::size_t samples, RngStream& rng) {
  validate_ip_inputs(p, q, a_values, a_probs);
  if (samples < 2) throw ValidationError("perturbed_inner_product_mc: samples must be >= 2");
  std::vector<double> cum(a_probs.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < a_probs.size(); ++i) {
    acc += a_probs[i];
    cum[i] = acc;
  }
  cum.back() = 1.0;

  PerturbedIpReport rep = ip_common(p, q);
  rep.exact = false;
  rep.outcomes = static_cast<long long>(samples);
  rep.hypotheses_hold = ip_hypotheses(p, q, a_values, a_probs);

  std::vector<std::size_t> digits(p.size());
  std::vector<double> vals(samples);
  for (std::size_t s = 0; s < samples; ++s) {
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double u = rng.uniform01();
      const auto it = std::upper_bound(cum.begin(), cum.end(), u);
      digits[i] = std::min(static_cast<std::size_t>(it - cum.begin()), cum.size() - 1);
    }
    vals[s] = ip_value(p, q, a_values, digits);
  }
  const Summary sm = summarize(vals);
  rep.expectation = sm.mean;
  rep.se = sm.se;
  rep.gap = rep.baseline - rep.expectation;
  rep.strict = rep.gap > 4.0 * sm.se;
  return rep;
}

QInfinityEstimate q_at_infinity(double beta, const DecorationModel& model, double L,
                                std::size_t replicates, std::uint64_t master_seed,
                                int threads, double epsilon) {
  model.validate();
  check_tail("q_at_infinity", beta, L, epsilon);
  if (replicates < 1) throw ValidationError("q_at_infinity: replicates must be >= 1");

  struct Rep {
    double q;
    double rem;
    long long deepened;
  };
  const XPairSampler xs(model, beta, beta);
  auto reps = parallel_map<Rep>(replicates, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "q-infinity", k);
    Rep r{0.0, 0.0, 0};
    const PointConfiguration c = sample_ppp_deepening(L, rng, &r.deepened);
    std::vector<AtomTriple> atoms(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      const auto x = xs.draw(rng);
      atoms[j] = {c.xi[j], x.xb, x.xb};
    }
    canonical_sort(atoms);
    const double l1 = lse_terms(atoms, term_d1, beta, beta);
    r.q = std::min(std::exp(beta * (atoms[0].xi + atoms[0].xb) - l1), 1.0);
    double m = -std::numeric_limits<double>::infinity();
    for (const auto& a : atoms) m = std::max(m, beta * a.xi);
    double s = 0.0;
    for (const auto& a : atoms) s += std::exp(beta * a.xi - m);
    const double lrem = m + std::log(s);
    r.rem = std::min(std::exp(beta * atoms[0].xi - lrem), 1.0);
    return r;
  });

  std::vector<double> qa, qr;
  qa.reserve(replicates);
  qr.reserve(replicates);
  long long deepened = 0;
  for (const auto& r : reps) {
    qa.push_back(r.q);
    qr.push_back(r.rem);
    deepened += r.deepened;
  }
  QInfinityEstimate est;
  est.q = finalize_q(beta, beta, L, epsilon, master_seed, std::move(qa), deepened);
  est.rem = finalize_q(beta, beta, L, epsilon, master_seed, std::move(qr), 0);
  return est;
}

GapReport theorem2_gap(double beta, double beta_prime, const DecorationModel& model,
                       double L, std::size_t replicates, std::uint64_t master_seed,
                       int threads, double epsilon) {
  model.validate();
  check_tail("theorem2_gap", beta, L, epsilon);
  check_tail("theorem2_gap", beta_prime, L, epsilon);
  if (replicates < 2) throw ValidationError("theorem2_gap: replicates must be >= 2");

  struct Rep {
    double q;
    double rem;
    long long deepened;
  };
  const XPairSampler xs(model, beta, beta_prime);
  auto reps = parallel_map<Rep>(replicates, threads, [&](std::size_t k) {
    RngStream rng = RngStream::make(master_seed, "theorem2", k);
    Rep r{0.0, 0.0, 0};
    const PointConfiguration c = sample_ppp_deepening(L, rng, &r.deepened);
    std::vector<AtomTriple> atoms(c.xi.size());
    std::vector<AtomTriple> bare(c.xi.size());
    for (std::size_t j = 0; j < c.xi.size(); ++j) {
      const auto x = xs.draw(rng);
      atoms[j] = {c.xi[j], x.xb, x.xbp};
      bare[j] = {c.xi[j], 0.0, 0.0};
    }
    r.q = q_from_atoms(atoms, beta, beta_prime);
    r.rem = q_from_atoms(bare, beta, beta_prime);
    return r;
  });

  std::vector<double> qa(replicates), qr(replicates), diff(replicates);
  long long deepened = 0;
  for (std::size_t k = 0; k < replicates; ++k) {
    qa[k] = reps[k].q;
    qr[k] = reps[k].rem;
    diff[k] = reps[k].q - reps[k].rem;
    deepened += reps[k].deepened;
  }
  GapReport rep;
  rep.q = finalize_q(beta, beta_prime, L, epsilon, master_seed, std::move(qa), deepened);
  rep.rem = finalize_q(beta, beta_prime, L, epsilon, master_seed, std::move(qr), 0);
  const Summary sd = summarize(diff);
  rep.diff_mean = sd.mean;
  rep.diff_se = sd.se;
  rep.p_one_sided = sd.se > 0.0 ? normal_cdf(sd.mean / sd.se) : (sd.mean < 0.0 ? 0.0 : 1.0);
  return rep;
}

}  // namespace gff
