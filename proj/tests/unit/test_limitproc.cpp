#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "gff/constants.hpp"
#include "gff/errors.hpp"
#include "gff/limitproc.hpp"
#include "gff/potential_kernel.hpp"
#include "gff/stats.hpp"

using namespace gff;

TEST_CASE("truncation tail bound and derived level") {
  const double b = 2.0 * k_beta_c, L = 3.0;
  CHECK(truncation_tail_bound(b, L) ==
        doctest::Approx(std::exp(-(b - k_beta_c) * L) / (b - k_beta_c)).epsilon(1e-14));
  CHECK_THROWS_AS(truncation_tail_bound(k_beta_c, 1.0), ValidationError);

  const std::vector<double> betas{1.5 * k_beta_c, 3.0 * k_beta_c};
  const double L01 = truncation_level_for(betas, 0.01);
  for (double beta : betas) CHECK(truncation_tail_bound(beta, L01) <= 0.01 + 1e-12);
  // The slowest-decaying beta binds the level.
  CHECK(truncation_tail_bound(1.5 * k_beta_c, L01) ==
        doctest::Approx(0.01).epsilon(1e-9));
  // Very easy targets still get the floor.
  CHECK(truncation_level_for({100.0}, 0.5) >= 0.5);
}

TEST_CASE("point process intensity anchors") {
  // Mean count over [-L, inf) is e^{beta_c L}/beta_c; at L=0 that is 0.3989.
  const std::size_t n = 20000;
  double count_sum = 0.0;
  double none_above_zero = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    RngStream rng = RngStream::make(3, "test-ppp", k);
    const PointConfiguration c = sample_ppp(0.0, rng);
    count_sum += static_cast<double>(c.xi.size());
    double mx = -1.0;
    for (double x : c.xi) {
      CHECK(x >= 0.0);  // L = 0: support is [0, inf)
      mx = std::max(mx, x);
    }
    if (mx <= 0.0) none_above_zero += 1.0;
  }
  const double mean_count = count_sum / static_cast<double>(n);
  const double target = 1.0 / k_beta_c;
  const double se_count = std::sqrt(target / static_cast<double>(n));
  CHECK(std::fabs(mean_count - target) <= 4.0 * se_count);

  // Void probability of (0, inf): exp(-1/beta_c), counting empty sets.
  const double p_void = none_above_zero / static_cast<double>(n);
  const double pv = std::exp(-1.0 / k_beta_c);
  CHECK(std::fabs(p_void - pv) <= 4.0 * std::sqrt(pv * (1.0 - pv) / static_cast<double>(n)));

  RngStream rng = RngStream::make(3, "test-ppp-support", 0);
  for (int k = 0; k < 200; ++k) {
    const PointConfiguration c = sample_ppp(1.5, rng);
    for (double x : c.xi) CHECK(x >= -1.5);
  }
  CHECK_THROWS_AS(sample_ppp(-0.1, rng), ValidationError);
}

TEST_CASE("poisson-dirichlet weights") {
  PointConfiguration single;
  single.L = 1.0;
  single.xi = {0.7};
  const auto w1 = pd_weights(single, 2.0 * k_beta_c);
  REQUIRE(w1.size() == 1);
  CHECK(w1[0] == 1.0);

  RngStream rng = RngStream::make(5, "test-pd", 0);
  const PointConfiguration c = sample_ppp(2.0, rng);
  REQUIRE(c.xi.size() > 1);
  const auto w = pd_weights(c, 2.0 * k_beta_c);
  double sum = 0.0;
  for (double x : w) sum += x;
  CHECK(std::fabs(sum - 1.0) < 1e-12);
  CHECK(std::is_sorted(w.begin(), w.end(), std::greater<double>()));

  // Shifting every atom rescales numerator and denominator together.
  PointConfiguration shifted = c;
  for (double& x : shifted.xi) x += 3.7;
  const auto ws = pd_weights(shifted, 2.0 * k_beta_c);
  for (std::size_t i = 0; i < w.size(); ++i) {
    CHECK(ws[i] == doctest::Approx(w[i]).epsilon(1e-12));
  }

  PointConfiguration empty;
  CHECK_THROWS_AS(pd_weights(empty, 2.0 * k_beta_c), EmptyConfigurationError);
}

TEST_CASE("mean of sum of squared weights at twice critical") {
  // E sum w_i^2 = 1 - beta_c/beta = 1/2 at beta = 2 beta_c.
  const double beta = 2.0 * k_beta_c;
  const double L = truncation_level_for({beta}, 1e-4);
  const std::size_t n = 20000;
  std::vector<double> vals(n);
  for (std::size_t k = 0; k < n; ++k) {
    RngStream rng = RngStream::make(6, "test-pd2", k);
    PointConfiguration c = sample_ppp(L, rng);
    while (c.xi.empty()) c = sample_ppp(L, rng);
    const auto w = pd_weights(c, beta);
    double s2 = 0.0;
    for (double x : w) s2 += x * x;
    vals[k] = s2;
  }
  const Summary s = summarize(vals);
  CHECK(std::fabs(s.mean - 0.5) <= 4.0 * s.se + 1e-4);
}

TEST_CASE("x_beta closed forms") {
  CHECK(x_beta_of_gap(std::log(2.0), 1.0) ==
        doctest::Approx(std::log(1.5)).epsilon(1e-15));

  DecorationField origin_only;
  origin_only.support = {{0, 0}};
  origin_only.phi = {0.0};
  CHECK(x_beta_of(origin_only, 2.0) == 0.0);

  DecorationField two;
  two.support = {{0, 0}, {1, 0}};
  two.phi = {0.0, 0.8};
  for (double beta : {0.7, 1.3, 2.9}) {
    CHECK(x_beta_of(two, beta) == doctest::Approx(x_beta_of_gap(0.8, beta)).epsilon(1e-14));
    CHECK(x_beta_of(two, beta) >= 0.0);
  }
  // Nonincreasing in beta (l^p norm monotonicity).
  double prev = 1e300;
  for (double beta = 0.5; beta < 6.0; beta += 0.25) {
    const double x = x_beta_of_gap(0.8, beta);
    CHECK(x <= prev + 1e-15);
    prev = x;
  }
}

TEST_CASE("decoration model validation and draws") {
  CHECK_THROWS_AS(DecorationModel::two_site_random({0.5}, {0.5, 0.5}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(DecorationModel::two_site_random({-0.5, 1.0}, {0.5, 0.5}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(DecorationModel::two_site_random({0.5, 1.5}, {0.7, 0.7}).validate(),
                  ValidationError);
  CHECK_THROWS_AS(DecorationModel::dgff_ball(8, 2).validate(), ValidationError);
  CHECK_NOTHROW(DecorationModel::dgff_ball(2, 8).validate());

  CHECK(!DecorationModel::constant(1.0).is_random());
  CHECK(!DecorationModel::two_site(1.0).is_random());
  CHECK(DecorationModel::two_site_random({0.5, 1.5}, {0.5, 0.5}).is_random());
  CHECK(DecorationModel::dgff_ball(2, 8).is_random());
  CHECK(!DecorationModel::constant(1.0).describe().empty());

  RngStream rng = RngStream::make(8, "test-deco", 0);
  const DecorationField fc = draw_decoration(DecorationModel::constant(0.8, 3), rng);
  REQUIRE(fc.phi.size() == 4);
  CHECK(fc.phi[0] == 0.0);
  CHECK(fc.support[0] == Site{0, 0});
  for (std::size_t i = 1; i < 4; ++i) CHECK(fc.phi[i] == 0.8);

  const DecorationField f2 = draw_decoration(DecorationModel::two_site(1.0), rng);
  REQUIRE(f2.phi.size() == 2);
  CHECK(f2.phi[0] == 0.0);
  CHECK(f2.phi[1] == 1.0);

  // Random gap frequencies.
  const DecorationModel rnd = DecorationModel::two_site_random({0.5, 1.5}, {0.25, 0.75});
  int hi = 0;
  const int n = 20000;
  for (int i = 0; i < n; ++i) {
    const DecorationField f = draw_decoration(rnd, rng);
    REQUIRE(f.phi.size() == 2);
    CHECK(f.phi[0] == 0.0);
    if (f.phi[1] == 1.5) ++hi;
  }
  CHECK(std::fabs(hi / static_cast<double>(n) - 0.75) <
        5.0 * std::sqrt(0.25 * 0.75 / n));
}

TEST_CASE("ball sampler geometry and conditionals") {
  DgffBallSampler s(2, 8);
  std::size_t want = 0, want_trunc = 0;
  for (int x = -8; x <= 8; ++x) {
    for (int y = -8; y <= 8; ++y) {
      if (x * x + y * y <= 64) ++want;
      if (x * x + y * y <= 4 && (x != 0 || y != 0)) ++want_trunc;
    }
  }
  REQUIRE(s.support().size() == want);
  REQUIRE(s.phi().size() == want);
  CHECK(s.truncated_count() == want_trunc);
  CHECK(want_trunc == 12);

  RngStream rng = RngStream::make(9, "test-ball", 0);
  for (int t = 0; t < 200; ++t) s.sweep(rng);

  std::size_t origin = want;  // found below
  for (std::size_t i = 0; i < s.support().size(); ++i) {
    if (s.support()[i] == Site{0, 0}) origin = i;
    if (s.truncated(i)) CHECK(s.phi()[i] >= 0.0);
  }
  REQUIRE(origin < want);
  CHECK(s.phi()[origin] == 0.0);

  // conditional_mean is the plain neighbor average, frozen slots at drift.
  const double drift_scale = 2.0 / k_sqrt_g;
  for (std::size_t i = 0; i < s.support().size(); ++i) {
    if (i == origin) continue;
    const Site site = s.support()[i];
    double acc = 0.0;
    const Site steps[4] = {{site.x - 1, site.y},
                           {site.x + 1, site.y},
                           {site.x, site.y - 1},
                           {site.x, site.y + 1}};
    for (const Site nb : steps) {
      bool found = false;
      for (std::size_t j = 0; j < s.support().size(); ++j) {
        if (s.support()[j] == nb) {
          acc += s.phi()[j];
          found = true;
          break;
        }
      }
      if (!found) acc += drift_scale * potential_kernel(nb.x, nb.y);
    }
    CHECK(s.conditional_mean(i) == doctest::Approx(0.25 * acc).epsilon(1e-12));
  }

  const DecorationField f = s.field();
  CHECK(f.support[0] == Site{0, 0});
  CHECK(f.phi[0] == 0.0);
  CHECK(f.phi.size() == want);
}

TEST_CASE("ball sampler probability integral transform is uniform") {
  DgffBallSampler s(2, 6);
  RngStream rng = RngStream::make(10, "test-ball-pit", 0);
  for (int t = 0; t < 200; ++t) s.sweep(rng);
  std::vector<double> pit;
  for (int t = 0; t < 2000; ++t) s.sweep_recording_pit(rng, pit);
  REQUIRE(pit.size() == 2000 * s.truncated_count());
  const KsResult r = ks_one_sample(pit, [](double u) { return std::clamp(u, 0.0, 1.0); });
  CHECK(r.p_value > 0.01);
}

TEST_CASE("truncated normal cdf anchors") {
  CHECK(truncated_normal_cdf(0.0, -0.5) == 0.0);
  CHECK(truncated_normal_cdf(0.0, 0.0) == 0.0);
  CHECK(truncated_normal_cdf(0.0, 1.0) ==
        doctest::Approx(2.0 * normal_cdf(1.0) - 1.0).epsilon(1e-12));
  CHECK(truncated_normal_cdf(0.0, 40.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(truncated_normal_cdf(-3.0, 0.5) > 0.0);
  CHECK(truncated_normal_cdf(-3.0, 0.5) < 1.0);
  double prev = -1.0;
  for (double v = 0.05; v < 4.0; v += 0.05) {
    const double u = truncated_normal_cdf(1.2, v);
    CHECK(u >= prev);
    prev = u;
  }
}

TEST_CASE("configuration overlap: collapse, exchangeability, shift tolerance") {
  CHECK(q_of_configuration({0.3}, {0.1}, {0.2}, 6.0, 9.0) == 1.0);

  RngStream rng = RngStream::make(11, "test-qconf", 0);
  std::vector<double> xi(50), xb(50), xbp(50);
  for (std::size_t i = 0; i < 50; ++i) {
    xi[i] = 2.0 * rng.normal();
    xb[i] = std::fabs(rng.normal());
    xbp[i] = std::fabs(rng.normal());
  }
  const double beta = 1.5 * k_beta_c, beta_prime = 3.0 * k_beta_c;
  const double q0 = q_of_configuration(xi, xb, xbp, beta, beta_prime);
  CHECK(q0 > 0.0);
  CHECK(q0 <= 1.0);

  // Bit-exact under atom permutations: the canonical sort restores order.
  std::mt19937 shuffler(99);
  for (int rep = 0; rep < 10; ++rep) {
    std::vector<std::size_t> perm(50);
    for (std::size_t i = 0; i < 50; ++i) perm[i] = i;
    std::shuffle(perm.begin(), perm.end(), shuffler);
    std::vector<double> sxi(50), sxb(50), sxbp(50);
    for (std::size_t i = 0; i < 50; ++i) {
      sxi[i] = xi[perm[i]];
      sxb[i] = xb[perm[i]];
      sxbp[i] = xbp[perm[i]];
    }
    CHECK(q_of_configuration(sxi, sxb, sxbp, beta, beta_prime) == q0);
  }

  // Global shift of the atoms cancels in exact arithmetic; floating point
  // leaves rounding-level residue only.
  std::vector<double> shifted = xi;
  for (double& x : shifted) x += 2.5;
  const double qs = q_of_configuration(shifted, xb, xbp, beta, beta_prime);
  CHECK(std::fabs(qs - q0) < 1e-12);

  CHECK_THROWS_AS(q_of_configuration({}, {}, {}, beta, beta_prime),
                  EmptyConfigurationError);
  CHECK_THROWS_AS(q_of_configuration({1.0}, {}, {1.0}, beta, beta_prime), ValidationError);
  CHECK_THROWS_AS(q_of_configuration({1.0}, {0.0}, {0.0}, -1.0, 2.0), ValidationError);
}

TEST_CASE("overlap mean at twice critical matches the weight identity") {
  // Constant decorations shift every atom equally, so Q has the law of
  // sum w_i^2; at beta = beta' = 2 beta_c the mean is 1/2.
  const double beta = 2.0 * k_beta_c;
  const double L = truncation_level_for({beta}, 1e-4);
  const QEstimate q = sample_Q(beta, beta, DecorationModel::constant(1.0), L, 10000, 13, 1, 1e-4);
  CHECK(q.deepen_events == 0);
  CHECK(std::fabs(q.mean - 0.5) <= 4.0 * q.se + 1e-4);
  for (double v : q.values) {
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }

  const QEstimate r = sample_Q_rem(beta, beta, L, 10000, 13, 1, 1e-4);
  CHECK(std::fabs(r.mean - 0.5) <= 4.0 * r.se + 1e-4);
}

TEST_CASE("constant decorations cancel exactly in the paired gap") {
  // Cheap betas: both far above beta_c, so L = 1.5 keeps atoms sparse.
  const GapReport g = theorem2_gap(2.0 * k_beta_c, 4.0 * k_beta_c,
                                   DecorationModel::constant(1.3), 1.5, 5000, 17, 1, 0.01);
  REQUIRE(g.q.values.size() == g.rem.values.size());
  for (std::size_t k = 0; k < g.q.values.size(); ++k) {
    CHECK(std::fabs(g.q.values[k] - g.rem.values[k]) < 1e-12);
  }
}

TEST_CASE("random decorations open a strict gap") {
  const GapReport g =
      theorem2_gap(1.5 * k_beta_c, 3.0 * k_beta_c,
                   DecorationModel::two_site_random({0.2, 3.0}, {0.5, 0.5}), 3.5, 6000, 1, 1,
                   0.01);
  CHECK(g.diff_mean < 0.0);
  CHECK(g.p_one_sided < 0.05);
  CHECK(g.diff_se > 0.0);
  CHECK_THROWS_AS(theorem2_gap(1.0, 3.0 * k_beta_c, DecorationModel::constant(1.0), 3.5, 10, 1,
                               1, 0.01),
                  ValidationError);
}

TEST_CASE("importance-resampled Y matches the two-point closed form") {
  const double beta = 1.5 * k_beta_c, beta_prime = 3.0 * k_beta_c;
  const std::vector<double> gaps{0.5, 1.5};
  const DecorationModel m = DecorationModel::two_site_random(gaps, {0.5, 0.5});

  // E[f(Y)] = E[e^{beta_c X_beta} f(X_beta' - X_beta)]/E[e^{beta_c X_beta}]:
  // a two-point law with weights proportional to p_i e^{beta_c X_beta(c_i)}.
  double w[2], delta[2];
  for (int i = 0; i < 2; ++i) {
    const double xb = x_beta_of_gap(gaps[static_cast<std::size_t>(i)], beta);
    const double xbp = x_beta_of_gap(gaps[static_cast<std::size_t>(i)], beta_prime);
    w[i] = 0.5 * std::exp(k_beta_c * xb);
    delta[i] = xbp - xb;
  }
  const double p_hi = w[1] / (w[0] + w[1]);

  RngStream rng = RngStream::make(19, "test-y", 0);
  const YSample y = sample_Y(m, beta, beta_prime, 4000, 40000, rng);
  REQUIRE(y.draws.size() == 4000);
  CHECK(y.pool == 40000);
  CHECK(y.ess > 0.0);
  CHECK(y.ess <= 40000.0 + 1e-9);

  int hi = 0;
  for (double v : y.draws) {
    const bool is0 = std::fabs(v - delta[0]) < 1e-12;
    const bool is1 = std::fabs(v - delta[1]) < 1e-12;
    CHECK((is0 || is1));
    if (is1) ++hi;
  }
  const double freq = hi / 4000.0;
  CHECK(std::fabs(freq - p_hi) < 5.0 * std::sqrt(p_hi * (1.0 - p_hi) / 4000.0));

  // Lemma 3.3 witness: the law of Y is non-degenerate for this model.
  const Summary s = summarize(y.draws);
  CHECK(s.se > 0.0);

  RngStream rng2 = RngStream::make(19, "test-y-const", 0);
  const YSample yc = sample_Y(DecorationModel::constant(0.9), beta, beta_prime, 50, 500, rng2);
  const double want = x_beta_of_gap(0.9, beta_prime) - x_beta_of_gap(0.9, beta);
  for (double v : yc.draws) CHECK(v == doctest::Approx(want).epsilon(1e-14));
}

TEST_CASE("shift identity gate and its negative control") {
  const DecorationModel m = DecorationModel::two_site_random({0.5, 1.5}, {0.5, 0.5});
  const double beta = 2.0 * k_beta_c;
  const ShiftReport ok = verify_shift(beta, m, 2.0, 3000, 23, 1, 0.05);
  CHECK(ok.n == 3000);
  CHECK(!ok.reject);
  CHECK(ok.ks.p_value > 0.05);
  // c_beta has a closed form for the two-point model.
  const double e = 0.5 * std::exp(k_beta_c * x_beta_of_gap(0.5, beta)) +
                   0.5 * std::exp(k_beta_c * x_beta_of_gap(1.5, beta));
  const double c_beta = std::log(e) / k_beta_c;
  CHECK(std::fabs(ok.c_beta - c_beta) <= 4.0 * ok.c_beta_se + 1e-6);

  const ShiftReport bad = verify_shift(beta, m, 2.0, 3000, 23, 1, 0.05, 0.3);
  CHECK(bad.shift_offset == 0.3);
  CHECK(bad.reject);
}

TEST_CASE("joint shift gate holds for both marginals and the correlation") {
  const DecorationModel m = DecorationModel::two_site_random({0.5, 1.5}, {0.5, 0.5});
  const JointShiftReport r =
      verify_shift_joint(2.0 * k_beta_c, 3.0 * k_beta_c, m, 1.5, 2000, 29, 1, 0.05);
  CHECK(!r.marginal_beta.reject);
  CHECK(!r.marginal_beta_prime.reject);
  CHECK(std::isfinite(r.corr_z));
  CHECK(!r.corr_reject);
  CHECK(!r.reject);
  CHECK(r.corr_lhs > 0.5);  // both coordinates share the atoms
  CHECK(r.corr_rhs > 0.5);
}

TEST_CASE("perturbed inner product: exact fixture and degenerate cases") {
  const PerturbedIpReport fx =
      perturbed_inner_product({2.0 / 3.0, 1.0 / 3.0}, {1.0, 0.0}, {1.0, 2.0}, {0.5, 0.5});
  CHECK(fx.exact);
  CHECK(fx.outcomes == 4);
  CHECK(fx.expectation == doctest::Approx(79.0 / 120.0).epsilon(1e-15));
  CHECK(fx.baseline == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(fx.gap > 0.0);
  CHECK(fx.strict);
  CHECK(fx.hypotheses_hold);
  CHECK(fx.se == 0.0);

  // Single term: ptilde = p regardless of A.
  const PerturbedIpReport one = perturbed_inner_product({1.0}, {0.7}, {1.0, 3.0}, {0.5, 0.5});
  CHECK(std::fabs(one.gap) < 1e-15);
  CHECK(!one.strict);

  // Constant q: sum ptilde = 1 forces equality.
  const PerturbedIpReport cq =
      perturbed_inner_product({0.5, 0.3, 0.2}, {2.0, 2.0, 2.0}, {1.0, 2.0}, {0.5, 0.5});
  CHECK(std::fabs(cq.gap) < 1e-14);
  CHECK(!cq.strict);
  CHECK(!cq.hypotheses_hold);

  // Constant A: ptilde = p.
  const PerturbedIpReport ca =
      perturbed_inner_product({0.5, 0.3, 0.2}, {1.0, 0.5, 0.1}, {2.0}, {1.0});
  CHECK(std::fabs(ca.gap) < 1e-15);
  CHECK(!ca.strict);
  CHECK(!ca.hypotheses_hold);

  CHECK_THROWS_AS(perturbed_inner_product({0.5, 0.4}, {1.0, 0.0}, {1.0, 2.0}, {0.5, 0.5}),
                  ValidationError);  // p does not sum to 1
  CHECK_THROWS_AS(perturbed_inner_product({0.3, 0.7}, {1.0, 0.0}, {1.0, 2.0}, {0.5, 0.5}),
                  ValidationError);  // p increasing
  CHECK_THROWS_AS(perturbed_inner_product({0.7, 0.3}, {0.5, 1.0}, {1.0, 2.0}, {0.5, 0.5}),
                  ValidationError);  // q increasing
  CHECK_THROWS_AS(perturbed_inner_product({0.7, 0.3}, {1.0, 0.0}, {-1.0, 2.0}, {0.5, 0.5}),
                  ValidationError);  // nonpositive A value

  // Enumeration budget: 2^21 outcomes is past the cap, must point at MC.
  std::vector<double> p(21, 1.0 / 21.0), q(21);
  for (std::size_t i = 0; i < 21; ++i) q[i] = 1.0 - static_cast<double>(i) / 21.0;
  try {
    perturbed_inner_product(p, q, {1.0, 2.0}, {0.5, 0.5});
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("Monte Carlo") != std::string::npos);
  }
}

TEST_CASE("monte carlo inner product mode agrees with enumeration") {
  RngStream rng = RngStream::make(31, "test-ip-mc", 0);
  const PerturbedIpReport mc = perturbed_inner_product_mc(
      {2.0 / 3.0, 1.0 / 3.0}, {1.0, 0.0}, {1.0, 2.0}, {0.5, 0.5}, 200000, rng);
  CHECK(!mc.exact);
  CHECK(mc.se > 0.0);
  CHECK(std::fabs(mc.expectation - 79.0 / 120.0) <= 4.0 * mc.se);
  CHECK(mc.hypotheses_hold);
}

TEST_CASE("leading-atom mass: constant decorations cancel, random ones dominate") {
  const double beta = 2.0 * k_beta_c;
  const QInfinityEstimate qc =
      q_at_infinity(beta, DecorationModel::constant(1.0), 1.5, 3000, 37, 1, 0.05);
  REQUIRE(qc.q.values.size() == qc.rem.values.size());
  for (std::size_t k = 0; k < qc.q.values.size(); ++k) {
    CHECK(std::fabs(qc.q.values[k] - qc.rem.values[k]) < 1e-12);
  }

  const QInfinityEstimate qr = q_at_infinity(
      beta, DecorationModel::two_site_random({0.2, 3.0}, {0.5, 0.5}), 1.5, 4000, 37, 1, 0.05);
  // Stochastic dominance direction: F_Q(t) >= F_REM(t) within noise.
  const std::size_t n = qr.q.values.size();
  for (double t : {0.2, 0.4, 0.6, 0.8}) {
    double fq = 0.0, fr = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      if (qr.q.values[k] <= t) fq += 1.0;
      if (qr.rem.values[k] <= t) fr += 1.0;
    }
    fq /= static_cast<double>(n);
    fr /= static_cast<double>(n);
    const double se = std::sqrt((fq * (1.0 - fq) + fr * (1.0 - fr)) / static_cast<double>(n));
    CHECK(fq >= fr - 2.0 * se);
  }
}

TEST_CASE("tail budget is enforced with a helpful message") {
  try {
    sample_Q(1.1 * k_beta_c, 1.1 * k_beta_c, DecorationModel::constant(1.0), 0.5, 10, 1, 1,
             1e-4);
    FAIL("expected ValidationError");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("increase L") != std::string::npos);
  }
}
