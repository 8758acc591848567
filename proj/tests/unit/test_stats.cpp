#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "gff/errors.hpp"
#include "gff/stats.hpp"

using namespace gff;

TEST_CASE("summarize known vector") {
  const std::vector<double> xs{1.0, 2.0, 3.0, 4.0};
  const Summary s = summarize(xs);
  CHECK(s.n == 4);
  CHECK(s.mean == doctest::Approx(2.5).epsilon(1e-15));
  // sample variance 5/3, se = sqrt(5/3)/2
  CHECK(s.se == doctest::Approx(std::sqrt(5.0 / 3.0) / 2.0).epsilon(1e-14));

  CHECK(summarize(std::vector<double>{}).n == 0);
  const Summary one = summarize(std::vector<double>{7.0});
  CHECK(one.mean == 7.0);
  CHECK(one.se == 0.0);
}

TEST_CASE("log_sum_exp exact cases and overflow safety") {
  CHECK(log_sum_exp(std::vector<double>{0.0, 0.0}) ==
        doctest::Approx(std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp(std::vector<double>{-5.0}) == doctest::Approx(-5.0).epsilon(1e-15));
  CHECK(log_sum_exp(std::vector<double>{1000.0, 1000.0}) ==
        doctest::Approx(1000.0 + std::log(2.0)).epsilon(1e-15));
  CHECK(log_sum_exp(std::vector<double>{-1e9, 0.0}) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(log_sum_exp(std::vector<double>{}) == -std::numeric_limits<double>::infinity());
}

TEST_CASE("normal_cdf anchors") {
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.959963984540054) == doctest::Approx(0.975).epsilon(1e-10));
  CHECK(normal_cdf(-1.0) + normal_cdf(1.0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(normal_cdf(6.0) > 0.999999999);
}

TEST_CASE("ks_tail anchors") {
  CHECK(ks_tail(0.0) == 1.0);
  // Q(1.358) is about 0.0502, the classical 5% point.
  CHECK(ks_tail(1.358) == doctest::Approx(0.0502).epsilon(0.05));
  CHECK(ks_tail(3.0) < 1e-6);
}

TEST_CASE("ks_two_sample hand-computed statistic") {
  const KsResult same = ks_two_sample({1.0, 2.0, 3.0}, {1.0, 2.0, 3.0});
  CHECK(same.stat == 0.0);
  CHECK(same.p_value == 1.0);

  // F_A steps at 1,2,3; F_B at 1.5,2.5; sup gap is 1/3 on [1,1.5) and [2.5,3).
  const KsResult r = ks_two_sample({1.0, 2.0, 3.0}, {1.5, 2.5});
  CHECK(r.stat == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(r.n1 == 3);
  CHECK(r.n2 == 2);

  const KsResult far = ks_two_sample({0.0, 0.1, 0.2}, {5.0, 5.1, 5.2});
  CHECK(far.stat == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(far.p_value < 0.2);

  CHECK_THROWS_AS(ks_two_sample({}, {1.0}), ValidationError);
}

TEST_CASE("ks_one_sample against exact uniform grid") {
  // Points at (i+0.5)/n make the empirical CDF straddle the diagonal by 1/(2n).
  const std::size_t n = 50;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = (static_cast<double>(i) + 0.5) / n;
  const KsResult r = ks_one_sample(xs, [](double x) { return x; });
  CHECK(r.stat == doctest::Approx(0.01).epsilon(1e-12));
  CHECK(r.p_value > 0.99);
}

TEST_CASE("pearson_correlation anchors") {
  CHECK(pearson_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{2, 4, 6}) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(pearson_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{3, 2, 1}) ==
        doctest::Approx(-1.0).epsilon(1e-12));
  CHECK(pearson_correlation(std::vector<double>{1, 2, 3}, std::vector<double>{1, 1, 2}) ==
        doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
  CHECK_THROWS_AS(pearson_correlation(std::vector<double>{1.0}, std::vector<double>{1.0}),
                  ValidationError);
}

TEST_CASE("exceedance_probabilities counts ties as hits") {
  const std::vector<double> xs{1.0, 2.0, 2.0, 3.0};
  const std::vector<double> th{2.0, 2.5};
  const auto p = exceedance_probabilities(xs, th);
  REQUIRE(p.size() == 2);
  CHECK(p[0] == doctest::Approx(0.75).epsilon(1e-15));
  CHECK(p[1] == doctest::Approx(0.25).epsilon(1e-15));
}
