#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <string>
#include <vector>

#include "gff/config.hpp"
#include "gff/constants.hpp"
#include "gff/errors.hpp"
#include "gff/rng.hpp"

using namespace gff;

namespace {

bool mentions(const std::vector<std::string>& vs, const std::string& needle) {
  for (const auto& v : vs) {
    if (v.find(needle) != std::string::npos) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("minimal config inherits defaults") {
  const RunConfig c = parse_config("experiment = free-energy\n");
  CHECK(c.experiment == "free-energy");
  CHECK(c.domain == "unit-square");
  CHECK(c.n_values == std::vector<int>{32});
  CHECK(c.betas == std::vector<double>{1.0});
  CHECK(c.seed == 1);
  CHECK(c.threads == 1);
  CHECK(c.out == "out");
  CHECK(c.formats == std::vector<std::string>({"csv", "json"}));
}

TEST_CASE("comments, sections, and lists parse") {
  const RunConfig c = parse_config(
      "# laboratory run\n"
      "[run]\n"
      "experiment = overlap\n"
      "format = csv, svg\n"
      "[model]\n"
      "beta = 0.5, 1.25, 2.0\n"
      "beta_prime = 2.0, 2.0, 2.0\n"
      "[lattice]\n"
      "N = 16, 32\n"
      "seed = 18446744073709551615\n");
  CHECK(c.experiment == "overlap");
  CHECK(c.formats == std::vector<std::string>({"csv", "svg"}));
  CHECK(c.betas == std::vector<double>({0.5, 1.25, 2.0}));
  CHECK(c.beta_primes.size() == 3);
  CHECK(c.n_values == std::vector<int>({16, 32}));
  CHECK(c.seed == 18446744073709551615ull);  // full u64 range survives
}

TEST_CASE("every violation is collected with its line") {
  try {
    parse_config(
        "experiment = bogus\n"
        "seed = notanumber\n"
        "seed = 12\n"
        "lambda = 2.5\n"
        "mystery = 1\n"
        "radius\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const auto& v = e.violations();
    CHECK(v.size() >= 6);
    CHECK(mentions(v, "unknown experiment 'bogus'"));
    CHECK(mentions(v, "line 1"));
    CHECK(mentions(v, "notanumber"));
    CHECK(mentions(v, "duplicate key 'seed'"));
    CHECK(mentions(v, "first set at line 2"));
    CHECK(mentions(v, "lambda"));
    CHECK(mentions(v, "unknown key 'mystery'"));
    CHECK(mentions(v, "line 6"));  // the key-only line
  }
}

TEST_CASE("missing experiment is required") {
  CHECK_THROWS_AS(parse_config("seed = 4\n"), ConfigError);
}

TEST_CASE("limit experiments demand supercritical temperatures") {
  try {
    parse_config("experiment = limit-q\nbeta = 1.0\n");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(mentions(e.violations(), "beta_c"));
    CHECK(mentions(e.violations(), "limit-q"));
  }
  // The same beta is fine for a lattice experiment.
  CHECK_NOTHROW(parse_config("experiment = overlap\nbeta = 1.0\n"));
  // And a supercritical beta satisfies the limit gate.
  CHECK_NOTHROW(parse_config("experiment = limit-q\nbeta = 6.0\nbeta_prime = 7.0\n"));
}

TEST_CASE("lemma sequences are validated") {
  CHECK_THROWS_AS(parse_config("experiment = lemma32\np = 0.5, 0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = lemma32\nq = 0.5, 1.0\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("experiment = lemma32\na_values = -1, 2\n"), ConfigError);
}

TEST_CASE("serialize and parse round-trip exactly") {
  RunConfig base;
  base.experiment = "overlap";
  CHECK(parse_config(serialize_config(base)) == base);

  RngStream rng = RngStream::make(77, "test-config-roundtrip", 0);
  const auto& experiments = known_experiments();
  const char* domains[3] = {"unit-square", "disc", "annulus"};
  const char* decorations[4] = {"constant", "two-site", "two-site-random", "dgff-ball"};
  for (int trial = 0; trial < 120; ++trial) {
    RunConfig c;
    c.experiment = experiments[rng.uniform_index(experiments.size())];
    c.domain = domains[rng.uniform_index(3)];
    c.center_x = 0.25 + 0.5 * rng.uniform01();
    c.center_y = 0.25 + 0.5 * rng.uniform01();
    c.radius = 0.1 + 0.3 * rng.uniform01();
    c.inner_radius = 0.05 + 0.1 * rng.uniform01();
    c.outer_radius = c.inner_radius + 0.1 + 0.2 * rng.uniform01();
    c.n_values = {static_cast<int>(4 + rng.uniform_index(60))};
    if (rng.uniform01() < 0.5) c.n_values.push_back(c.n_values[0] * 2);
    const bool limit = is_limit_experiment(c.experiment);
    const double lo = limit ? k_beta_c + 0.1 : 0.05;
    c.betas = {lo + 2.0 * rng.uniform01()};
    if (rng.uniform01() < 0.5) c.betas.push_back(lo + 3.0 * rng.uniform01());
    if (rng.uniform01() < 0.5) {
      c.beta_primes.clear();
      for (std::size_t i = 0; i < c.betas.size(); ++i) {
        c.beta_primes.push_back(lo + 4.0 * rng.uniform01());
      }
    }
    c.lambda = 0.05 + 0.95 * rng.uniform01();
    c.delta_beta = 0.01 + 0.2 * rng.uniform01();
    c.replicates = 1 + rng.uniform_index(5000);
    c.pairs = 1 + rng.uniform_index(256);
    c.samples = 1 + rng.uniform_index(1000000);
    c.burn_in = static_cast<int>(1 + rng.uniform_index(200));
    c.truncation_l = (rng.uniform01() < 0.5) ? 0.0 : 0.5 + 4.0 * rng.uniform01();
    c.epsilon = std::exp(-2.0 - 8.0 * rng.uniform01());
    c.decoration = decorations[rng.uniform_index(4)];
    c.gap = 0.1 + 2.0 * rng.uniform01();
    c.window_sites = static_cast<int>(1 + rng.uniform_index(8));
    c.cond_radius = static_cast<int>(1 + rng.uniform_index(3));
    c.window_radius = c.cond_radius + static_cast<int>(2 + rng.uniform_index(6));
    c.shift_offset = (rng.uniform01() < 0.8) ? 0.0 : rng.uniform01();
    c.seed = rng.next_u64();
    c.threads = static_cast<int>(1 + rng.uniform_index(8));
    c.out = "out/run" + std::to_string(trial);
    c.formats = (trial % 3 == 0) ? std::vector<std::string>{"csv"}
                                 : std::vector<std::string>{"csv", "json", "svg"};

    const std::string text = serialize_config(c);
    RunConfig back;
    try {
      back = parse_config(text);
    } catch (const ConfigError& e) {
      MESSAGE("serialized form failed to parse:\n", text, "\n", e.what());
      FAIL("round-trip parse threw");
    }
    const bool equal = back == c;
    CHECK(equal);
    if (!equal) {
      MESSAGE("round-trip mismatch for:\n", text);
      break;
    }
  }
}

TEST_CASE("known experiment list drives the dispatcher") {
  const auto& k = known_experiments();
  CHECK(k.size() == 13);
  CHECK(is_limit_experiment("limit-q"));
  CHECK(is_limit_experiment("q-infinity"));
  CHECK(is_limit_experiment("theorem2"));
  CHECK(is_limit_experiment("shift"));
  CHECK(!is_limit_experiment("overlap"));
  CHECK(!is_limit_experiment("decoration"));
}

TEST_CASE("decoration model factory follows the config") {
  RunConfig c;
  c.experiment = "limit-q";
  c.betas = {6.0};
  c.decoration = "two-site-random";
  c.gap_values = {0.5, 1.5};
  c.gap_probs = {0.25, 0.75};
  const DecorationModel m = c.decoration_model();
  CHECK(m.kind == DecorationModel::Kind::two_site);
  CHECK(m.gap_values == std::vector<double>({0.5, 1.5}));

  c.decoration = "dgff-ball";
  c.cond_radius = 2;
  c.window_radius = 8;
  const DecorationModel b = c.decoration_model();
  CHECK(b.kind == DecorationModel::Kind::dgff_ball);
  CHECK(b.r == 2);
  CHECK(b.R == 8);
}

TEST_CASE("empty beta_prime mirrors beta") {
  RunConfig c;
  c.experiment = "overlap";
  c.betas = {1.0, 2.0};
  CHECK(c.effective_beta_primes() == c.betas);
  c.beta_primes = {3.0, 4.0};
  CHECK(c.effective_beta_primes() == std::vector<double>({3.0, 4.0}));
}
