#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gff/lattice.hpp"
#include "gff/limitproc.hpp"

namespace gff {

// Full experiment description. Parsed from key=value text with optional
// [section] grouping headers; every key is globally unique, so sections are
// cosmetic. Flags override parsed values before run().
struct RunConfig {
  std::string experiment;

  std::string domain = "unit-square";
  double center_x = 0.5;
  double center_y = 0.5;
  double radius = 0.375;
  double inner_radius = 0.125;
  double outer_radius = 0.375;

  std::vector<int> n_values{32};

  std::vector<double> betas{1.0};
  std::vector<double> beta_primes;  // empty mirrors betas
  double lambda = 0.5;
  double delta_beta = 0.05;

  std::size_t replicates = 200;
  std::size_t pairs = 64;
  std::size_t samples = 100000;
  int burn_in = 64;

  double truncation_l = 0.0;  // 0 derives L from epsilon
  double epsilon = 1e-5;
  std::string decoration = "two-site-random";
  double gap = 0.69314718055994531;
  std::vector<double> gap_values{0.5, 1.5};
  std::vector<double> gap_probs{0.5, 0.5};
  int window_sites = 1;
  int cond_radius = 2;
  int window_radius = 8;
  double shift_offset = 0.0;

  std::vector<double> p_weights{2.0 / 3.0, 1.0 / 3.0};
  std::vector<double> q_values{1.0, 0.0};
  std::vector<double> a_values{1.0, 2.0};
  std::vector<double> a_probs{0.5, 0.5};

  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "out";
  std::vector<std::string> formats{"csv", "json"};

  bool operator==(const RunConfig&) const = default;

  DomainSpec domain_spec() const;
  DecorationModel decoration_model() const;
  std::vector<double> effective_beta_primes() const;
};

const std::vector<std::string>& known_experiments();
bool is_limit_experiment(const std::string& experiment);

// Collects every violation (with line numbers where applicable) and throws a
// single ConfigError; never stops at the first problem.
RunConfig parse_config(const std::string& text);

// Canonical grouped form; parse_config(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

}  // namespace gff
