// Experiment runner for the free-field laboratory: builds lattices and Green
// functions, samples fields, estimates overlap laws, and runs the limiting
// point-process verifications. See README.md for the experiment list.

#include <cstdio>
#include <exception>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "gff/config.hpp"
#include "gff/csv.hpp"
#include "gff/errors.hpp"
#include "gff/runner.hpp"
#include "gff/version.hpp"

namespace {

struct CliOverrides {
  std::string config_path;
  std::uint64_t seed = 1;
  int threads = 1;
  std::string out = "out";
  std::vector<std::string> formats;

  std::string domain;
  double center_x = 0.0, center_y = 0.0;
  double radius = 0.0, inner_radius = 0.0, outer_radius = 0.0;
  std::vector<int> n_values;
  std::vector<double> betas, beta_primes;
  double lambda = 0.0, delta_beta = 0.0;
  std::size_t replicates = 0, pairs = 0, samples = 0;
  int burn_in = 0;
  double truncation_l = 0.0, epsilon = 0.0;
  std::string decoration;
  double gap = 0.0;
  std::vector<double> gap_values, gap_probs;
  int window_sites = 0, cond_radius = 0, window_radius = 0;
  double shift_offset = 0.0;
  std::vector<double> p_weights, q_values, a_values, a_probs;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gfflab: discrete free field and matched REM laboratory"};
  app.set_version_flag("--version", std::string("gfflab ") + gff::k_version);
  app.require_subcommand(0, 1);
  app.fallthrough();

  CliOverrides ov;

  auto* opt_config = app.add_option("--config", ov.config_path, "Config file (key=value)");
  auto* opt_seed = app.add_option("--seed", ov.seed, "Master seed");
  auto* opt_threads = app.add_option("--threads", ov.threads, "Worker threads");
  auto* opt_out = app.add_option("--out", ov.out, "Output directory");
  auto* opt_format =
      app.add_option("--format", ov.formats, "Output formats (csv,json,svg)")->delimiter(',');

  auto* opt_domain =
      app.add_option("--domain", ov.domain, "Domain: unit-square, disc, annulus");
  auto* opt_cx = app.add_option("--center-x", ov.center_x, "Domain center x");
  auto* opt_cy = app.add_option("--center-y", ov.center_y, "Domain center y");
  auto* opt_radius = app.add_option("--radius", ov.radius, "Disc radius");
  auto* opt_rin = app.add_option("--inner-radius", ov.inner_radius, "Annulus inner radius");
  auto* opt_rout = app.add_option("--outer-radius", ov.outer_radius, "Annulus outer radius");
  auto* opt_n = app.add_option("--N", ov.n_values, "Lattice sizes")->delimiter(',');
  auto* opt_beta = app.add_option("--beta", ov.betas, "Inverse temperatures")->delimiter(',');
  auto* opt_beta_prime =
      app.add_option("--beta-prime", ov.beta_primes, "Second inverse temperatures")
          ->delimiter(',');
  auto* opt_lambda = app.add_option("--lambda", ov.lambda, "High-point level in (0,1]");
  auto* opt_delta_beta =
      app.add_option("--delta-beta", ov.delta_beta, "Finite-difference step");
  auto* opt_replicates = app.add_option("--replicates", ov.replicates, "Replicate count");
  auto* opt_pairs = app.add_option("--pairs", ov.pairs, "Overlap pairs per replica");
  auto* opt_samples = app.add_option("--samples", ov.samples, "Monte Carlo sample count");
  auto* opt_burn_in = app.add_option("--burn-in", ov.burn_in, "Heat-bath burn-in sweeps");
  auto* opt_l = app.add_option("--L", ov.truncation_l, "Truncation level (0 derives it)");
  auto* opt_epsilon = app.add_option("--epsilon", ov.epsilon, "Truncation tail budget");
  auto* opt_decoration =
      app.add_option("--decoration", ov.decoration,
                     "Decoration model: constant, two-site, two-site-random, dgff-ball");
  auto* opt_gap = app.add_option("--gap", ov.gap, "Fixed decoration gap / constant value");
  auto* opt_gap_values =
      app.add_option("--gap-values", ov.gap_values, "Random gap values")->delimiter(',');
  auto* opt_gap_probs =
      app.add_option("--gap-probs", ov.gap_probs, "Random gap probabilities")->delimiter(',');
  auto* opt_window_sites =
      app.add_option("--window-sites", ov.window_sites, "Constant-model window sites");
  auto* opt_cond_radius =
      app.add_option("--cond-radius", ov.cond_radius, "Nonnegativity radius (dgff-ball)");
  auto* opt_window_radius =
      app.add_option("--window-radius", ov.window_radius, "Window radius (dgff-ball)");
  auto* opt_shift_offset =
      app.add_option("--shift-offset", ov.shift_offset, "Shift verify offset (controls)");
  auto* opt_p = app.add_option("--p", ov.p_weights, "Overlap weights p")->delimiter(',');
  auto* opt_q = app.add_option("--q", ov.q_values, "Inner-product values q")->delimiter(',');
  auto* opt_a_values =
      app.add_option("--a-values", ov.a_values, "Perturbation values")->delimiter(',');
  auto* opt_a_probs =
      app.add_option("--a-probs", ov.a_probs, "Perturbation probabilities")->delimiter(',');

  const char* simple[] = {"green",       "sample-field", "free-energy",
                          "high-points", "overlap",      "derivative-check",
                          "limit-q",     "q-infinity",   "theorem2"};
  const char* simple_help[] = {
      "Killed-walk Green function tables",
      "Field realizations with per-replica summaries",
      "Normalized free energy against its limit",
      "High-point counts against the multifractal exponent",
      "Two-replica overlap distribution",
      "Derivative identity for the free energy",
      "Replicate overlap functional of the limiting process",
      "Leading-atom mass at infinite second temperature",
      "Paired decorated-vs-plain overlap comparison"};
  for (std::size_t i = 0; i < 9; ++i) {
    app.add_subcommand(simple[i], simple_help[i])->fallthrough();
  }
  auto* verify = app.add_subcommand("verify", "Statistical verification gates (exit 3 on reject)");
  verify->require_subcommand(1);
  verify->fallthrough();
  const char* gates[] = {"lemma32", "shift", "ibp", "decoration"};
  const char* gate_help[] = {
      "Perturbed inner-product inequality (exact enumeration)",
      "Shift identity for the decorated S-functional (two-sample KS)",
      "Gaussian integration by parts on a function catalog",
      "Heat-bath conditionals of the ball decoration (PIT uniformity)"};
  for (std::size_t i = 0; i < 4; ++i) {
    verify->add_subcommand(gates[i], gate_help[i])->fallthrough();
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    gff::RunConfig cfg;
    if (opt_config->count() > 0) {
      cfg = gff::parse_config(gff::read_text_file(ov.config_path));
    }

    for (const auto* sub : app.get_subcommands()) {
      if (sub->get_name() == "verify") {
        cfg.experiment = sub->get_subcommands().front()->get_name();
      } else {
        cfg.experiment = sub->get_name();
      }
    }

    if (opt_seed->count()) cfg.seed = ov.seed;
    if (opt_threads->count()) cfg.threads = ov.threads;
    if (opt_out->count()) cfg.out = ov.out;
    if (opt_format->count()) cfg.formats = ov.formats;
    if (opt_domain->count()) cfg.domain = ov.domain;
    if (opt_cx->count()) cfg.center_x = ov.center_x;
    if (opt_cy->count()) cfg.center_y = ov.center_y;
    if (opt_radius->count()) cfg.radius = ov.radius;
    if (opt_rin->count()) cfg.inner_radius = ov.inner_radius;
    if (opt_rout->count()) cfg.outer_radius = ov.outer_radius;
    if (opt_n->count()) cfg.n_values = ov.n_values;
    if (opt_beta->count()) cfg.betas = ov.betas;
    if (opt_beta_prime->count()) cfg.beta_primes = ov.beta_primes;
    if (opt_lambda->count()) cfg.lambda = ov.lambda;
    if (opt_delta_beta->count()) cfg.delta_beta = ov.delta_beta;
    if (opt_replicates->count()) cfg.replicates = ov.replicates;
    if (opt_pairs->count()) cfg.pairs = ov.pairs;
    if (opt_samples->count()) cfg.samples = ov.samples;
    if (opt_burn_in->count()) cfg.burn_in = ov.burn_in;
    if (opt_l->count()) cfg.truncation_l = ov.truncation_l;
    if (opt_epsilon->count()) cfg.epsilon = ov.epsilon;
    if (opt_decoration->count()) cfg.decoration = ov.decoration;
    if (opt_gap->count()) cfg.gap = ov.gap;
    if (opt_gap_values->count()) cfg.gap_values = ov.gap_values;
    if (opt_gap_probs->count()) cfg.gap_probs = ov.gap_probs;
    if (opt_window_sites->count()) cfg.window_sites = ov.window_sites;
    if (opt_cond_radius->count()) cfg.cond_radius = ov.cond_radius;
    if (opt_window_radius->count()) cfg.window_radius = ov.window_radius;
    if (opt_shift_offset->count()) cfg.shift_offset = ov.shift_offset;
    if (opt_p->count()) cfg.p_weights = ov.p_weights;
    if (opt_q->count()) cfg.q_values = ov.q_values;
    if (opt_a_values->count()) cfg.a_values = ov.a_values;
    if (opt_a_probs->count()) cfg.a_probs = ov.a_probs;

    // Re-validate the merged config with the same rules as the file parser.
    cfg = gff::parse_config(gff::serialize_config(cfg));

    const gff::RunManifest man = gff::run_experiment(cfg);
    std::printf("%s: wrote %zu artifacts to %s (%.2fs)\n", man.experiment.c_str(),
                man.artifacts.size(), cfg.out.c_str(), man.wall_seconds);
    if (man.exit_code == 3) {
      std::printf("statistical gate REJECTED; see %s/summary.json\n", cfg.out.c_str());
    }
    return man.exit_code;
  } catch (const gff::ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 1;
  } catch (const gff::ResourceCapError& e) {
    std::fprintf(stderr, "resource cap: %s\n", e.what());
    return 2;
  } catch (const gff::NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return 2;
  } catch (const gff::ValidationError& e) {
    std::fprintf(stderr, "invalid request: %s\n", e.what());
    return 1;
  } catch (const gff::EmptyConfigurationError& e) {
    std::fprintf(stderr, "empty configuration: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
