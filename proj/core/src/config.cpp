#include "gff/config.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

#include "gff/constants.hpp"
#include "gff/csv.hpp"
#include "gff/errors.hpp"

namespace gff {

namespace {

const std::vector<std::string> k_experiments = {
    "green",      "sample-field", "free-energy", "high-points", "overlap",
    "derivative-check", "limit-q", "q-infinity",  "theorem2",    "lemma32",
    "shift",      "ibp",          "decoration"};

const std::vector<std::string> k_known_keys = {
    "experiment", "seed",        "threads",      "out",          "format",
    "domain",     "center_x",    "center_y",     "radius",       "inner_radius",
    "outer_radius", "N",         "beta",         "beta_prime",   "lambda",
    "delta_beta", "replicates",  "pairs",        "samples",      "burn_in",
    "truncation_l", "epsilon",   "decoration",   "gap",          "gap_values",
    "gap_probs",  "window_sites", "cond_radius", "window_radius", "shift_offset",
    "p",          "q",           "a_values",     "a_probs"};

struct Entry {
  std::string value;
  int line;
};

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == ',') {
      parts.push_back(trim(cur));
      cur.clear();
    } else {
      cur += ch;
    }
  }
  const std::string last = trim(cur);
  if (!last.empty() || !parts.empty()) parts.push_back(last);
  return parts;
}

class Violations {
 public:
  void add(int line, const std::string& msg) {
    char buf[32];
    if (line > 0) {
      std::snprintf(buf, sizeof(buf), "line %d: ", line);
      items_.push_back(buf + msg);
    } else {
      items_.push_back(msg);
    }
  }
  bool empty() const { return items_.empty(); }
  std::vector<std::string> take() { return std::move(items_); }

 private:
  std::vector<std::string> items_;
};

class Reader {
 public:
  Reader(std::map<std::string, Entry> entries, Violations& v)
      : entries_(std::move(entries)), v_(v) {}

  bool has(const std::string& key) const { return entries_.count(key) != 0; }
  int line_of(const std::string& key) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
  }

  void get_string(const std::string& key, std::string& out) {
    auto it = entries_.find(key);
    if (it != entries_.end()) out = it->second.value;
  }

  void get_double(const std::string& key, double& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    if (!parse_double(it->second.value, out)) {
      v_.add(it->second.line, "key '" + key + "': not a number: '" + it->second.value + "'");
    }
  }

  void get_int(const std::string& key, int& out, long long lo, long long hi) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    long long v = 0;
    if (!parse_ll(it->second.value, v) || v < lo || v > hi) {
      char buf[96];
      std::snprintf(buf, sizeof(buf), "': expected an integer in [%lld, %lld], got '", lo, hi);
      v_.add(it->second.line, "key '" + key + buf + it->second.value + "'");
      return;
    }
    out = static_cast<int>(v);
  }

  void get_size(const std::string& key, std::size_t& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    long long v = 0;
    if (!parse_ll(it->second.value, v) || v < 1) {
      v_.add(it->second.line,
             "key '" + key + "': expected a positive count, got '" + it->second.value + "'");
      return;
    }
    out = static_cast<std::size_t>(v);
  }

  void get_u64(const std::string& key, std::uint64_t& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    const std::string& s = it->second.value;
    if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos) {
      v_.add(it->second.line,
             "key '" + key + "': expected an unsigned integer, got '" + s + "'");
      return;
    }
    errno = 0;
    char* end = nullptr;
    const unsigned long long v = std::strtoull(s.c_str(), &end, 10);
    if (errno != 0 || end == nullptr || *end != '\0') {
      v_.add(it->second.line, "key '" + key + "': unsigned integer out of range: '" + s + "'");
      return;
    }
    out = v;
  }

  void get_double_list(const std::string& key, std::vector<double>& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    std::vector<double> vs;
    if (!it->second.value.empty()) {
      for (const std::string& part : split_list(it->second.value)) {
        double v = 0.0;
        if (!parse_double(part, v)) {
          v_.add(it->second.line, "key '" + key + "': not a number: '" + part + "'");
          return;
        }
        vs.push_back(v);
      }
    }
    out = std::move(vs);
  }

  void get_int_list(const std::string& key, std::vector<int>& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    std::vector<int> vs;
    if (!it->second.value.empty()) {
      for (const std::string& part : split_list(it->second.value)) {
        long long v = 0;
        if (!parse_ll(part, v) || v < 1 || v > 1000000) {
          v_.add(it->second.line,
                 "key '" + key + "': expected an integer in [1, 1000000], got '" + part + "'");
          return;
        }
        vs.push_back(static_cast<int>(v));
      }
    }
    out = std::move(vs);
  }

  void get_string_list(const std::string& key, std::vector<std::string>& out) {
    auto it = entries_.find(key);
    if (it == entries_.end()) return;
    out = split_list(it->second.value);
  }

 private:
  static bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (errno != 0 || end == nullptr || *end != '\0' || !std::isfinite(v)) return false;
    out = v;
    return true;
  }
  static bool parse_ll(const std::string& s, long long& out) {
    if (s.empty()) return false;
    errno = 0;
    char* end = nullptr;
    const long long v = std::strtoll(s.c_str(), &end, 10);
    if (errno != 0 || end == nullptr || *end != '\0') return false;
    out = v;
    return true;
  }

  std::map<std::string, Entry> entries_;
  Violations& v_;
};

bool is_prob_vector(const std::vector<double>& p) {
  double s = 0.0;
  for (double v : p) {
    if (!(v >= 0.0)) return false;
    s += v;
  }
  return std::fabs(s - 1.0) <= 1e-9;
}

bool is_nonincreasing(const std::vector<double>& v) {
  for (std::size_t i = 0; i + 1 < v.size(); ++i) {
    if (v[i] < v[i + 1]) return false;
  }
  return true;
}

std::string join(const std::vector<std::string>& parts, const char* sep) {
  std::string s;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) s += sep;
    s += parts[i];
  }
  return s;
}

}  // namespace

const std::vector<std::string>& known_experiments() { return k_experiments; }

bool is_limit_experiment(const std::string& experiment) {
  return experiment == "limit-q" || experiment == "q-infinity" || experiment == "theorem2" ||
         experiment == "shift";
}

DomainSpec RunConfig::domain_spec() const {
  if (domain == "unit-square") return DomainSpec::unit_square();
  if (domain == "disc") return DomainSpec::disc(center_x, center_y, radius);
  if (domain == "annulus") return DomainSpec::annulus(center_x, center_y, inner_radius, outer_radius);
  throw ValidationError("unknown domain: " + domain);
}

DecorationModel RunConfig::decoration_model() const {
  if (decoration == "constant") return DecorationModel::constant(gap, window_sites);
  if (decoration == "two-site") return DecorationModel::two_site(gap);
  if (decoration == "two-site-random") {
    return DecorationModel::two_site_random(gap_values, gap_probs);
  }
  if (decoration == "dgff-ball") {
    return DecorationModel::dgff_ball(cond_radius, window_radius, burn_in);
  }
  throw ValidationError("unknown decoration: " + decoration);
}

std::vector<double> RunConfig::effective_beta_primes() const {
  return beta_primes.empty() ? betas : beta_primes;
}

RunConfig parse_config(const std::string& text) {
  Violations viol;
  std::map<std::string, Entry> entries;

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(raw);
    if (line.empty() || line[0] == '#') continue;
    if (line[0] == '[') {
      const bool ok = line.size() >= 3 && line.back() == ']' &&
                      line.find_first_of("[]", 1) == line.size() - 1;
      if (!ok) viol.add(line_no, "malformed section header: '" + line + "'");
      continue;  // sections group keys visually; keys are globally unique
    }
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      viol.add(line_no, "expected key=value, got '" + line + "'");
      continue;
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) {
      viol.add(line_no, "empty key");
      continue;
    }
    if (std::find(k_known_keys.begin(), k_known_keys.end(), key) == k_known_keys.end()) {
      viol.add(line_no, "unknown key '" + key + "'");
      continue;
    }
    const auto it = entries.find(key);
    if (it != entries.end()) {
      char buf[64];
      std::snprintf(buf, sizeof(buf), "' (first set at line %d)", it->second.line);
      viol.add(line_no, "duplicate key '" + key + buf);
      continue;
    }
    entries.emplace(key, Entry{value, line_no});
  }

  RunConfig cfg;
  Reader rd(std::move(entries), viol);

  rd.get_string("experiment", cfg.experiment);
  rd.get_u64("seed", cfg.seed);
  rd.get_int("threads", cfg.threads, 1, 4096);
  rd.get_string("out", cfg.out);
  rd.get_string_list("format", cfg.formats);

  rd.get_string("domain", cfg.domain);
  rd.get_double("center_x", cfg.center_x);
  rd.get_double("center_y", cfg.center_y);
  rd.get_double("radius", cfg.radius);
  rd.get_double("inner_radius", cfg.inner_radius);
  rd.get_double("outer_radius", cfg.outer_radius);

  rd.get_int_list("N", cfg.n_values);

  rd.get_double_list("beta", cfg.betas);
  rd.get_double_list("beta_prime", cfg.beta_primes);
  rd.get_double("lambda", cfg.lambda);
  rd.get_double("delta_beta", cfg.delta_beta);

  rd.get_size("replicates", cfg.replicates);
  rd.get_size("pairs", cfg.pairs);
  rd.get_size("samples", cfg.samples);
  rd.get_int("burn_in", cfg.burn_in, 1, 1000000);

  rd.get_double("truncation_l", cfg.truncation_l);
  rd.get_double("epsilon", cfg.epsilon);
  rd.get_string("decoration", cfg.decoration);
  rd.get_double("gap", cfg.gap);
  rd.get_double_list("gap_values", cfg.gap_values);
  rd.get_double_list("gap_probs", cfg.gap_probs);
  rd.get_int("window_sites", cfg.window_sites, 1, 1024);
  rd.get_int("cond_radius", cfg.cond_radius, 0, 256);
  rd.get_int("window_radius", cfg.window_radius, 1, 256);
  rd.get_double("shift_offset", cfg.shift_offset);

  rd.get_double_list("p", cfg.p_weights);
  rd.get_double_list("q", cfg.q_values);
  rd.get_double_list("a_values", cfg.a_values);
  rd.get_double_list("a_probs", cfg.a_probs);

  // Semantic checks; each names the offending key's line when it was set.
  auto where = [&](const char* key) { return rd.line_of(key); };

  if (cfg.experiment.empty()) {
    viol.add(0, "missing required key 'experiment'");
  } else if (std::find(k_experiments.begin(), k_experiments.end(), cfg.experiment) ==
             k_experiments.end()) {
    viol.add(where("experiment"),
             "unknown experiment '" + cfg.experiment + "' (known: " + join(k_experiments, ", ") +
                 ")");
  }

  if (cfg.domain != "unit-square" && cfg.domain != "disc" && cfg.domain != "annulus") {
    viol.add(where("domain"),
             "unknown domain '" + cfg.domain + "' (known: unit-square, disc, annulus)");
  } else {
    try {
      cfg.domain_spec().validate();
    } catch (const ValidationError& e) {
      viol.add(where("domain"), e.what());
    }
  }

  if (cfg.n_values.empty()) viol.add(where("N"), "key 'N': needs at least one lattice size");
  for (int n : cfg.n_values) {
    if (n < 2) viol.add(where("N"), "key 'N': lattice sizes must be >= 2");
  }

  if (cfg.betas.empty()) viol.add(where("beta"), "key 'beta': needs at least one value");
  for (double b : cfg.betas) {
    if (!(b > 0.0)) viol.add(where("beta"), "key 'beta': all values must be > 0");
  }
  for (double b : cfg.beta_primes) {
    if (!(b > 0.0)) viol.add(where("beta_prime"), "key 'beta_prime': all values must be > 0");
  }
  if (is_limit_experiment(cfg.experiment)) {
    char buf[200];
    for (double b : cfg.betas) {
      if (!(b > k_beta_c)) {
        std::snprintf(buf, sizeof(buf),
                      "key 'beta': %.6g does not satisfy beta > beta_c = sqrt(2*pi) = %.6g, "
                      "required for experiment '%s'",
                      b, k_beta_c, cfg.experiment.c_str());
        viol.add(where("beta"), buf);
      }
    }
    for (double b : cfg.effective_beta_primes()) {
      if (!(b > k_beta_c)) {
        std::snprintf(buf, sizeof(buf),
                      "key 'beta_prime': %.6g does not satisfy beta > beta_c = sqrt(2*pi) = "
                      "%.6g, required for experiment '%s'",
                      b, k_beta_c, cfg.experiment.c_str());
        viol.add(where(cfg.beta_primes.empty() ? "beta" : "beta_prime"), buf);
      }
    }
  }

  if (!(cfg.lambda > 0.0 && cfg.lambda <= 1.0)) {
    viol.add(where("lambda"), "key 'lambda': must lie in (0, 1]");
  }
  if (!(cfg.delta_beta > 0.0)) {
    viol.add(where("delta_beta"), "key 'delta_beta': must be > 0");
  }
  if (!(cfg.epsilon > 0.0)) viol.add(where("epsilon"), "key 'epsilon': must be > 0");
  if (!(cfg.truncation_l >= 0.0)) {
    viol.add(where("truncation_l"), "key 'truncation_l': must be >= 0 (0 derives it)");
  }

  if (cfg.decoration != "constant" && cfg.decoration != "two-site" &&
      cfg.decoration != "two-site-random" && cfg.decoration != "dgff-ball") {
    viol.add(where("decoration"), "unknown decoration '" + cfg.decoration +
                                      "' (known: constant, two-site, two-site-random, dgff-ball)");
  } else {
    try {
      cfg.decoration_model();
    } catch (const ValidationError& e) {
      viol.add(where("decoration"), e.what());
    }
  }

  if (!is_prob_vector(cfg.p_weights) || !is_nonincreasing(cfg.p_weights)) {
    viol.add(where("p"), "key 'p': must be nonincreasing, nonnegative, and sum to 1");
  }
  if (cfg.q_values.size() != cfg.p_weights.size() || !is_nonincreasing(cfg.q_values) ||
      (!cfg.q_values.empty() && cfg.q_values.back() < 0.0)) {
    viol.add(where("q"), "key 'q': must be nonincreasing, nonnegative, and match p's length");
  }
  if (cfg.a_values.empty() || cfg.a_values.size() != cfg.a_probs.size() ||
      !is_prob_vector(cfg.a_probs)) {
    viol.add(where("a_probs"), "keys 'a_values'/'a_probs': need equal lengths and probabilities summing to 1");
  }
  for (double v : cfg.a_values) {
    if (!(v > 0.0)) viol.add(where("a_values"), "key 'a_values': all values must be > 0");
  }

  if (cfg.formats.empty()) viol.add(where("format"), "key 'format': needs at least one of csv, json, svg");
  for (const auto& f : cfg.formats) {
    if (f != "csv" && f != "json" && f != "svg") {
      viol.add(where("format"), "key 'format': unknown format '" + f + "'");
    }
  }
  if (cfg.out.empty()) viol.add(where("out"), "key 'out': must not be empty");

  if (!viol.empty()) throw ConfigError(viol.take());
  return cfg;
}

std::string serialize_config(const RunConfig& c) {
  std::string s;
  auto kv = [&s](const char* key, const std::string& value) {
    s += key;
    s += " = ";
    s += value;
    s += '\n';
  };
  auto kvd = [&](const char* key, double v) { kv(key, format_double(v)); };
  auto kvi = [&](const char* key, long long v) { kv(key, std::to_string(v)); };
  auto kvdl = [&](const char* key, const std::vector<double>& vs) {
    std::vector<std::string> parts;
    parts.reserve(vs.size());
    for (double v : vs) parts.push_back(format_double(v));
    kv(key, join(parts, ","));
  };

  s += "[run]\n";
  kv("experiment", c.experiment);
  kv("seed", std::to_string(c.seed));
  kvi("threads", c.threads);
  kv("out", c.out);
  kv("format", join(c.formats, ","));

  s += "[domain]\n";
  kv("domain", c.domain);
  kvd("center_x", c.center_x);
  kvd("center_y", c.center_y);
  kvd("radius", c.radius);
  kvd("inner_radius", c.inner_radius);
  kvd("outer_radius", c.outer_radius);

  s += "[lattice]\n";
  {
    std::vector<std::string> parts;
    parts.reserve(c.n_values.size());
    for (int n : c.n_values) parts.push_back(std::to_string(n));
    kv("N", join(parts, ","));
  }

  s += "[model]\n";
  kvdl("beta", c.betas);
  kvdl("beta_prime", c.beta_primes);
  kvd("lambda", c.lambda);
  kvd("delta_beta", c.delta_beta);

  s += "[sampling]\n";
  kvi("replicates", static_cast<long long>(c.replicates));
  kvi("pairs", static_cast<long long>(c.pairs));
  kvi("samples", static_cast<long long>(c.samples));
  kvi("burn_in", c.burn_in);

  s += "[limit]\n";
  kvd("truncation_l", c.truncation_l);
  kvd("epsilon", c.epsilon);
  kv("decoration", c.decoration);
  kvd("gap", c.gap);
  kvdl("gap_values", c.gap_values);
  kvdl("gap_probs", c.gap_probs);
  kvi("window_sites", c.window_sites);
  kvi("cond_radius", c.cond_radius);
  kvi("window_radius", c.window_radius);
  kvd("shift_offset", c.shift_offset);

  s += "[lemma]\n";
  kvdl("p", c.p_weights);
  kvdl("q", c.q_values);
  kvdl("a_values", c.a_values);
  kvdl("a_probs", c.a_probs);
  return s;
}

}  // namespace gff
