#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(GFFLAB_BIN) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  REQUIRE(WIFEXITED(status));
  return WEXITSTATUS(status);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Parses a schema-1 CSV into header names + numeric rows.
struct Csv {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;
};

Csv parse_csv(const std::string& text) {
  Csv out;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::istringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    if (out.header.empty()) {
      out.header = cells;
      continue;
    }
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& c : cells) row.push_back(std::strtod(c.c_str(), nullptr));
    out.rows.push_back(std::move(row));
  }
  return out;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::path("cli_scratch") / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST_CASE("version flag exits cleanly") {
  CHECK(run("--version") == 0);
}

TEST_CASE("green on the two-site disc emits the closed-form entries") {
  const fs::path out = scratch("green_two_site");
  const int rc = run("green --domain disc --center-x 0.4375 --center-y 0.25 --radius 0.28 "
                     "--N 8 --out " +
                     out.string());
  REQUIRE(rc == 0);
  const Csv csv = parse_csv(slurp(out / "green_N8.csv"));
  REQUIRE(csv.header.size() >= 7);
  REQUIRE(csv.rows.size() == 4);  // full 2x2 matrix
  int diag = 0, off = 0;
  for (const auto& r : csv.rows) {
    const double g = r.back();
    if (std::fabs(g - 16.0 / 15.0) < 1e-9) ++diag;
    if (std::fabs(g - 4.0 / 15.0) < 1e-9) ++off;
  }
  CHECK(diag == 2);
  CHECK(off == 2);
}

TEST_CASE("manifest lists exactly the files written") {
  const fs::path out = scratch("manifest");
  REQUIRE(run("overlap --N 8 --beta 1.2 --replicates 20 --pairs 8 --format csv,json,svg "
              "--out " +
              out.string()) == 0);
  const json man = json::parse(slurp(out / "manifest.json"));
  CHECK(man["experiment"] == "overlap");
  CHECK(man.contains("version"));
  CHECK(man.contains("config"));
  CHECK(man["threads"] == 1);
  CHECK(man["exit_code"] == 0);

  std::set<std::string> listed;
  for (const auto& a : man["artifacts"]) listed.insert(a.get<std::string>());
  CHECK(listed.count("manifest.json") == 1);
  CHECK(listed.count("summary.json") == 1);

  std::set<std::string> present;
  for (const auto& entry : fs::directory_iterator(out)) {
    present.insert(entry.path().filename().string());
  }
  CHECK(listed == present);

  // Stream table names every tag used with its derived base key.
  CHECK(man["streams"].size() > 0);
}

TEST_CASE("reruns are bit-identical, different seeds are not") {
  const fs::path a = scratch("det_a");
  const fs::path b = scratch("det_b");
  const fs::path c = scratch("det_c");
  const std::string common =
      "overlap --N 8 --beta 1.5 --replicates 30 --pairs 16 --threads 1 --format csv ";
  REQUIRE(run(common + "--seed 42 --out " + a.string()) == 0);
  REQUIRE(run(common + "--seed 42 --out " + b.string()) == 0);
  REQUIRE(run(common + "--seed 43 --out " + c.string()) == 0);

  const std::string csv_a = slurp(a / "overlap.csv");
  CHECK(csv_a == slurp(b / "overlap.csv"));

  const std::string csv_c = slurp(c / "overlap.csv");
  CHECK(csv_a != csv_c);
  // Same schema: header and row count match, only values move.
  const Csv pa = parse_csv(csv_a), pc = parse_csv(csv_c);
  CHECK(pa.header == pc.header);
  CHECK(pa.rows.size() == pc.rows.size());
}

TEST_CASE("config file drives the run and flags override it") {
  const fs::path base = scratch("config_file");
  const fs::path cfg = base / "run.cfg";
  const fs::path out_a = base / "a";
  const fs::path out_b = base / "b";
  {
    std::ofstream f(cfg);
    f << "experiment = free-energy\n"
      << "N = 8\n"
      << "beta = 1.0, 2.0\n"
      << "replicates = 10\n"
      << "format = csv,json\n"
      << "out = " << out_a.string() << "\n";
  }
  REQUIRE(run("--config " + cfg.string()) == 0);
  CHECK(fs::exists(out_a / "free_energy.csv"));
  const Csv fa = parse_csv(slurp(out_a / "free_energy.csv"));
  CHECK(fa.rows.size() == 2);  // one row per beta

  // Flag overrides beat the file: new out dir, single beta.
  REQUIRE(run("--config " + cfg.string() + " --beta 1.5 --out " + out_b.string()) == 0);
  const Csv fb = parse_csv(slurp(out_b / "free_energy.csv"));
  CHECK(fb.rows.size() == 1);

  CHECK(run("--config nonexistent.cfg") == 1);
}

TEST_CASE("exit codes separate validation, resource, and statistical failures") {
  // Unknown key in the config file: validation, exit 1.
  const fs::path out = scratch("exits");
  const fs::path bad = out / "bad.cfg";
  {
    std::ofstream f(bad);
    f << "experiment = overlap\nmystery = 3\n";
  }
  CHECK(run("--config " + bad.string()) == 1);

  // Subcritical beta for a limit experiment: exit 1.
  CHECK(run("limit-q --beta 1.0 --out " + (out / "v").string()) == 1);

  // Dense cap: exit 2.
  CHECK(run("green --N 500 --out " + (out / "r").string()) == 2);

  // Broken shift control: statistical gate, exit 3.
  CHECK(run("verify shift --beta 5.1 --replicates 2000 --shift-offset 0.4 --seed 1 --out " +
            (out / "s").string()) == 3);

  // The same gate passes without the offset.
  CHECK(run("verify shift --beta 5.1 --replicates 2000 --seed 1 --out " +
            (out / "s0").string()) == 0);
}
