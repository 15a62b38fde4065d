#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"
#include "splitsea/csv.hpp"
#include "splitsea/errors.hpp"

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result call(std::vector<std::string> args) {
  args.insert(args.begin(), "splitsea");
  std::vector<const char *> argv;
  for (const auto &a : args)
    argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = splitsea::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

json golden(const std::string &name) {
  std::ifstream in(std::string(SPLITSEA_GOLDEN_DIR) + "/" + name);
  REQUIRE(in);
  return json::parse(in);
}

// Same keys and types; numbers to a relative 1e-10.
void same(const json &a, const json &b, const std::string &where = "$") {
  INFO(where);
  const bool compatible = a.type() == b.type() || (a.is_number() && b.is_number());
  REQUIRE(compatible);
  if (a.is_object()) {
    REQUIRE(a.size() == b.size());
    for (auto it = a.begin(); it != a.end(); ++it) {
      REQUIRE(b.contains(it.key()));
      same(it.value(), b[it.key()], where + "." + it.key());
    }
  } else if (a.is_array()) {
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i)
      same(a[i], b[i], where + "[" + std::to_string(i) + "]");
  } else if (a.is_number()) {
    const double x = a.get<double>(), y = b.get<double>();
    CHECK(std::abs(x - y) <= 1e-10 * std::max(1.0, std::abs(y)));
  } else {
    CHECK(a == b);
  }
}

fs::path scratch(const std::string &name) {
  const fs::path dir = fs::temp_directory_path() / "splitsea_test_cli";
  fs::create_directories(dir);
  return dir / name;
}

} // namespace

TEST_CASE("analyze matches golden output") {
  Result r = call({"analyze", "--gamma", "1,-0.3333333333", "--json"});
  REQUIRE(r.code == 0);
  same(json::parse(r.out), golden("analyze_two_cut.json"));
  r = call({"analyze", "--gamma", "1,0.1", "--json"});
  REQUIRE(r.code == 0);
  same(json::parse(r.out), golden("analyze_one_cut.json"));
}

TEST_CASE("oracle cdf golden, and it brackets the Toeplitz value") {
  const Result r = call({"oracle", "cdf", "--gamma", "1,-0.3333333333", "--theta", "2", "--ell", "3", "--cap", "24"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  same(j, golden("oracle_cdf.json"));
  const double v = j["value"], t = j["toeplitz"], bound = j["residual_bound"];
  CHECK(v <= t + 1e-14);
  CHECK(t - v <= bound);
}

TEST_CASE("airy csv matches golden table") {
  const Result r = call({"airy", "--m", "1", "--s=-4:2:0.5"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const splitsea::CsvTable got = splitsea::read_csv(in);
  std::ifstream gin(std::string(SPLITSEA_GOLDEN_DIR) + "/airy_m1.csv");
  const splitsea::CsvTable want = splitsea::read_csv(gin);
  REQUIRE(got.header == want.header);
  REQUIRE(got.rows.size() == want.rows.size());
  for (std::size_t i = 0; i < got.rows.size(); ++i) {
    CHECK(got.rows[i][0] == doctest::Approx(want.rows[i][0]).epsilon(1e-14));
    CHECK(got.rows[i][1] == doctest::Approx(want.rows[i][1]).epsilon(1e-10));
  }
  // Negative range start in separate-token form.
  CHECK(call({"airy", "--s", "-2:2:1"}).code == 0);
}

TEST_CASE("kernel agrees with its quadrature oracle") {
  const Result r = call({"kernel", "--gamma", "1,-0.3333333333", "--theta", "20", "--k", "2.5", "--l", "-1.5"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["diff"].get<double>() < 1e-12);
  CHECK(j["k"].get<double>() == 2.5);
}

TEST_CASE("configuration errors exit with 2") {
  Result r = call({"analyze", "--gamma", ""});
  CHECK(r.code == 2);
  CHECK(r.err.find("ConfigError") != std::string::npos);
  CHECK(call({"analyze", "--gamma", "0,0"}).code == 2);
  CHECK(call({"analyze", "--gamma", "1,x"}).code == 2);
  CHECK(call({"kernel", "--gamma", "1", "--theta", "1", "--k", "1", "--l", "0.5"}).code == 2);
  CHECK(call({"airy", "--m", "7"}).code == 2);
  CHECK(call({"airy", "--s", "2:1:0.1"}).code == 2);
  CHECK(call({"nonsense"}).code == 2);
  CHECK(call({}).code == 2);
  CHECK(call({"analyze"}).code == 2);
  CHECK(call({"analyze", "--config", "/nonexistent/file"}).code == 2);
}

TEST_CASE("numerical errors exit with 3 and name the error") {
  const Result r = call({"unitary-density", "--gamma", "1", "--x", "0.5"});
  CHECK(r.code == 3);
  CHECK(r.err.find("SubcriticalPhase") != std::string::npos);
}

TEST_CASE("config file supplies options and flags override it") {
  const fs::path cfg = scratch("run.cfg");
  {
    std::ofstream f(cfg);
    f << "# comment\n\ngamma = 1,-0.3333333333\ntheta=20\nk=0.5\nl=0.5\n";
  }
  const Result a = call({"--config", cfg.string(), "kernel"});
  REQUIRE(a.code == 0);
  CHECK(json::parse(a.out)["theta"].get<double>() == 20.0);
  const Result b = call({"kernel", "--config", cfg.string(), "--theta", "3"});
  REQUIRE(b.code == 0);
  CHECK(json::parse(b.out)["theta"].get<double>() == 3.0);

  const auto toks = splitsea::cli::config_tokens(cfg.string());
  CHECK(toks == std::vector<std::string>{"--gamma=1,-0.3333333333", "--theta=20", "--k=0.5", "--l=0.5"});
  {
    std::ofstream f(cfg);
    f << "gamma\n";
  }
  CHECK_THROWS_AS(splitsea::cli::config_tokens(cfg.string()), splitsea::ConfigError);
}

TEST_CASE("output flag redirects the primary artifact") {
  const fs::path path = scratch("density.csv");
  const Result r = call({"density", "--gamma", "1", "--steps", "10", "-o", path.string()});
  REQUIRE(r.code == 0);
  CHECK(r.out.empty());
  std::ifstream in(path);
  const splitsea::CsvTable t = splitsea::read_csv(in);
  CHECK(t.header == std::vector<std::string>{"x", "rho", "Omega"});
  CHECK(t.rows.size() == 11);
  for (const auto &row : t.rows) {
    CHECK(row[1] >= 0.0);
    CHECK(row[1] <= 1.0);
  }
}

TEST_CASE("figures writes three csv files and one svg") {
  const fs::path dir = scratch("figs");
  fs::remove_all(dir);
  const Result r = call({"figures", "--gamma2", "-0.3333333333", "--outdir", dir.string(), "--points", "64"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  REQUIRE(j["files"].size() == 4);
  int csv = 0, svg = 0;
  for (const auto &f : j["files"]) {
    const fs::path p = f.get<std::string>();
    CHECK(fs::exists(p));
    CHECK(fs::file_size(p) > 0);
    csv += p.extension() == ".csv";
    svg += p.extension() == ".svg";
  }
  CHECK(csv == 3);
  CHECK(svg == 1);
}

TEST_CASE("sample and unitary-mc are reproducible from the seed") {
  const std::vector<std::string> s{"sample", "--gamma", "1", "--theta", "10", "-n", "50", "--seed", "11"};
  const Result a = call(s), b = call(s);
  REQUIRE(a.code == 0);
  CHECK(a.out == b.out);
  const json j = json::parse(a.out);
  CHECK(j["ks_exact"].get<double>() >= 0.0);
  CHECK(j["ks_exact"].get<double>() <= 1.0);

  const std::vector<std::string> m{"unitary-mc", "--gamma", "1,-0.3333333333", "--theta", "6", "--ell",
                                   "12",         "--sweeps", "4000", "--seed", "5"};
  const Result c = call(m), d = call(m);
  REQUIRE(c.code == 0);
  CHECK(c.out == d.out);
  const double acc = json::parse(c.out)["acceptance_rate"];
  CHECK(acc > 0.0);
  CHECK(acc < 1.0);
}

TEST_CASE("converge reports distances per theta") {
  const Result r = call({"converge", "--gamma", "1", "--thetas", "10,20", "--power", "auto"});
  REQUIRE(r.code == 0);
  const json j = json::parse(r.out);
  CHECK(j["sup_distance"].size() == 2);
  CHECK(j["power"].get<int>() == 1);
  CHECK(j.contains("strictly_decreasing"));
}

TEST_CASE("installed binary reports exit codes and honours SPLITSEA_THREADS") {
  const std::string bin = SPLITSEA_BINARY;
  auto status = [](const std::string &cmd) {
    const int raw = std::system((cmd + " >/dev/null 2>&1").c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  };
  CHECK(status(bin + " analyze --gamma 1 --json") == 0);
  CHECK(status(bin + " analyze --gamma ''") == 2);
  CHECK(status(bin + " unitary-density --gamma 1 --x 0.5") == 3);
  CHECK(status("SPLITSEA_THREADS=2 " + bin + " --threads 1 airy --s=-1:1:0.5") == 0);
  CHECK(status(bin + " --help") == 0);
}
