#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include <json.hpp>

#include "crossdiff/cli.hpp"
#include "crossdiff/config.hpp"
#include "crossdiff/error.hpp"

using namespace crossdiff;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json witness_doc(double d12) {
  return {{"schema_version", 1},
          {"model", {{"variant", "skt_plus_limit"}}},
          {"reaction",
           {{"r_u", 3}, {"r_v", 1}, {"r11", 4}, {"r12", 1}, {"r21", 1}, {"r22", 1},
            {"d_u", 1}, {"d_v", 1}, {"d12", d12}}},
          {"rates", {{"family", "skt_linear"}, {"M", 1}}},
          {"grid", {{"L", 10}, {"N", 32}}},
          {"time", {{"t_end", 5}, {"scheme", "rkc2"}, {"dt_max", 0.05}}}};
}

struct Sandbox {
  fs::path root;
  Sandbox() {
    root = fs::temp_directory_path() / ("crossdiff_cli_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
  }
  ~Sandbox() { fs::remove_all(root); }

  fs::path write(const std::string& name, const json& doc) const {
    const fs::path p = root / name;
    std::ofstream(p) << doc.dump(2);
    return p;
  }
};

struct Outcome {
  CommandResult result;
  std::string out, err;
};

Outcome run(const Sandbox& sb, const std::string& command, std::optional<json> doc,
            CliOptions extra = {}) {
  CliOptions o = std::move(extra);
  o.command = command;
  o.out = sb.root / "runs";
  if (doc) o.config = sb.write(command + "_cfg.json", *doc);
  std::ostringstream out, err;
  Outcome r{run_command(o, out, err), out.str(), err.str()};
  return r;
}

json read_json(const fs::path& p) {
  std::ifstream in(p);
  return json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("analyze") {
  Sandbox sb;
  auto r = run(sb, "analyze", witness_doc(0));
  REQUIRE(r.result.exit_code == 0);
  auto rep = read_json(r.result.directory / "kinetics.json");
  CHECK(rep["regime"] == "Weak");
  CHECK(rep["equilibria"].size() == 4);
  for (const auto& e : rep["equilibria"]) {
    CHECK(e["stability"] == (e["kind"] == "Coexistence" ? "Stable" : "Unstable"));
  }

  json strong = witness_doc(0);
  strong["reaction"] = {{"r_u", 1}, {"r_v", 1}, {"r11", 1}, {"r12", 2}, {"r21", 2}, {"r22", 1}};
  auto s = run(sb, "analyze", strong);
  REQUIRE(s.result.exit_code == 0);
  for (const auto& e : read_json(s.result.directory / "kinetics.json")["equilibria"]) {
    if (e["kind"] == "Coexistence") CHECK(e["stability"] == "Unstable");
  }

  json degenerate = witness_doc(0);
  degenerate["reaction"] = {{"r_u", 1}, {"r_v", 1}, {"r11", 1}, {"r12", 1}, {"r21", 1}, {"r22", 1}};
  auto d = run(sb, "analyze", degenerate);
  CHECK(d.result.exit_code == kExitConfig);
  CHECK(d.err.find("no_coexistence") != std::string::npos);
}

TEST_CASE("threshold") {
  Sandbox sb;
  auto r = run(sb, "threshold", witness_doc(150));
  REQUIRE(r.result.exit_code == 0);
  auto rep = read_json(r.result.directory / "threshold.json");
  CHECK(rep["d12_plus"].get<double>() == doctest::Approx(63 + 24 * std::sqrt(6.0)).epsilon(1e-10));
  CHECK(rep["unstable_at_d12"] == true);

  json hiding = witness_doc(0.5);
  hiding["model"]["variant"] = "skt_minus_limit";
  auto h = run(sb, "threshold", hiding);
  REQUIRE(h.result.exit_code == 0);
  auto hr = read_json(h.result.directory / "threshold.json");
  CHECK(hr["verdict"] == "AlwaysStable");
  CHECK(hr["reason"] == "hiding_no_turing");

  json flat = witness_doc(150);
  flat["rates"] = {{"family", "custom"}, {"w", {0, 1, 10}}, {"h", {0.5, 0.5, 0.5}},
                   {"k", {0.5, 0.5, 0.5}}};
  auto f = run(sb, "threshold", flat);
  REQUIRE(f.result.exit_code == 0);
  auto fr = read_json(f.result.directory / "threshold.json");
  CHECK(fr["turing_possible"] == false);
  CHECK(fr["reason"] == "alpha_nonpositive");

  json bad = witness_doc(1.0);
  bad["model"]["variant"] = "skt_minus_limit";
  CHECK(run(sb, "threshold", bad).result.exit_code == kExitConfig);
}

TEST_CASE("dispersion") {
  Sandbox sb;
  auto r = run(sb, "dispersion", witness_doc(150));
  REQUIRE(r.result.exit_code == 0);
  auto rep = read_json(r.result.directory / "dispersion.json");
  CHECK(rep["band"]["lambda_lo"].get<double>() == doctest::Approx(0.0641).epsilon(1e-3));
  CHECK(rep["unstable_modes"] == json::array({1}));
  const std::string csv = slurp(r.result.directory / "dispersion.csv");
  CHECK(csv.rfind("lambda,mode_det,growth_rate\n", 0) == 0);

  auto none = run(sb, "dispersion", witness_doc(100));
  REQUIRE(none.result.exit_code == 0);
  CHECK(read_json(none.result.directory / "dispersion.json")["band"].is_null());
}

TEST_CASE("simulate and determinism") {
  Sandbox sb;
  json doc = witness_doc(150);
  doc["perturbation"] = {{"kind", "noise"}, {"amplitude", 1e-2}};
  doc["seed"] = 11;
  auto a = run(sb, "simulate", doc);
  REQUIRE(a.result.exit_code == 0);
  const std::string first = slurp(a.result.directory / "trajectory.csv");
  auto man = read_json(a.result.directory / "manifest.json");
  CHECK(man["config"]["seed"] == 11);
  CHECK(man["result"].contains("final_amplitude"));
  fs::remove_all(a.result.directory);

  auto b = run(sb, "simulate", doc);
  REQUIRE(b.result.exit_code == 0);
  CHECK(b.result.directory == a.result.directory);
  CHECK(slurp(b.result.directory / "trajectory.csv") == first);

  CliOptions seeded;
  seeded.seed = 12;
  auto c = run(sb, "simulate", doc, seeded);
  REQUIRE(c.result.exit_code == 0);
  CHECK(c.result.directory != a.result.directory);
  CHECK(slurp(c.result.directory / "trajectory.csv") != first);

  const std::string header = first.substr(0, first.find('\n'));
  CHECK(header == "t,x,u,v");
}

TEST_CASE("sweep") {
  Sandbox sb;
  json doc = witness_doc(150);
  doc["model"] = {{"variant", "skt_fast_plus"}, {"epsilon", 0.01}};
  doc["rates"]["M"] = 1.1;
  doc["time"]["t_end"] = 2;
  doc["time"]["dt_max"] = 0.01;
  doc["perturbation"] = {{"amplitude", 0.1}};
  CliOptions eps;
  eps.epsilons = {0.1, 0.01};
  auto r = run(sb, "sweep", doc, eps);
  REQUIRE(r.result.exit_code == 0);
  auto man = read_json(r.result.directory / "manifest.json");
  CHECK(man["result"]["epsilon"]["strictly_decreasing"] == true);

  CliOptions d12;
  d12.d12 = {121.0, 121.8, 150.0};
  auto s = run(sb, "sweep", witness_doc(0), d12);
  REQUIRE(s.result.exit_code == 0);
  const std::string csv = slurp(s.result.directory / "sweep_d12.csv");
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 4);

  CHECK(run(sb, "sweep", witness_doc(0)).result.exit_code == kExitConfig);
  CliOptions bad;
  bad.epsilons = {0.01, 0.1};
  CHECK(run(sb, "sweep", doc, bad).result.exit_code == kExitConfig);
}

TEST_CASE("classify") {
  Sandbox sb;
  CliOptions o;
  o.signs = "-,-,-,-";
  o.d2_sign = "+";
  auto r = run(sb, "classify", std::nullopt, o);
  REQUIRE(r.result.exit_code == 0);
  auto rep = read_json(r.result.directory / "classification.json");
  CHECK(rep["category"] == "NonActivatorInhibitor");
  CHECK(rep["verdict"] == "RequiredIncreasing");

  o.signs = "+1,+1,-1,-1";
  o.d2_sign = "-";
  auto ai = run(sb, "classify", std::nullopt, o);
  CHECK(read_json(ai.result.directory / "classification.json")["verdict"] == "Reduces");

  o.signs = "0,+,+,+";
  CHECK(run(sb, "classify", std::nullopt, o).result.exit_code == kExitConfig);
  o.signs = "+,+,+";
  CHECK(run(sb, "classify", std::nullopt, o).result.exit_code == kExitConfig);
}

TEST_CASE("config validation") {
  Sandbox sb;
  json doc = witness_doc(0);
  doc["reaction"]["r_u"] = -1;
  CHECK(run(sb, "analyze", doc).result.exit_code == kExitConfig);

  json typo = witness_doc(0);
  typo["grid"]["n"] = 64;
  auto t = run(sb, "analyze", typo);
  CHECK(t.result.exit_code == kExitConfig);
  CHECK(t.err.find("unknown_key") != std::string::npos);

  json ver = witness_doc(0);
  ver["schema_version"] = 2;
  CHECK(run(sb, "analyze", ver).result.exit_code == kExitConfig);

  json fast = witness_doc(0);
  fast["model"] = {{"variant", "skt_fast_plus"}, {"epsilon", -1}};
  CHECK(run(sb, "analyze", fast).result.exit_code == kExitConfig);

  json grid = witness_doc(0);
  grid["grid"]["N"] = 4;
  CHECK(run(sb, "simulate", grid).result.exit_code == kExitConfig);

  CHECK(run(sb, "bogus", witness_doc(0)).result.exit_code == kExitConfig);

  // A resolved config round-trips to the same hash.
  const RunConfig cfg = parse_config(witness_doc(150));
  const json resolved = to_json(cfg);
  CHECK(content_hash(to_json(parse_config(resolved))) == content_hash(resolved));
  CHECK(resolved["rates"]["family"] == "skt_linear");
}

TEST_CASE("numerical failure maps to exit 3") {
  Sandbox sb;
  json doc = witness_doc(1);
  doc["rates"] = {{"family", "custom"}, {"w", {0, 0.34}}, {"h", {0.5, 0.6}}, {"k", {0.5, 0.4}}};
  doc["perturbation"] = {{"amplitude", 0.5}, {"field", "v"}};
  auto r = run(sb, "simulate", doc);
  CHECK(r.result.exit_code == kExitNumerical);
  CHECK(r.err.find("rate_domain") != std::string::npos);
}
