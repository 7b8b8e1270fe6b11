#include <doctest.h>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <json.hpp>

#include "relaysec/cli.hpp"

using namespace relaysec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run run(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli_dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string config(const std::string& name) { return (fs::path(RELAYSEC_CONFIG_DIR) / name).string(); }

fs::path scratch() {
  const fs::path dir = fs::temp_directory_path() / "relaysec_cli_test";
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p, std::ios::binary) << s; }

}  // namespace

TEST_CASE("rate prints the hand-evaluated value") {
  const Run r = run({"rate", "--config", config("rate_hd_naive.json")});
  CHECK(r.code == 0);
  CHECK(r.out == "1.3219\n");

  const Run j = run({"rate", "--config", config("rate_hd_naive.json"), "--format", "json"});
  CHECK(j.code == 0);
  const auto parsed = nlohmann::json::parse(j.out);
  CHECK(parsed["total"].get<double>() == doctest::Approx(1.32192809488736));
  CHECK(parsed["scenario"] == "SR1");

  const fs::path out = scratch() / "rate.json";
  const Run f = run({"rate", "--config", config("rate_hd_naive.json"), "--out", out.string()});
  CHECK(f.out == "1.3219\n");
  CHECK(nlohmann::json::parse(slurp(out))["total"].get<double>() == doctest::Approx(1.32192809488736));
}

TEST_CASE("usage errors exit with 2") {
  const Run unknown = run({"rate", "--bogus"});
  CHECK(unknown.code == 2);
  CHECK(unknown.err.find("error:") != std::string::npos);
  CHECK(unknown.err.find("Usage") != std::string::npos);
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"sweep", "--scenario", "sr7"}).code == 2);
  CHECK(run({"sweep", "--format", "xml"}).code == 2);
  CHECK(run({"rate", "--config", "/nonexistent.json"}).code == 2);
  CHECK(run({"sweep", "--trials", "0"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("config errors exit with 2") {
  const fs::path dir = scratch();
  write(dir / "broken.json", "{not json");
  CHECK(run({"rate", "--config", (dir / "broken.json").string()}).code == 2);
  write(dir / "bad_ratio.json", R"({"ratios": [3.0], "trials": 1, "K": 1, "optimize": false})");
  const Run r = run({"sweep", "--config", (dir / "bad_ratio.json").string()});
  CHECK(r.code == 2);
  CHECK(r.err.find("InfeasibleGeometry") != std::string::npos);
  write(dir / "no_anchor.json", R"({"ps_max_sweep": [1, 2], "trials": 1, "K": 1, "optimize": false})");
  CHECK(run({"power-sweep", "--config", (dir / "no_anchor.json").string()}).code == 2);
  write(dir / "no_alloc.json", R"({"channel_file": ")" + config("channel_k1.json") + R"("})");
  CHECK(run({"rate", "--config", (dir / "no_alloc.json").string()}).code == 2);
}

TEST_CASE("sweep output is byte-identical across runs and thread counts") {
  const fs::path dir = scratch();
  write(dir / "small.json",
        R"({"ratios": [0.5, 1.1], "rhos": [0.01, 0.6], "trials": 3, "K": 4, "seed": 1, "optimize": true})");
  const std::string cfg = (dir / "small.json").string();
  const fs::path a = dir / "a.csv", b = dir / "b.csv", c = dir / "c.csv";
  ::setenv("RELAYSEC_THREADS", "1", 1);
  CHECK(run({"sweep", "--config", cfg, "--seed", "42", "--out", a.string()}).code == 0);
  CHECK(run({"sweep", "--config", cfg, "--seed", "42", "--out", b.string()}).code == 0);
  ::setenv("RELAYSEC_THREADS", "4", 1);
  CHECK(run({"sweep", "--config", cfg, "--seed", "42", "--out", c.string()}).code == 0);
  ::unsetenv("RELAYSEC_THREADS");
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  CHECK(text == slurp(c));
  CHECK(text.rfind("ratio,rho,psmax,scenario,mean_rate,std_rate,eta_s,trials,seed\n", 0) == 0);
  CHECK(std::count(text.begin(), text.end(), '\n') == 1 + 2 * 2 * 4);
  CHECK(text.find(",42\n") != std::string::npos);

  const Run other = run({"sweep", "--config", cfg, "--seed", "43", "--format", "csv"});
  CHECK(other.code == 0);
  CHECK(other.out != text);
}

TEST_CASE("overrides") {
  const fs::path dir = scratch();
  write(dir / "tiny.json", R"({"ratios": [1.0], "rhos": [0.1], "trials": 5, "K": 2, "optimize": true})");
  const Run r = run({"sweep", "--config", (dir / "tiny.json").string(), "--trials", "2", "--scenario", "SR3",
                     "--no-optimize", "--format", "json"});
  REQUIRE(r.code == 0);
  const auto rows = nlohmann::json::parse(r.out);
  REQUIRE(rows.size() == 1);
  CHECK(rows[0]["scenario"] == "SR3");
  CHECK(rows[0]["trials"] == 2);

  const Run p = run({"power-sweep", "--config", (dir / "tiny.json").string(), "--no-optimize", "--format", "csv"});
  REQUIRE(p.code == 0);
  CHECK(p.out.find(",5,SR3,") != std::string::npos);
}

TEST_CASE("optimize, oracle, conditions and channel sampling") {
  const Run o = run({"optimize", "--config", config("optimize_k4.json")});
  CHECK(o.code == 0);
  const auto sol = nlohmann::json::parse(o.out);
  CHECK(sol["converged"] == true);
  CHECK(sol["traces"].size() == 5);
  CHECK(sol["traces"][0]["iterates"].size() >= 1);

  const Run v = run({"validate-oracle", "--config", config("oracle_k1.json")});
  CHECK(v.code == 0);
  const auto verdicts = nlohmann::json::parse(v.out);
  REQUIRE(verdicts.size() == 2);
  CHECK(verdicts[0]["pass"] == true);

  const Run c = run({"check-conditions", "--config", config("instance.json")});
  CHECK(c.code == 0);
  const auto cond = nlohmann::json::parse(c.out);
  CHECK(cond["C11"] == true);
  CHECK(cond["approx_rates"]["SR3"].get<double>() == doctest::Approx(3.0));

  const Run s = run({"sample-channels", "--config", config("scenario.json"), "--trials", "3"});
  CHECK(s.code == 0);
  const auto ch = nlohmann::json::parse(s.out);
  CHECK(ch["realizations"].size() == 3);
  CHECK(ch["realizations"][0]["h_sr"].size() == 16);
}

TEST_CASE("non-convergence exits with 3 and still writes output") {
  const fs::path dir = scratch();
  const auto base = nlohmann::json::parse(slurp(config("optimize_k4.json")));
  auto capped = base;
  capped["dc"]["max_outer_iters"] = 1;
  capped["dc"]["epsilon"] = 1e-12;
  write(dir / "capped.json", capped.dump());
  const fs::path out = dir / "capped_out.json";
  fs::remove(out);
  const Run r = run({"optimize", "--config", (dir / "capped.json").string(), "--out", out.string()});
  CHECK(r.code == 3);
  CHECK(nlohmann::json::parse(slurp(out))["converged"] == false);
}
