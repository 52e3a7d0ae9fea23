#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cli.hpp"
#include "doctest.h"
#include "json.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

const std::string kPendulum = std::string(MATHERKIT_CONFIG_DIR) + "/pendulum.json";

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  std::ostringstream out, err;
  const int code = matherkit::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "matherkit_cli_test" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("usage errors exit with 1") {
  CHECK(run({}).code == 1);
  CHECK(run({"bogus"}).code == 1);
  CHECK(run({"alpha", "--c", "0"}).code == 1);
  CHECK(run({"alpha", "--config", "/nonexistent.json", "--c", "0"}).code == 1);
  CHECK(run({"alpha", "--config", kPendulum, "--c", "0", "--method", "simplex"}).code == 1);
  CHECK(run({"scan", "--config", kPendulum, "--c-range", "0:1"}).code == 1);
  CHECK(run({"beta", "--config", kPendulum, "--h", "0", "--c-range", "0:1:1"}).code == 1);
  CHECK(run({"alpha", "--config", kPendulum, "--c", "0", "--nx", "1"}).code == 1);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("alpha on the flat") {
  const Run r = run({"alpha", "--config", kPendulum, "--c", "0", "--method", "both"});
  REQUIRE(r.code == 0);
  const json doc = json::parse(r.out);
  REQUIRE(doc["results"].size() == 2);
  for (const auto& res : doc["results"]) CHECK(std::abs(res["alpha"].get<double>()) <= 1e-2);
  CHECK(doc["config"]["grid"]["nx"] == 256);
  CHECK(doc["config"]["seed"] == 20240601);
}

TEST_CASE("flags override the config") {
  const fs::path dir = scratch("alpha");
  const Run r = run({"alpha", "--config", kPendulum, "--c", "1.5", "--method", "lax", "--nx", "64",
                     "--nv", "33", "--seed", "9", "--out", (dir / "a.json").string()});
  REQUIRE(r.code == 0);
  const json doc = json::parse(slurp(dir / "a.json"));
  CHECK(doc["config"]["grid"]["nx"] == 64);
  CHECK(doc["config"]["grid"]["nv"] == 33);
  CHECK(doc["config"]["seed"] == 9);
  CHECK(doc["method"] == "lax_oleinik");
}

TEST_CASE("sets at the flat edge writes three clouds and a summary") {
  const fs::path dir = scratch("sets");
  const Run r = run({"sets", "--config", kPendulum, "--c", "1.2732", "--out", dir.string()});
  CHECK(r.code == 0);
  for (const char* name : {"mather.csv", "aubry.csv", "mane.csv", "summary.json"})
    CHECK(fs::exists(dir / name));
  CHECK(slurp(dir / "aubry.csv").rfind("x,v\n", 0) == 0);
  const json summary = json::parse(slurp(dir / "summary.json"));
  CHECK(summary.contains("config"));
  CHECK(summary.contains("tolerances"));
  CHECK(summary["graph_report"]["passed"] == true);
  CHECK(summary["d_H_MA"].get<double>() > 3.0);
}

TEST_CASE("potential and beta reports") {
  const fs::path dir = scratch("potential");
  const Run p = run({"potential", "--config", kPendulum, "--c", "0", "--kind", "barrier", "--nx", "64",
                     "--nv", "33", "--out", (dir / "b.csv").string()});
  CHECK(p.code == 0);
  const std::string csv = slurp(dir / "b.csv");
  CHECK(csv.rfind("i,j,x_i,x_j,value\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 1 + 64 * 64);

  const Run b = run({"beta", "--config", kPendulum, "--h", "0", "--c-range", "-2:2:9", "--nx", "64",
                     "--nv", "33"});
  CHECK(b.code == 0);
  CHECK(std::abs(json::parse(b.out)["beta"].get<double>()) <= 1e-2);
}

TEST_CASE("scan output is byte-identical across runs and thread counts") {
  const fs::path dir = scratch("scan");
  const std::vector<std::string> common{"scan",  "--config", kPendulum, "--c-range", "-1.5:1.5:4",
                                        "--nx",  "64",       "--nv",    "33"};
  auto with_out = [&](const std::string& name) {
    auto args = common;
    args.push_back("--out");
    args.push_back((dir / name).string());
    return args;
  };
  setenv("MATHERKIT_THREADS", "1", 1);
  CHECK(run(with_out("a.csv")).code == 0);
  setenv("MATHERKIT_THREADS", "3", 1);
  CHECK(run(with_out("b.csv")).code == 0);
  unsetenv("MATHERKIT_THREADS");
  CHECK(run(with_out("c.csv")).code == 0);
  const std::string a = slurp(dir / "a.csv");
  CHECK(a.rfind("c,alpha,alpha_lp,d_H_mather_aubry,d_H_aubry_mane,measure_support_size,flags\n", 0) == 0);
  CHECK(std::count(a.begin(), a.end(), '\n') == 5);
  CHECK(a == slurp(dir / "b.csv"));
  CHECK(a == slurp(dir / "c.csv"));
}

TEST_CASE("flat and semicontinuity reports embed the config") {
  const Run f = run({"flat", "--config", kPendulum, "--c", "0", "--probes", "6", "--nx", "64",
                     "--nv", "33"});
  CHECK(f.code == 0);
  const json fd = json::parse(f.out);
  CHECK(fd.contains("config"));
  CHECK(fd["seed"] == 20240601);
  CHECK(fd["probes"].size() >= 6);

  const Run s = run({"semicont", "--config", kPendulum, "--c", "0", "--mode", "perturbation",
                     "--levels", "2", "--nx", "64", "--nv", "33"});
  CHECK(s.code == 0);
  const json sd = json::parse(s.out);
  CHECK(sd["rows"].size() == 2);
  CHECK(sd.contains("config"));
}
