#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "matherkit/config.hpp"
#include "matherkit/report_io.hpp"

using namespace matherkit;
using nlohmann::json;

TEST_CASE("defaults") {
  const RunConfig cfg = parse_config("{}");
  CHECK(cfg.grid.nx == 256);
  CHECK(cfg.grid.nv == 129);
  CHECK(cfg.grid.v_max == 4.0);
  CHECK(cfg.grid.tau == 0.2);
  CHECK(cfg.grid.lift_window == 1);
  CHECK(cfg.tolerances.eps_pot == 0.05);
  CHECK(cfg.seed == 20240601u);
  CHECK(cfg.spec.potential.value(1.0) == doctest::Approx(std::cos(1.0) - 1.0));
  const PipelineOptions opt = pipeline_options(cfg);
  CHECK(opt.calibration_epsilon() == doctest::Approx(0.15));
  CHECK(opt.lp.fourier_order == 32);
}

TEST_CASE("inline Lagrangians and overrides") {
  const RunConfig cfg = parse_config(R"({
    "mass": 2.0,
    "potential": {"kind": "fourier", "coefficients": [[0.5, 0], [0, 0.25]]},
    "perturbation": null,
    "grid": {"nx": 64, "nv": 33, "vmax": 3.0, "tau": 0.1, "lift_window": 2},
    "tolerances": {"eps_pot": 0.1},
    "seed": 5,
    "output": "elsewhere"
  })");
  CHECK(cfg.spec.mass == 2.0);
  CHECK(cfg.spec.potential.value(0.3) == doctest::Approx(0.5 + 0.25 * std::sin(0.3)));
  CHECK(cfg.grid.nx == 64);
  CHECK(cfg.grid.lift_window == 2);
  CHECK(cfg.tolerances.eps_pot == 0.1);
  CHECK(cfg.tolerances.alpha_tol == 1e-6);
  CHECK(cfg.output == "elsewhere");
  // Coarse grids clamp the closedness order below nx / 2.
  CHECK(pipeline_options(cfg).lp.fourier_order == 31);
  CHECK(parse_config(R"({"potential": {"kind": "free"}})").spec.potential.is_zero());
}

TEST_CASE("spec files resolve relative to the config") {
  const auto dir = std::filesystem::temp_directory_path() / "matherkit_config_test";
  std::filesystem::create_directories(dir);
  {
    std::ofstream(dir / "free.json") << R"({"potential": {"kind": "free"}, "mass": 1.5})";
    std::ofstream(dir / "run.json") << R"({"spec": "free.json", "grid": {"nx": 32}})";
  }
  const RunConfig cfg = load_config(dir / "run.json");
  CHECK(cfg.spec.mass == 1.5);
  CHECK(cfg.spec.potential.is_zero());
  CHECK(cfg.spec_source.find("free.json") != std::string::npos);
  const RunConfig obj = parse_config(R"({"spec": {"potential": {"kind": "free"}}})");
  CHECK(obj.spec.potential.is_zero());
  std::filesystem::remove_all(dir);
}

TEST_CASE("malformed configs are rejected") {
  CHECK_THROWS_AS(parse_config("{"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"colour": 1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"nx": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"nx": 12.5}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"grid": {"speed": 1}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"mass": -1})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"tolerances": {"eps_pot": 0}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"seed": -3})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"potential": {"kind": "quartic"}})"), ConfigError);
  CHECK_THROWS_AS(parse_config(R"({"spec": {}, "mass": 1})"), ConfigError);
  CHECK_THROWS_AS(load_config("/nonexistent/run.json"), ConfigError);
  CHECK_THROWS_AS(parse_lagrangian(R"({"grid": {}})"), ConfigError);
}

TEST_CASE("resolved config round-trips") {
  const RunConfig cfg = parse_config(R"({"grid": {"nx": 96}, "seed": 77})");
  const std::string text = config_json(cfg);
  const json doc = json::parse(text);
  CHECK(doc["grid"]["nx"] == 96);
  CHECK(doc["seed"] == 77);
  CHECK(doc.contains("tolerances"));
  const RunConfig again = parse_config(text);
  CHECK(again.grid.nx == 96);
  CHECK(again.seed == 77u);
  CHECK(again.spec.potential.value(2.0) == doctest::Approx(cfg.spec.potential.value(2.0)));
  CHECK(config_json(again) == text);
}

TEST_CASE("number formatting") {
  CHECK(format_number(0.0) == "0");
  CHECK(format_number(1.5) == "1.5");
  CHECK(format_number(-2.0) == "-2");
  CHECK(format_number(1.0 / 3.0) == "0.333333333333");
  CHECK(format_number(1e-20) == "1e-20");
  CHECK(format_number(NAN) == "nan");
  CHECK(format_number(INFINITY) == "inf");
  CHECK(format_number(-INFINITY) == "-inf");
}

TEST_CASE("csv writers") {
  PointCloud cloud;
  cloud.points = {{0.0, 1.0}, {3.25, -0.5}};
  std::ostringstream c;
  write_cloud_csv(c, cloud);
  CHECK(c.str() == "x,v\n0,1\n3.25,-0.5\n");

  ScanRow row;
  row.c = 0.5;
  row.alpha = 0.0;
  row.alpha_lp = NAN;
  row.d_H_mather_aubry = 1.25;
  row.d_H_aubry_mane = 0.125;
  row.measure_support_size = 3;
  row.flags = {"lp_failed: a, b", "mane_empty"};
  std::ostringstream s;
  write_scan_csv(s, {row});
  CHECK(s.str() ==
        "c,alpha,alpha_lp,d_H_mather_aubry,d_H_aubry_mane,measure_support_size,flags\n"
        "0.5,0,nan,1.25,0.125,3,lp_failed: a  b;mane_empty\n");

  const auto path = std::filesystem::temp_directory_path() / "matherkit_io_test" / "a" / "b.txt";
  write_text_file(path, "hello\n");
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "hello");
  std::filesystem::remove_all(path.parent_path().parent_path());
}
