#include "matherkit/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <variant>

#include "json.hpp"

namespace matherkit {

namespace {
using nlohmann::json;

void expect_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  for (const auto& [key, value] : obj.items()) {
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
  }
}

double number(const json& v, const std::string& name) {
  if (!v.is_number()) throw ConfigError(name + " must be a number");
  return v.get<double>();
}

int integer(const json& v, const std::string& name) {
  if (!v.is_number_integer()) throw ConfigError(name + " must be an integer");
  return v.get<int>();
}

PeriodicFunction parse_function(const json& v, const std::string& name) {
  if (v.is_null()) return PeriodicFunction::zero();
  if (!v.is_object()) throw ConfigError(name + " must be an object or null");
  expect_keys(v, {"kind", "coefficients"}, name);
  if (!v.contains("kind") || !v["kind"].is_string()) throw ConfigError(name + ".kind is required");
  const std::string kind = v["kind"].get<std::string>();
  if (kind == "pendulum") return PeriodicFunction::pendulum();
  if (kind == "free") return PeriodicFunction::zero();
  if (kind != "fourier") throw ConfigError(name + ".kind must be pendulum, free or fourier");
  if (!v.contains("coefficients") || !v["coefficients"].is_array()) {
    throw ConfigError(name + ".coefficients must be a list of [a_k, b_k] pairs");
  }
  std::vector<std::pair<double, double>> coeffs;
  for (const auto& pair : v["coefficients"]) {
    if (!pair.is_array() || pair.size() != 2) {
      throw ConfigError(name + ".coefficients must be a list of [a_k, b_k] pairs");
    }
    coeffs.emplace_back(number(pair[0], name + ".coefficients"),
                        number(pair[1], name + ".coefficients"));
  }
  return PeriodicFunction::fourier(std::move(coeffs));
}

LagrangianSpec parse_lagrangian_object(const json& doc) {
  LagrangianSpec spec = LagrangianSpec::pendulum();
  if (doc.contains("mass")) spec.mass = number(doc["mass"], "mass");
  if (doc.contains("potential")) spec.potential = parse_function(doc["potential"], "potential");
  if (doc.contains("perturbation")) {
    spec.perturbation = parse_function(doc["perturbation"], "perturbation");
  }
  try {
    spec.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

json parse_text(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed JSON: ") + e.what());
  }
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json function_json(const PeriodicFunction& f) {
  if (f.is_zero()) return nullptr;
  json terms = json::array();
  for (const auto& term : f.terms()) {
    if (const auto* fourier = std::get_if<PeriodicFunction::Fourier>(&term)) {
      json coeffs = json::array();
      for (const auto& [a, b] : fourier->coefficients) coeffs.push_back({a, b});
      terms.push_back({{"kind", "fourier"}, {"coefficients", coeffs}});
    } else {
      const auto& bump = std::get<PeriodicFunction::Bump>(term);
      json arcs = json::array();
      for (const auto& arc : bump.arcs) arcs.push_back({arc.lo, arc.hi});
      terms.push_back({{"kind", "bump"},
                       {"amplitude", bump.amplitude},
                       {"width", bump.width},
                       {"arcs", arcs}});
    }
  }
  if (terms.size() == 1) return terms[0];
  return {{"kind", "sum"}, {"terms", terms}};
}

}  // namespace

void RunConfig::validate() const {
  if (!(tolerances.eps_pot > 0.0) || !(tolerances.alpha_tol > 0.0) ||
      !(tolerances.lp_feas > 0.0)) {
    throw ConfigError("tolerances must be positive");
  }
  try {
    spec.validate();
    grid.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

LagrangianSpec parse_lagrangian(std::string_view json_text) {
  const json doc = parse_text(json_text);
  if (!doc.is_object()) throw ConfigError("Lagrangian document must be an object");
  expect_keys(doc, {"mass", "potential", "perturbation"}, "Lagrangian document");
  return parse_lagrangian_object(doc);
}

RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir) {
  const json doc = parse_text(json_text);
  if (!doc.is_object()) throw ConfigError("config must be a JSON object");
  expect_keys(doc,
              {"spec", "spec_source", "mass", "potential", "perturbation", "grid", "tolerances", "seed",
               "output"},
              "config");
  RunConfig cfg;
  if (doc.contains("spec")) {
    if (doc.contains("mass") || doc.contains("potential") || doc.contains("perturbation")) {
      throw ConfigError("give either \"spec\" or inline mass/potential/perturbation, not both");
    }
    const json& s = doc["spec"];
    if (s.is_string()) {
      std::filesystem::path p = s.get<std::string>();
      if (p.is_relative() && !base_dir.empty()) p = base_dir / p;
      cfg.spec = parse_lagrangian(read_file(p));
      cfg.spec_source = p.string();
    } else if (s.is_object()) {
      expect_keys(s, {"mass", "potential", "perturbation"}, "spec");
      cfg.spec = parse_lagrangian_object(s);
    } else {
      throw ConfigError("spec must be a path or an object");
    }
  } else {
    cfg.spec = parse_lagrangian_object(doc);
  }

  if (doc.contains("grid")) {
    const json& g = doc["grid"];
    if (!g.is_object()) throw ConfigError("grid must be an object");
    expect_keys(g, {"nx", "nv", "vmax", "tau", "lift_window"}, "grid");
    if (g.contains("nx")) cfg.grid.nx = integer(g["nx"], "grid.nx");
    if (g.contains("nv")) cfg.grid.nv = integer(g["nv"], "grid.nv");
    if (g.contains("vmax")) cfg.grid.v_max = number(g["vmax"], "grid.vmax");
    if (g.contains("tau")) cfg.grid.tau = number(g["tau"], "grid.tau");
    if (g.contains("lift_window")) cfg.grid.lift_window = integer(g["lift_window"], "grid.lift_window");
  }
  if (doc.contains("tolerances")) {
    const json& t = doc["tolerances"];
    if (!t.is_object()) throw ConfigError("tolerances must be an object");
    expect_keys(t, {"eps_pot", "alpha_tol", "lp_feas"}, "tolerances");
    if (t.contains("eps_pot")) cfg.tolerances.eps_pot = number(t["eps_pot"], "tolerances.eps_pot");
    if (t.contains("alpha_tol")) {
      cfg.tolerances.alpha_tol = number(t["alpha_tol"], "tolerances.alpha_tol");
    }
    if (t.contains("lp_feas")) cfg.tolerances.lp_feas = number(t["lp_feas"], "tolerances.lp_feas");
  }
  if (doc.contains("seed")) {
    if (!doc["seed"].is_number_unsigned()) throw ConfigError("seed must be a non-negative integer");
    cfg.seed = doc["seed"].get<std::uint64_t>();
  }
  if (doc.contains("output")) {
    if (!doc["output"].is_string()) throw ConfigError("output must be a string");
    cfg.output = doc["output"].get<std::string>();
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::filesystem::path& path) {
  return parse_config(read_file(path), path.parent_path());
}

std::string config_json(const RunConfig& config, int indent) {
  json doc;
  doc["spec_source"] = config.spec_source;
  doc["mass"] = config.spec.mass;
  doc["potential"] = function_json(config.spec.potential);
  doc["perturbation"] = function_json(config.spec.perturbation);
  doc["grid"] = {{"nx", config.grid.nx},
                 {"nv", config.grid.nv},
                 {"vmax", config.grid.v_max},
                 {"tau", config.grid.tau},
                 {"lift_window", config.grid.lift_window}};
  doc["tolerances"] = {{"eps_pot", config.tolerances.eps_pot},
                       {"alpha_tol", config.tolerances.alpha_tol},
                       {"lp_feas", config.tolerances.lp_feas}};
  doc["seed"] = config.seed;
  doc["output"] = config.output;
  return doc.dump(indent);
}

PipelineOptions pipeline_options(const RunConfig& config) {
  PipelineOptions opt;
  opt.eps_pot = config.tolerances.eps_pot;
  opt.lax.tol = config.tolerances.alpha_tol;
  opt.lp.simplex.feasibility_tol = config.tolerances.lp_feas;
  // Coarse grids cannot carry the default number of closedness modes.
  opt.lp.fourier_order = std::min(opt.lp.fourier_order, config.grid.nx / 2 - 1);
  return opt;
}

}  // namespace matherkit
