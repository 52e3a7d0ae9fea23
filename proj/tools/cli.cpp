#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "matherkit/config.hpp"
#include "matherkit/critical.hpp"
#include "matherkit/experiments.hpp"
#include "matherkit/potential.hpp"
#include "matherkit/report_io.hpp"
#include "matherkit/sets.hpp"

namespace matherkit::cli {

namespace {
using nlohmann::json;
namespace fs = std::filesystem;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Flag values; unset optionals leave the config value alone.
struct Common {
  std::string config_path;
  std::string out;
  std::optional<int> nx, nv, lift_window;
  std::optional<double> vmax, tau, eps_pot, alpha_tol, lp_feas;
  std::optional<std::uint64_t> seed;
};

void add_common(CLI::App& sub, Common& c) {
  sub.add_option("--config", c.config_path, "JSON run configuration")->required();
  sub.add_option("--nx", c.nx, "positions");
  sub.add_option("--nv", c.nv, "velocities");
  sub.add_option("--vmax", c.vmax, "velocity box half-width");
  sub.add_option("--tau", c.tau, "kernel time step");
  sub.add_option("--lift-window", c.lift_window, "windings per kernel step");
  sub.add_option("--eps-pot", c.eps_pot, "potential tolerance");
  sub.add_option("--alpha-tol", c.alpha_tol, "Lax-Oleinik tolerance");
  sub.add_option("--lp-feas", c.lp_feas, "simplex feasibility tolerance");
  sub.add_option("--seed", c.seed, "seed for randomized probes");
}

RunConfig resolve(const Common& c) {
  RunConfig cfg = load_config(c.config_path);
  if (c.nx) cfg.grid.nx = *c.nx;
  if (c.nv) cfg.grid.nv = *c.nv;
  if (c.vmax) cfg.grid.v_max = *c.vmax;
  if (c.tau) cfg.grid.tau = *c.tau;
  if (c.lift_window) cfg.grid.lift_window = *c.lift_window;
  if (c.eps_pot) cfg.tolerances.eps_pot = *c.eps_pot;
  if (c.alpha_tol) cfg.tolerances.alpha_tol = *c.alpha_tol;
  if (c.lp_feas) cfg.tolerances.lp_feas = *c.lp_feas;
  if (c.seed) cfg.seed = *c.seed;
  cfg.validate();
  return cfg;
}

struct Range {
  double lo, hi;
  int n;
};

Range parse_range(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
  if (parts.size() != 3) throw UsageError("--c-range must look like lo:hi:n");
  try {
    std::size_t used = 0;
    Range r{std::stod(parts[0]), std::stod(parts[1]), std::stoi(parts[2], &used)};
    if (used != parts[2].size()) throw std::invalid_argument(parts[2]);
    return r;
  } catch (const std::exception&) {
    throw UsageError("--c-range must look like lo:hi:n");
  }
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json config_doc(const RunConfig& cfg) { return json::parse(config_json(cfg)); }

json lax_json(const CriticalValueReport& r) {
  return {{"method", to_string(r.method)},
          {"alpha", r.alpha},
          {"residual", r.residual},
          {"converged", r.converged},
          {"iterations", r.iterations},
          {"status", r.status}};
}

json lp_json(const CriticalValueReport& r) {
  json j = lax_json(r);
  if (r.measure) {
    j["rotation"] = r.measure->rotation / r.measure->total_mass;
    j["support_size"] = r.measure->support_size();
  }
  return j;
}

json graph_json(const GraphReport& g) {
  return {{"passed", g.passed},
          {"max_spread", g.max_spread},
          {"max_slope", g.max_slope},
          {"cells", g.cells},
          {"excluded_cells", g.excluded_cells}};
}

json flags_json(const std::vector<std::string>& flags) { return flags; }

void emit(const json& doc, const std::string& path, std::ostream& out) {
  const std::string text = doc.dump(2) + "\n";
  if (path.empty()) {
    out << text;
  } else {
    write_text_file(path, text);
  }
}

std::string csv_of(const PointCloud& cloud) {
  std::ostringstream ss;
  write_cloud_csv(ss, cloud);
  return ss.str();
}

// ---- subcommands ---------------------------------------------------------

int cmd_alpha(const Common& common, double c, const std::string& method,
              const std::string& measure_csv, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const PipelineOptions opt = pipeline_options(cfg);
  json doc{{"config", config_doc(cfg)}, {"c", c}, {"results", json::array()}};
  bool ok = true;
  if (method == "lax" || method == "both") {
    const ActionKernel k = build_kernel(cfg.spec, cfg.grid, CohomologyClass(c));
    const CriticalValueReport r = alpha_lax_oleinik(k, opt.lax);
    ok = ok && r.converged;
    doc["results"].push_back(lax_json(r));
  }
  if (method == "lp" || method == "both") {
    try {
      const CriticalValueReport r = alpha_lp(cfg.spec, cfg.grid, CohomologyClass(c), opt.lp);
      doc["results"].push_back(lp_json(r));
      if (!measure_csv.empty()) {
        std::ostringstream ss;
        write_measure_csv(ss, *r.measure);
        write_text_file(measure_csv, ss.str());
      }
    } catch (const std::runtime_error& e) {
      ok = false;
      doc["results"].push_back({{"method", "lp"}, {"status", "failed"}, {"error", e.what()}});
    }
  }
  if (doc["results"].size() == 1) {
    doc["alpha"] = doc["results"][0].value("alpha", 0.0);
    doc["method"] = doc["results"][0]["method"];
    doc["residual"] = doc["results"][0].value("residual", 0.0);
  }
  emit(doc, common.out, out);
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_beta(const Common& common, double h, const Range& range, std::ostream& out) {
  if (range.n < 2) throw UsageError("--c-range needs n >= 2");
  const RunConfig cfg = resolve(common);
  const PipelineOptions opt = pipeline_options(cfg);
  const ActionKernel base = build_kernel(cfg.spec, cfg.grid, CohomologyClass(range.lo));
  std::vector<AlphaSample> samples;
  bool ok = true;
  json rows = json::array();
  for (int k = 0; k < range.n; ++k) {
    const double c = range.lo + (range.hi - range.lo) * k / (range.n - 1);
    const CriticalValueReport r = alpha_lax_oleinik(shift_kernel(base, CohomologyClass(c)), opt.lax);
    ok = ok && r.converged;
    samples.push_back({c, r.alpha});
    rows.push_back({{"c", c}, {"alpha", r.alpha}, {"converged", r.converged}});
  }
  const BetaEstimate b = beta_fenchel(samples, h);
  json doc{{"config", config_doc(cfg)}, {"h", h},           {"beta", b.beta},
           {"argmax_c", b.argmax_c},    {"at_boundary", b.at_boundary}, {"samples", rows}};
  emit(doc, common.out, out);
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_potential(const Common& common, double c, const std::string& kind, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const PipelineOptions opt = pipeline_options(cfg);
  const ActionKernel k = build_kernel(cfg.spec, cfg.grid, CohomologyClass(c));
  const CriticalValueReport a = alpha_lax_oleinik(k, opt.lax);
  const int t_min = std::max(1, static_cast<int>(std::lround(opt.t_min / cfg.grid.tau)));
  const int t_max = std::max(t_min, static_cast<int>(std::lround(opt.t_max / cfg.grid.tau)));
  json doc{{"config", config_doc(cfg)}, {"c", c}, {"alpha_used", a.alpha}, {"kind", kind}};
  int code = a.converged ? kExitOk : kExitNotConverged;
  try {
    const PotentialPair tables = potential_sweep(k, a.alpha, t_min, t_max, opt.eps_pot);
    const PotentialTable& t = kind == "barrier" ? tables.barrier : tables.mane;
    std::ostringstream ss;
    write_table_csv(ss, t);
    const std::string path = common.out.empty() ? (fs::path(cfg.output) / "potential.csv").string()
                                                : common.out;
    write_text_file(path, ss.str());
    double dmin = t.at(0, 0), dmax = dmin;
    for (int i = 0; i < t.nx; ++i) {
      dmin = std::min(dmin, t.at(i, i));
      dmax = std::max(dmax, t.at(i, i));
    }
    doc["table"] = path;
    doc["t_min_steps"] = t_min;
    doc["t_max_steps"] = t_max;
    doc["stabilized_at"] = t.stabilized_at;
    doc["diagonal_min"] = dmin;
    doc["diagonal_max"] = dmax;
  } catch (const NegativeCycleError& e) {
    doc["error"] = e.what();
    doc["cycle_value"] = e.cycle_value();
    code = kExitNotConverged;
  }
  out << doc.dump(2) << "\n";
  return code;
}

int cmd_sets(const Common& common, double c, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const PipelineOptions opt = pipeline_options(cfg);
  const PipelineResult r = run_pipeline(cfg.spec, cfg.grid, c, opt);
  const fs::path dir = common.out.empty() ? fs::path(cfg.output) : fs::path(common.out);
  write_text_file(dir / "mather.csv", csv_of(r.mather));
  write_text_file(dir / "aubry.csv", csv_of(r.aubry));
  write_text_file(dir / "mane.csv", csv_of(r.mane));

  const std::vector<double> fixed = hyperbolic_fixed_points(cfg.spec, cfg.grid);
  json graph = r.aubry.empty() ? json(nullptr) : graph_json(graph_check(r.aubry, cfg.grid, 1.5, fixed));
  const ScanRow row = scan_row(r);
  json doc{{"config", config_doc(cfg)},
           {"c", c},
           {"alpha", r.alpha_hat},
           {"alpha_lp", number_or_null(row.alpha_lp)},
           {"d_H_MA", number_or_null(row.d_H_mather_aubry)},
           {"d_H_AN", number_or_null(row.d_H_aubry_mane)},
           {"graph_report", graph},
           {"tolerances",
            {{"eps_pot", opt.eps_pot},
             {"calibration_epsilon", opt.calibration_epsilon()},
             {"mass_fraction", opt.mass_fraction}}},
           {"sizes", {{"mather", r.mather.size()}, {"aubry", r.aubry.size()}, {"mane", r.mane.size()}}},
           {"aubry_dropped", r.aubry_dropped},
           {"mane_left_box", r.mane_left_box},
           {"flags", flags_json(r.flags)}};
  write_text_file(dir / "summary.json", doc.dump(2) + "\n");
  out << "wrote " << (dir / "mather.csv").string() << ", aubry.csv, mane.csv, summary.json\n";
  return r.converged() ? kExitOk : kExitNotConverged;
}

int cmd_scan(const Common& common, const Range& range, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const std::vector<ScanRow> rows =
      scan_c(cfg.spec, cfg.grid, range.lo, range.hi, range.n, pipeline_options(cfg));
  std::ostringstream ss;
  write_scan_csv(ss, rows);
  if (common.out.empty()) {
    out << ss.str();
  } else {
    write_text_file(common.out, ss.str());
  }
  bool ok = true;
  for (const auto& row : rows) {
    PipelineResult probe;
    probe.flags = row.flags;
    ok = ok && probe.converged();
  }
  return ok ? kExitOk : kExitNotConverged;
}

int cmd_perturb(const Common& common, double c, double eps, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  Step1Options opt;
  opt.pipeline = pipeline_options(cfg);
  const PipelineResult before = run_pipeline(cfg.spec, cfg.grid, c, opt.pipeline);
  if (before.mather.empty()) {
    json doc{{"config", config_doc(cfg)}, {"c", c}, {"eps", eps},
             {"error", "empty Mather cloud"}, {"flags", flags_json(before.flags)}};
    emit(doc, common.out, out);
    return kExitNotConverged;
  }
  const Step1Report rep = step1_perturbation(cfg.spec, cfg.grid, before, eps, opt);
  json doc{{"config", config_doc(cfg)},
           {"c", c},
           {"eps", eps},
           {"bump_width", opt.width_cells * cfg.grid.hx()},
           {"perturbation_vanishes", rep.perturbation.is_zero()},
           {"mather_positions", rep.mather_positions.size()},
           {"before",
            {{"alpha", rep.before.alpha_hat},
             {"d_H_MA", number_or_null(rep.d_H_mather_aubry_before)},
             {"mather", rep.before.mather.size()},
             {"aubry", rep.before.aubry.size()},
             {"flags", flags_json(rep.before.flags)}}},
           {"after",
            {{"alpha", rep.after.alpha_hat},
             {"d_H_MA", number_or_null(rep.d_H_mather_aubry_after)},
             {"mather", rep.after.mather.size()},
             {"aubry", rep.after.aubry.size()},
             {"flags", flags_json(rep.after.flags)}}},
           {"mather_shift_cells", number_or_null(rep.mather_shift_cells)}};
  emit(doc, common.out, out);
  return rep.before.converged() && rep.after.converged() ? kExitOk : kExitNotConverged;
}

int cmd_flat(const Common& common, double c, double radius, int probes, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  FlatOptions opt;
  const PipelineOptions p = pipeline_options(cfg);
  opt.lax = p.lax;
  opt.lp = p.lp;
  opt.probe_radius = radius;
  opt.n_probes = probes;
  opt.seed = cfg.seed;
  const FlatReport rep = flat_detector(cfg.spec, cfg.grid, c, opt);
  json list = json::array();
  for (const auto& pr : rep.probes) {
    list.push_back({{"c", pr.c}, {"alpha", pr.alpha}, {"deviation", pr.deviation}, {"on_flat", pr.on_flat}});
  }
  json doc{{"config", config_doc(cfg)},
           {"c", c},
           {"alpha", rep.alpha},
           {"rotation", rep.rotation},
           {"seed", rep.seed},
           {"flat_detected", rep.flat_detected},
           {"extent", {rep.extent_lo, rep.extent_hi}},
           {"open_edges", {rep.lo_open, rep.hi_open}},
           {"probes", list},
           {"converged", rep.converged}};
  emit(doc, common.out, out);
  return rep.converged ? kExitOk : kExitNotConverged;
}

int cmd_semicont(const Common& common, double c, const std::string& mode, int levels,
                 double offset, double amplitude, std::ostream& out) {
  const RunConfig cfg = resolve(common);
  const auto sequence = mode == "perturbation" ? perturbation_sequence(c, amplitude, levels)
                                               : class_sequence(c, offset, levels);
  const SemicontinuityReport rep =
      semicontinuity_probe(cfg.spec, cfg.grid, c, sequence, pipeline_options(cfg));
  json rows = json::array();
  bool ok = true;
  for (const auto& r : rep.rows) {
    PipelineResult probe;
    probe.flags = r.flags;
    ok = ok && probe.converged();
    rows.push_back({{"k", r.k},
                    {"c", r.c},
                    {"mane_one_sided", number_or_null(r.mane_one_sided)},
                    {"mane_reverse", number_or_null(r.mane_reverse)},
                    {"d_H_mather", number_or_null(r.d_H_mather)},
                    {"d_H_aubry", number_or_null(r.d_H_aubry)},
                    {"flags", flags_json(r.flags)}});
  }
  json doc{{"config", config_doc(cfg)}, {"c", c},       {"mode", mode},
           {"epsilon", rep.epsilon},    {"rows", rows}, {"non_increasing", rep.non_increasing},
           {"converges", rep.converges}};
  emit(doc, common.out, out);
  return ok ? kExitOk : kExitNotConverged;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Mather, Aubry and Mane sets of Tonelli Lagrangians on the circle", "matherkit"};
  app.require_subcommand(1);

  Common common;
  double c = 0.0, h = 0.0, eps = 0.0, radius = 2.0, offset = 0.8, amplitude = 0.1;
  int probes = 16, levels = 4;
  std::string method = "both", kind = "phi", range_text, measure_csv, mode = "class";

  auto* alpha = app.add_subcommand("alpha", "critical value alpha(c)");
  add_common(*alpha, common);
  alpha->add_option("--c", c, "cohomology class")->required();
  alpha->add_option("--method", method, "lp, lax or both")
      ->check(CLI::IsMember({"lp", "lax", "both"}));
  alpha->add_option("--out", common.out, "JSON report path (default: stdout)");
  alpha->add_option("--measure-csv", measure_csv, "write the LP measure (x, v, weight)");

  auto* beta = app.add_subcommand("beta", "Fenchel conjugate beta(h) from sampled alpha");
  add_common(*beta, common);
  beta->set_help_flag("--help", "Print this help message and exit");
  beta->add_option("--h", h, "rotation number")->required();
  beta->add_option("--c-range", range_text, "lo:hi:n")->required();
  beta->add_option("--out", common.out, "JSON report path (default: stdout)");

  auto* potential = app.add_subcommand("potential", "Mane potential or barrier table");
  add_common(*potential, common);
  potential->add_option("--c", c, "cohomology class")->required();
  potential->add_option("--kind", kind, "phi or barrier")->check(CLI::IsMember({"phi", "barrier"}));
  potential->add_option("--out", common.out, "CSV path (default: <output>/potential.csv)");

  auto* sets = app.add_subcommand("sets", "Mather, Aubry and Mane clouds");
  add_common(*sets, common);
  sets->add_option("--c", c, "cohomology class")->required();
  sets->add_option("--out", common.out, "output directory (default: config output)");

  auto* scan = app.add_subcommand("scan", "pipeline over a range of classes");
  add_common(*scan, common);
  scan->add_option("--c-range", range_text, "lo:hi:n")->required();
  scan->add_option("--out", common.out, "CSV path (default: stdout)");

  auto* perturb = app.add_subcommand("perturb", "Step-1 perturbation vanishing on the Mather set");
  add_common(*perturb, common);
  perturb->add_option("--c", c, "cohomology class")->required();
  perturb->add_option("--eps", eps, "bump amplitude")->required()->check(CLI::PositiveNumber);
  perturb->add_option("--out", common.out, "JSON report path (default: stdout)");

  auto* flat = app.add_subcommand("flat", "detect the flat of alpha through c");
  add_common(*flat, common);
  flat->add_option("--c", c, "cohomology class")->required();
  flat->add_option("--radius", radius, "probe radius")->check(CLI::PositiveNumber);
  flat->add_option("--probes", probes, "random probe count")->check(CLI::PositiveNumber);
  flat->add_option("--out", common.out, "JSON report path (default: stdout)");

  auto* semicont = app.add_subcommand("semicont", "semicontinuity of the Mane set");
  add_common(*semicont, common);
  semicont->add_option("--c", c, "cohomology class")->required();
  semicont->add_option("--mode", mode, "class: c_k = c - offset/2^k; perturbation: phi_k = amplitude/2^k (1 - cos x)")
      ->check(CLI::IsMember({"class", "perturbation"}));
  semicont->add_option("--levels", levels, "sequence length")->check(CLI::PositiveNumber);
  semicont->add_option("--offset", offset, "class offset");
  semicont->add_option("--amplitude", amplitude, "perturbation amplitude");
  semicont->add_option("--out", common.out, "JSON report path (default: stdout)");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*alpha) return cmd_alpha(common, c, method, measure_csv, out);
    if (*beta) return cmd_beta(common, h, parse_range(range_text), out);
    if (*potential) return cmd_potential(common, c, kind, out);
    if (*sets) return cmd_sets(common, c, out);
    if (*scan) return cmd_scan(common, parse_range(range_text), out);
    if (*perturb) return cmd_perturb(common, c, eps, out);
    if (*flat) return cmd_flat(common, c, radius, probes, out);
    if (*semicont) return cmd_semicont(common, c, mode, levels, offset, amplitude, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace matherkit::cli
