#include "matherkit/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>
#include <stdexcept>

#include "matherkit/grids.hpp"
#include "matherkit/parallel.hpp"

namespace matherkit {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

const char* const kFailureFlags[] = {"lax_oleinik_not_converged", "lp_failed", "negative_cycle"};

double safe_hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) return kNaN;
  return hausdorff(a, b);
}

double safe_directed(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) return kNaN;
  return directed_hausdorff(a, b);
}

int steps_for(double time, double tau) {
  return std::max(1, static_cast<int>(std::lround(time / tau)));
}

}  // namespace

bool PipelineResult::converged() const {
  for (const auto& flag : flags) {
    for (const char* failure : kFailureFlags) {
      if (flag.rfind(failure, 0) == 0) return false;
    }
  }
  return true;
}

PipelineResult run_pipeline(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                            const PipelineOptions& options) {
  spec.validate();
  grid.validate();
  if (!(options.eps_pot > 0.0)) throw std::invalid_argument("eps_pot must be positive");

  PipelineResult r;
  r.c = c;
  const ActionKernel kernel = build_kernel(spec, grid, CohomologyClass(c));
  r.lax = alpha_lax_oleinik(kernel, options.lax);
  if (!r.lax.converged) r.flags.push_back("lax_oleinik_not_converged");
  r.alpha_hat = r.lax.alpha;

  try {
    r.lp = alpha_lp(spec, grid, CohomologyClass(c), options.lp);
  } catch (const std::runtime_error& e) {
    r.flags.push_back(std::string("lp_failed: ") + e.what());
  }

  double t_max = options.t_max;
  if (r.lp && r.lp->measure && r.lp->measure->total_mass > 0.0) {
    const double rho = std::abs(r.lp->measure->rotation / r.lp->measure->total_mass);
    if (rho > 0.0) {
      const double needed = options.return_margin * kTwoPi / rho;
      t_max = std::max(t_max, std::min(options.max_window, needed));
    }
  }
  try {
    r.tables = potential_sweep(kernel, r.alpha_hat, steps_for(options.t_min, grid.tau),
                               steps_for(t_max, grid.tau), options.eps_pot);
  } catch (const NegativeCycleError& e) {
    r.flags.push_back(std::string("negative_cycle: ") + e.what());
    return r;
  }

  if (r.lp && r.lp->measure) {
    r.mather = mather_support(*r.lp->measure, options.mass_fraction);
  }
  r.mather.label = CloudLabel::kMather;

  r.aubry_positions = projected_aubry(r.tables.barrier, options.eps_pot);
  LiftOptions lift;
  lift.orbit = options.orbit;
  lift.epsilon = options.calibration_epsilon();
  AubryLift lifted = lift_aubry(spec, grid, r.tables.mane, c, r.alpha_hat, r.aubry_positions, lift);
  r.aubry = std::move(lifted.cloud);
  r.aubry_dropped = lifted.dropped;

  if (options.compute_mane) {
    ManeOptions mane;
    mane.orbit = options.orbit;
    mane.epsilon = options.calibration_epsilon();
    ManeResult m = mane_set(spec, grid, r.tables.mane, c, r.alpha_hat, mane);
    r.mane = std::move(m.cloud);
    r.mane_left_box = m.left_box;
    if (r.mane.empty()) r.flags.push_back("mane_empty");
  }
  r.mane.label = CloudLabel::kMane;
  if (r.mather.empty()) r.flags.push_back("mather_empty");
  if (r.aubry.empty()) r.flags.push_back("aubry_empty");
  return r;
}

ScanRow scan_row(const PipelineResult& result) {
  ScanRow row;
  row.c = result.c;
  row.alpha = result.alpha_hat;
  row.alpha_lp = result.lp ? result.lp->alpha : kNaN;
  row.d_H_mather_aubry = safe_hausdorff(result.mather, result.aubry);
  row.d_H_aubry_mane = safe_hausdorff(result.aubry, result.mane);
  if (result.lp && result.lp->measure) row.measure_support_size = result.mather.size();
  row.flags = result.flags;
  return row;
}

std::vector<ScanRow> scan_c(const LagrangianSpec& spec, const PhaseGrid& grid, double c_lo,
                            double c_hi, int n, const PipelineOptions& options) {
  if (n < 2) throw std::invalid_argument("scan needs at least 2 classes");
  if (!(c_hi >= c_lo)) throw std::invalid_argument("scan range must satisfy lo <= hi");
  std::vector<ScanRow> rows(static_cast<std::size_t>(n));
  parallel_for(0, rows.size(), [&](std::size_t k) {
    const double c = c_lo + (c_hi - c_lo) * static_cast<double>(k) / (n - 1);
    rows[k] = scan_row(run_pipeline(spec, grid, c, options));
  });
  return rows;
}

std::vector<double> mather_positions(const LagrangianSpec& spec, const PhaseGrid& grid,
                                     const PointCloud& mather, double horizon, double dt) {
  std::set<int> cells;
  const int steps = horizon > 0.0 ? static_cast<int>(std::ceil(horizon / dt)) : 0;
  for (const auto& p : mather.points) {
    PhaseState s = p;
    cells.insert(grid.position_index(s.x));
    for (int n = 0; n < steps && static_cast<int>(cells.size()) < grid.nx; ++n) {
      s = leapfrog_step(spec, s, dt);
      cells.insert(grid.position_index(s.x));
    }
  }
  std::vector<double> out;
  out.reserve(cells.size());
  for (int i : cells) out.push_back(grid.position(i));
  return out;
}

Step1Report step1_perturbation(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                               double amplitude, const Step1Options& options) {
  return step1_perturbation(spec, grid, run_pipeline(spec, grid, c, options.pipeline), amplitude,
                            options);
}

Step1Report step1_perturbation(const LagrangianSpec& spec, const PhaseGrid& grid,
                               const PipelineResult& before, double amplitude,
                               const Step1Options& options) {
  if (!(amplitude > 0.0)) throw std::invalid_argument("perturbation amplitude must be positive");
  if (before.mather.empty()) throw std::invalid_argument("Mather cloud is empty");

  Step1Report rep;
  rep.c = before.c;
  rep.amplitude = amplitude;
  rep.mather_positions =
      mather_positions(spec, grid, before.mather, options.sweep_horizon, options.pipeline.orbit.dt);
  rep.perturbation = PeriodicFunction::bump(amplitude, options.width_cells * grid.hx(),
                                            rep.mather_positions, 0.5 * grid.hx());
  rep.perturbed = spec.with_perturbation(rep.perturbation);
  rep.before = before;
  rep.after = run_pipeline(rep.perturbed, grid, before.c, options.pipeline);
  rep.d_H_mather_aubry_before = safe_hausdorff(rep.before.mather, rep.before.aubry);
  rep.d_H_mather_aubry_after = safe_hausdorff(rep.after.mather, rep.after.aubry);
  if (rep.after.mather.empty()) {
    rep.mather_shift_cells = kNaN;
  } else {
    rep.mather_shift_cells = std::max(cell_excess(rep.after.mather, rep.before.mather, grid),
                                      cell_excess(rep.before.mather, rep.after.mather, grid));
  }
  return rep;
}

FlatReport flat_detector(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                         const FlatOptions& options) {
  spec.validate();
  grid.validate();
  if (!(options.probe_radius > 0.0)) throw std::invalid_argument("probe_radius must be positive");
  if (options.n_probes < 1) throw std::invalid_argument("n_probes must be at least 1");

  FlatReport rep;
  rep.c = c;
  rep.seed = options.seed;
  const ActionKernel base = build_kernel(spec, grid, CohomologyClass(c));
  auto alpha_at = [&](double cc) {
    const CriticalValueReport r =
        alpha_lax_oleinik(shift_kernel(base, CohomologyClass(cc)), options.lax);
    if (!r.converged) rep.converged = false;
    return r.alpha;
  };
  rep.alpha = alpha_at(c);

  try {
    const CriticalValueReport lp = alpha_lp(spec, grid, CohomologyClass(c), options.lp);
    rep.rotation = lp.measure->rotation / lp.measure->total_mass;
  } catch (const std::runtime_error&) {
    const double d = 1e-2;
    rep.rotation = (alpha_at(c + d) - alpha_at(c - d)) / (2 * d);
    rep.converged = false;
  }

  auto probe = [&](double cc) {
    FlatProbe p;
    p.c = cc;
    p.alpha = alpha_at(cc);
    p.deviation = std::abs(p.alpha - rep.alpha - rep.rotation * (cc - c));
    p.on_flat = p.deviation <= options.tolerance;
    return p;
  };

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> dist(c - options.probe_radius, c + options.probe_radius);
  std::vector<double> classes(static_cast<std::size_t>(options.n_probes));
  for (auto& cc : classes) cc = dist(rng);
  std::vector<FlatProbe> random_probes(classes.size());
  parallel_for(0, classes.size(), [&](std::size_t k) { random_probes[k] = probe(classes[k]); });
  rep.probes = random_probes;

  // Walk outward from c on each side until the first off-flat probe, then bisect.
  auto edge = [&](int side, bool& open) {
    std::vector<FlatProbe> sorted;
    for (const auto& p : random_probes) {
      if ((p.c - c) * side > 0) sorted.push_back(p);
    }
    std::sort(sorted.begin(), sorted.end(),
              [&](const FlatProbe& a, const FlatProbe& b) { return (a.c - c) * side < (b.c - c) * side; });
    double on = c;
    std::optional<double> off;
    for (const auto& p : sorted) {
      if (p.on_flat) {
        on = p.c;
      } else {
        off = p.c;
        break;
      }
    }
    if (!off) {
      open = true;
      return on;
    }
    double off_c = *off;
    for (int s = 0; s < options.bisection_steps; ++s) {
      const FlatProbe mid = probe(0.5 * (on + off_c));
      rep.probes.push_back(mid);
      (mid.on_flat ? on : off_c) = mid.c;
    }
    return 0.5 * (on + off_c);
  };
  rep.extent_lo = edge(-1, rep.lo_open);
  rep.extent_hi = edge(+1, rep.hi_open);
  rep.flat_detected = rep.extent_hi - rep.extent_lo >= options.min_flat_width;
  return rep;
}

std::vector<SemicontinuityStep> class_sequence(double c, double offset, int levels) {
  std::vector<SemicontinuityStep> out;
  for (int k = 1; k <= levels; ++k) out.push_back({c - offset / std::ldexp(1.0, k), {}});
  return out;
}

std::vector<SemicontinuityStep> perturbation_sequence(double c, double amplitude, int levels) {
  std::vector<SemicontinuityStep> out;
  for (int k = 1; k <= levels; ++k) {
    const double a = amplitude / std::ldexp(1.0, k);
    out.push_back({c, PeriodicFunction::fourier({{a, 0.0}, {-a, 0.0}})});
  }
  return out;
}

SemicontinuityReport semicontinuity_probe(const LagrangianSpec& spec, const PhaseGrid& grid,
                                          double c,
                                          const std::vector<SemicontinuityStep>& sequence,
                                          const PipelineOptions& options) {
  SemicontinuityReport rep;
  rep.c = c;
  rep.epsilon = options.eps_pot;
  const PipelineResult ref = run_pipeline(spec, grid, c, options);

  rep.rows.resize(sequence.size());
  parallel_for(0, sequence.size(), [&](std::size_t k) {
    const auto& step = sequence[k];
    const PipelineResult r =
        run_pipeline(spec.with_perturbation(step.perturbation), grid, step.c, options);
    SemicontinuityRow& row = rep.rows[k];
    row.k = static_cast<int>(k) + 1;
    row.c = step.c;
    row.mane_one_sided = safe_directed(r.mane, ref.mane);
    row.mane_reverse = safe_directed(ref.mane, r.mane);
    row.d_H_mather = safe_hausdorff(r.mather, ref.mather);
    row.d_H_aubry = safe_hausdorff(r.aubry, ref.aubry);
    row.flags = r.flags;
  });

  for (std::size_t k = 0; k + 1 < rep.rows.size(); ++k) {
    if (!(rep.rows[k + 1].mane_one_sided <= rep.rows[k].mane_one_sided + 2 * rep.epsilon)) {
      rep.non_increasing = false;
    }
  }
  rep.converges = rep.rows.empty() || rep.rows.back().mane_one_sided <= 3 * rep.epsilon;
  return rep;
}

}  // namespace matherkit
