// End-to-end pipelines: one class c, cohomology scans, the Step-1
// perturbation, flat detection and the semicontinuity probe.
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "matherkit/calibration.hpp"
#include "matherkit/critical.hpp"
#include "matherkit/potential.hpp"
#include "matherkit/sets.hpp"

namespace matherkit {

struct PipelineOptions {
  double eps_pot = kDefaultPotentialTolerance;
  LaxOleinikOptions lax{};
  LpOptions lp{};
  double mass_fraction = 0.99;
  /// Barrier window in time units.
  double t_min = 10.0;
  double t_max = 40.0;
  /// The window grows to return_margin times the Mather return time
  /// 2 pi / |rotation|, up to max_window, so slow rotations close a loop.
  double return_margin = 1.25;
  double max_window = 160.0;
  /// Calibration defect thresholds are calibration_factor * eps_pot.
  double calibration_factor = 3.0;
  CalibrationSettings orbit{};
  bool compute_mane = true;

  double calibration_epsilon() const { return calibration_factor * eps_pot; }
};

struct PipelineResult {
  double c = 0.0;
  CriticalValueReport lax;
  std::optional<CriticalValueReport> lp;
  /// Critical value used for the potentials (the Lax-Oleinik estimate).
  double alpha_hat = 0.0;
  PotentialPair tables;
  std::vector<int> aubry_positions;
  PointCloud mather;
  PointCloud aubry;
  PointCloud mane;
  std::size_t aubry_dropped = 0;
  std::size_t mane_left_box = 0;
  std::vector<std::string> flags;

  /// True when no convergence or solver flag was raised.
  bool converged() const;
};

/// alpha by both methods, Phi and the barrier, then the three clouds.
/// Solver failures become flags; only invalid input throws.
PipelineResult run_pipeline(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                            const PipelineOptions& options = {});

struct ScanRow {
  double c = 0.0;
  double alpha = 0.0;
  double alpha_lp = 0.0;  // NaN when the LP failed
  double d_H_mather_aubry = 0.0;  // NaN when a cloud is empty
  double d_H_aubry_mane = 0.0;
  std::size_t measure_support_size = 0;
  std::vector<std::string> flags;
};

ScanRow scan_row(const PipelineResult& result);

/// n uniformly spaced classes in [c_lo, c_hi], endpoints included.
/// Throws std::invalid_argument for n < 2.
std::vector<ScanRow> scan_c(const LagrangianSpec& spec, const PhaseGrid& grid, double c_lo,
                            double c_hi, int n, const PipelineOptions& options = {});

/// Projected Mather positions: cells visited by the flow from each Mather
/// point over `horizon`, so rotating supports fill their whole orbit.
std::vector<double> mather_positions(const LagrangianSpec& spec, const PhaseGrid& grid,
                                     const PointCloud& mather, double horizon, double dt);

struct Step1Options {
  PipelineOptions pipeline{};
  /// Bump width in grid cells.
  double width_cells = 4.0;
  /// Flow time used to fill the projected Mather set.
  double sweep_horizon = 20.0;
};

struct Step1Report {
  double c = 0.0;
  double amplitude = 0.0;
  PeriodicFunction perturbation;
  LagrangianSpec perturbed;
  std::vector<double> mather_positions;
  PipelineResult before;
  PipelineResult after;
  double d_H_mather_aubry_before = 0.0;
  double d_H_mather_aubry_after = 0.0;
  /// Cell distance of the perturbed Mather cloud from the original, both ways.
  double mather_shift_cells = 0.0;
};

/// Adds amplitude * (1 - exp(-(d / delta)^2)) to L, d the distance to the
/// projected Mather set, and re-runs the pipeline.
/// Throws std::invalid_argument for amplitude <= 0 or an empty Mather cloud.
Step1Report step1_perturbation(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                               double amplitude, const Step1Options& options = {});
Step1Report step1_perturbation(const LagrangianSpec& spec, const PhaseGrid& grid,
                               const PipelineResult& before, double amplitude,
                               const Step1Options& options = {});

struct FlatOptions {
  LaxOleinikOptions lax{};
  LpOptions lp{};
  double probe_radius = 2.0;
  int n_probes = 16;
  std::uint64_t seed = 20240601;
  /// Deviation from the supporting line still counted as on-flat.
  double tolerance = 1e-2;
  int bisection_steps = 8;
  /// Extents narrower than this are reported as "no flat".
  double min_flat_width = 0.5;
};

struct FlatProbe {
  double c = 0.0;
  double alpha = 0.0;
  double deviation = 0.0;
  bool on_flat = false;
};

struct FlatReport {
  double c = 0.0;
  double alpha = 0.0;
  double rotation = 0.0;
  std::uint64_t seed = 0;
  std::vector<FlatProbe> probes;
  double extent_lo = 0.0;
  double extent_hi = 0.0;
  /// An edge hit the probe radius without an off-flat probe beyond it.
  bool lo_open = false;
  bool hi_open = false;
  bool flat_detected = false;
  bool converged = true;
};

FlatReport flat_detector(const LagrangianSpec& spec, const PhaseGrid& grid, double c,
                         const FlatOptions& options = {});

struct SemicontinuityStep {
  double c = 0.0;
  PeriodicFunction perturbation;
};

struct SemicontinuityRow {
  int k = 0;
  double c = 0.0;
  double mane_one_sided = 0.0;  // sup over N_k of the distance to N
  double mane_reverse = 0.0;    // sup over N of the distance to N_k
  double d_H_mather = 0.0;
  double d_H_aubry = 0.0;
  std::vector<std::string> flags;
};

struct SemicontinuityReport {
  double c = 0.0;
  double epsilon = 0.0;
  std::vector<SemicontinuityRow> rows;
  /// One-sided distances non-increasing within 2 epsilon.
  bool non_increasing = true;
  /// Last one-sided distance <= 3 epsilon.
  bool converges = true;
};

SemicontinuityReport semicontinuity_probe(const LagrangianSpec& spec, const PhaseGrid& grid,
                                          double c,
                                          const std::vector<SemicontinuityStep>& sequence,
                                          const PipelineOptions& options = {});

/// c_k = c - offset / 2^k for k = 1..levels, unperturbed.
std::vector<SemicontinuityStep> class_sequence(double c, double offset, int levels);
/// c_k = c with phi_k = (amplitude / 2^k)(1 - cos x) for k = 1..levels.
std::vector<SemicontinuityStep> perturbation_sequence(double c, double amplitude, int levels);

}  // namespace matherkit
