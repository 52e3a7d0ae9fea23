// Run configuration: JSON loading, defaults and the resolved audit record.
//
// Defaults (overridden by the config file, then by command-line flags):
//
//   key                      default     meaning
//   mass                     1           kinetic coefficient
//   potential                pendulum    U(x) = cos x - 1
//   perturbation             null        phi(x) added to L
//   grid.nx                  256         positions on [0, 2*pi)
//   grid.nv                  129         velocities on [-vmax, vmax]
//   grid.vmax                4
//   grid.tau                 0.2         kernel time step
//   grid.lift_window         1           windings per step
//   tolerances.eps_pot       0.05        potential / Aubry tolerance
//   tolerances.alpha_tol     1e-6        Lax-Oleinik slope agreement
//   tolerances.lp_feas       1e-9        simplex feasibility
//   seed                     20240601    randomized probes
//   output                   "out"       output directory
//
// Derived defaults: barrier window [10, 40] time units, calibration
// threshold 3 * eps_pot, orbit window 20 time units with dt = 0.01, LP
// Fourier order 32, mass fraction 0.99.
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>

#include "matherkit/experiments.hpp"
#include "matherkit/grids.hpp"
#include "matherkit/model.hpp"

namespace matherkit {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Tolerances {
  double eps_pot = kDefaultPotentialTolerance;
  double alpha_tol = 1e-6;
  double lp_feas = 1e-9;
};

struct RunConfig {
  LagrangianSpec spec = LagrangianSpec::pendulum();
  /// Where the Lagrangian came from: a file path, or "inline".
  std::string spec_source = "inline";
  PhaseGrid grid{};
  Tolerances tolerances{};
  std::string output = "out";
  std::uint64_t seed = 20240601;

  /// Throws ConfigError on non-positive tolerances or an invalid grid or spec.
  void validate() const;
};

/// Parses a config document. Relative "spec" paths resolve against base_dir.
RunConfig parse_config(std::string_view json_text, const std::filesystem::path& base_dir = {});
RunConfig load_config(const std::filesystem::path& path);

/// Parses a Lagrangian document {"mass", "potential", "perturbation"}.
LagrangianSpec parse_lagrangian(std::string_view json_text);

/// The fully resolved config as a JSON object string.
std::string config_json(const RunConfig& config, int indent = 2);

PipelineOptions pipeline_options(const RunConfig& config);

}  // namespace matherkit
