// Calibration defects of Euler-Lagrange orbits against a Mane potential.
//
// For an orbit gamma on [a, b] with A = int (L - c v + alpha) dt:
//   semi-static defect = A - Phi(gamma(a), gamma(b))
//   static defect      = A + Phi(gamma(b), gamma(a))
// Both are >= 0 up to discretization and shrink on sub-windows, which
// lets evaluation stop as soon as a partial window exceeds the threshold.
#pragma once

#include <limits>

#include "matherkit/model.hpp"
#include "matherkit/potential.hpp"

namespace matherkit {

enum class DefectKind { kSemiStatic, kStatic };

struct CalibrationSettings {
  /// Window length. Centered windows run horizon / 2 each way.
  double horizon = 20.0;
  double dt = 0.01;
  /// Time between early-exit checks, per direction.
  double checkpoint = 1.0;
  /// Evaluation stops once a partial window exceeds this value.
  double reject_above = std::numeric_limits<double>::infinity();
  /// Forward-only window [0, horizon] instead of [-horizon/2, horizon/2].
  bool forward_only = false;
  /// Orbits with |v| above this leave the phase box and are rejected.
  double v_max = std::numeric_limits<double>::infinity();
};

struct DefectResult {
  double defect = 0.0;
  bool left_box = false;
  bool stopped_early = false;
};

DefectResult orbit_defect(const LagrangianSpec& spec, const PotentialTable& phi, double c,
                          double alpha_hat, PhaseState start, DefectKind kind,
                          const CalibrationSettings& settings);

}  // namespace matherkit
