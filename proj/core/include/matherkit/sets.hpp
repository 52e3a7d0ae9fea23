// Numerical Mather, Aubry and Mane sets as phase-space point clouds.
#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "matherkit/calibration.hpp"
#include "matherkit/critical.hpp"
#include "matherkit/grids.hpp"
#include "matherkit/potential.hpp"

namespace matherkit {

enum class CloudLabel { kMather, kAubry, kMane, kReference };
std::string to_string(CloudLabel label);

struct PointCloud {
  std::vector<PhaseState> points;  // x wrapped to [0, 2*pi)
  CloudLabel label = CloudLabel::kReference;
  double tolerance = 0.0;

  bool empty() const { return points.empty(); }
  std::size_t size() const { return points.size(); }
};

/// sqrt(torus_distance(x1, x2)^2 + (v1 - v2)^2).
double phase_distance(const PhaseState& a, const PhaseState& b);

/// Fewest cells, taken by descending weight, holding mass_fraction of the mass.
/// Throws std::invalid_argument for a massless measure or a fraction outside (0, 1).
PointCloud mather_support(const OccupationMeasure& measure, double mass_fraction = 0.99);

/// Positions i with barrier(i, i) <= epsilon, ascending.
std::vector<int> projected_aubry(const PotentialTable& barrier, double epsilon);

struct LiftOptions {
  CalibrationSettings orbit{};
  /// Largest static defect a lifted point may carry.
  double epsilon = 0.15;
  /// Golden-section steps refining the best grid velocity.
  int refine_steps = 20;
  /// Grid velocities stop early once their defect exceeds screen_factor * epsilon.
  double screen_factor = 4.0;
};

struct AubryLift {
  PointCloud cloud;
  std::vector<double> defects;  // per lifted point
  std::size_t dropped = 0;      // positions without an acceptable velocity
};

/// One velocity per position minimizing the static defect against phi.
AubryLift lift_aubry(const LagrangianSpec& spec, const PhaseGrid& grid, const PotentialTable& phi,
                     double c, double alpha_hat, std::span<const int> positions,
                     const LiftOptions& options = {});

struct ManeOptions {
  CalibrationSettings orbit{};
  double epsilon = 0.15;
  /// Trial velocities per cell, spread evenly across the cell.
  int subsamples = 5;
  /// Golden-section steps for cells whose best trial is within refine_factor * epsilon.
  int refine_steps = 12;
  double refine_factor = 4.0;
};

struct ManeResult {
  PointCloud cloud;
  std::size_t sampled = 0;
  std::size_t left_box = 0;
};

/// Grid cells holding a velocity whose orbit is semi-static within epsilon.
/// Throws std::invalid_argument unless phi is a Mane potential table.
ManeResult mane_set(const LagrangianSpec& spec, const PhaseGrid& grid, const PotentialTable& phi,
                    double c, double alpha_hat, const ManeOptions& options = {});

/// sup over a of the distance to b. Throws std::invalid_argument on an empty cloud.
double directed_hausdorff(const PointCloud& a, const PointCloud& b);
double hausdorff(const PointCloud& a, const PointCloud& b);

/// sup over a of the distance to b in grid cells: max(|dx| / hx, |dv| / hv).
double cell_excess(const PointCloud& a, const PointCloud& b, const PhaseGrid& grid);

/// Zeros of the Euler-Lagrange acceleration where the flow is hyperbolic.
std::vector<double> hyperbolic_fixed_points(const LagrangianSpec& spec, const PhaseGrid& grid);

struct GraphReport {
  bool passed = true;
  double max_spread = 0.0;
  double max_slope = 0.0;
  std::size_t cells = 0;
  std::vector<int> excluded_cells;
};

/// Per position cell: velocity spread <= 2 hv; between neighboring cells:
/// |dv| / |dx| <= lipschitz_bound. Cells within 2 hx of a fixed point are skipped.
GraphReport graph_check(const PointCloud& cloud, const PhaseGrid& grid, double lipschitz_bound,
                        std::span<const double> fixed_points = {});

}  // namespace matherkit
