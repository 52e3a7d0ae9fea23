// Fixed-time minimal action, the Mane action potential and the barrier.
//
// All tables are nx x nx over grid positions and come from min-plus powers
// of the alpha-corrected kernel a(i, j, w) + alpha * tau, minimized over
// windings since positions live on the circle.
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "matherkit/grids.hpp"

namespace matherkit {

enum class PotentialKind { kFixedTime, kManePotential, kBarrier };
std::string to_string(PotentialKind kind);

struct PotentialTable {
  int nx = 0;
  double tau = 0.0;
  PotentialKind kind = PotentialKind::kFixedTime;
  int n_steps = 0;  // fixed_time horizon, or the last horizon swept
  int t_min_steps = 0;
  int t_max_steps = 0;
  CohomologyClass c;
  double alpha_used = 0.0;
  /// Last horizon at which some entry still dropped by more than 1e-6.
  int stabilized_at = 0;
  std::vector<double> values;  // row-major, values[i * nx + j]

  double at(int i, int j) const {
    return values[static_cast<std::size_t>(i) * nx + static_cast<std::size_t>(j)];
  }
  /// Bilinear periodic interpolation at lifted positions (x, y).
  double interpolate(double x, double y) const;
};

/// Thrown when the alpha-corrected kernel has a cycle cheaper than
/// -tolerance, which means alpha_hat underestimates the critical value.
class NegativeCycleError : public std::runtime_error {
 public:
  NegativeCycleError(double cycle_value, double tolerance);
  double cycle_value() const { return cycle_value_; }

 private:
  double cycle_value_;
};

inline constexpr double kDefaultPotentialTolerance = 5e-2;

/// n-fold min-plus power of (kernel + alpha_hat * tau); entry (i, j)
/// approximates h_c(x_i, x_j, n tau) + alpha n tau.
/// Throws std::invalid_argument when n_steps < 1 or positions are disconnected.
PotentialTable h_c_table(const ActionKernel& kernel, const PhaseGrid& grid, double alpha_hat,
                         int n_steps);

/// min over n in 1..t_max_steps of the h_c tables, diagonal clamped to <= 0.
/// Throws NegativeCycleError when some h_n(i, i) falls below -tolerance.
PotentialTable mane_potential(const ActionKernel& kernel, const PhaseGrid& grid,
                              double alpha_hat, int t_max_steps,
                              double tolerance = kDefaultPotentialTolerance);

/// All-pairs shortest paths (Floyd-Warshall) of the corrected kernel: the
/// t -> infinity limit of mane_potential when no negative cycle exists.
PotentialTable mane_potential_apsp(const ActionKernel& kernel, double alpha_hat,
                                   double tolerance = kDefaultPotentialTolerance);

/// min over n in [t_min_steps, t_max_steps] of the h_c tables.
PotentialTable peierls_barrier(const ActionKernel& kernel, const PhaseGrid& grid,
                               double alpha_hat, int t_min_steps, int t_max_steps,
                               double tolerance = kDefaultPotentialTolerance);

struct PotentialPair {
  PotentialTable mane;
  PotentialTable barrier;
};

/// Both tables from a single sweep of min-plus powers up to t_max_steps.
PotentialPair potential_sweep(const ActionKernel& kernel, double alpha_hat, int t_min_steps,
                              int t_max_steps, double tolerance = kDefaultPotentialTolerance);

/// Phi(i, j) + Phi(j, i). Throws std::invalid_argument unless the table is a Mane potential.
double d_c(const PotentialTable& table, int i, int j);

/// (a (x) b)(i, k) = min_j a(i, j) + b(j, k).
std::vector<double> min_plus_product(const std::vector<double>& a, const std::vector<double>& b,
                                     int n);

}  // namespace matherkit
