// Phase-space discretization and the one-step action kernel.
#pragma once

#include <cstddef>
#include <vector>

#include "matherkit/model.hpp"

namespace matherkit {

/// Uniform grid on [0, 2*pi) x [-v_max, v_max] with time step tau.
///
/// lift_window W bounds the winding w in {-W..W} a single kernel step may
/// take, so a step from x_i to x_j covers displacement x_j - x_i + 2*pi*w.
struct PhaseGrid {
  int nx = 256;
  int nv = 129;
  double v_max = 4.0;
  double tau = 0.2;
  int lift_window = 1;

  double hx() const { return kTwoPi / nx; }
  double hv() const { return 2.0 * v_max / (nv - 1); }
  double position(int i) const { return i * hx(); }
  double velocity(int j) const { return -v_max + j * hv(); }

  /// Nearest grid index of a (lifted) position.
  int position_index(double x) const;
  /// Nearest grid index of a velocity, clamped to the box.
  int velocity_index(double v) const;

  /// Throws std::invalid_argument when a field is out of range.
  void validate() const;
};

struct KernelEdge {
  int source;
  int target;
  int winding;
  double displacement;
};

/// Every (i, j, w) with |x_j - x_i + 2*pi*w| <= v_max * tau, ordered by
/// target, then source, then winding.
std::vector<KernelEdge> admissible_edges(const PhaseGrid& grid);

/// Dense one-step cost table a[i][j][w] under a cohomology class.
///
/// Entries are tau * L(x_mid, displacement / tau) - c * displacement, with
/// x_mid the segment midpoint; inadmissible entries hold +infinity.
class ActionKernel {
 public:
  ActionKernel(PhaseGrid grid, CohomologyClass c, std::vector<double> entries,
               std::vector<KernelEdge> edges);

  const PhaseGrid& grid() const { return grid_; }
  const CohomologyClass& cohomology() const { return c_; }
  double tau() const { return grid_.tau; }
  int windings() const { return 2 * grid_.lift_window + 1; }

  double at(int i, int j, int w) const;
  bool admissible(int i, int j, int w) const;

  /// Admissible edges ordered by target; [in_begin(j), in_end(j)) are the in-edges of j.
  const std::vector<KernelEdge>& edges() const { return edges_; }
  std::size_t in_begin(int j) const { return in_offsets_[j]; }
  std::size_t in_end(int j) const { return in_offsets_[j + 1]; }
  /// Cost of edges()[e].
  double edge_cost(std::size_t e) const { return edge_costs_[e]; }

 private:
  std::size_t index(int i, int j, int w) const;

  PhaseGrid grid_;
  CohomologyClass c_;
  std::vector<double> entries_;
  std::vector<KernelEdge> edges_;
  std::vector<double> edge_costs_;
  std::vector<std::size_t> in_offsets_;
};

ActionKernel build_kernel(const LagrangianSpec& spec, const PhaseGrid& grid,
                          const CohomologyClass& c);

/// Returns a copy of the kernel with c * displacement subtracted for a new class.
ActionKernel shift_kernel(const ActionKernel& kernel, const CohomologyClass& c);

}  // namespace matherkit
