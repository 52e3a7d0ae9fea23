#include "matherkit/grids.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "matherkit/parallel.hpp"

namespace matherkit {

int PhaseGrid::position_index(double x) const {
  const long k = std::lround(wrap_position(x) / hx());
  return static_cast<int>(k % nx);
}

int PhaseGrid::velocity_index(double v) const {
  const long k = std::lround((v + v_max) / hv());
  return static_cast<int>(std::clamp<long>(k, 0, nv - 1));
}

void PhaseGrid::validate() const {
  if (nx < 2) throw std::invalid_argument("grid.nx must be at least 2");
  if (nv < 2) throw std::invalid_argument("grid.nv must be at least 2");
  if (!(v_max > 0.0) || !std::isfinite(v_max)) {
    throw std::invalid_argument("grid.vmax must be positive");
  }
  if (!(tau > 0.0) || !std::isfinite(tau)) throw std::invalid_argument("grid.tau must be positive");
  if (lift_window < 0) throw std::invalid_argument("grid.lift_window must be non-negative");
}

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

bool within_reach(const PhaseGrid& grid, double displacement) {
  return std::abs(displacement) <= grid.v_max * grid.tau * (1.0 + 1e-12);
}
}  // namespace

std::vector<KernelEdge> admissible_edges(const PhaseGrid& grid) {
  grid.validate();
  std::vector<KernelEdge> edges;
  const int window = grid.lift_window;
  for (int j = 0; j < grid.nx; ++j) {
    for (int i = 0; i < grid.nx; ++i) {
      for (int w = -window; w <= window; ++w) {
        const double d = grid.position(j) - grid.position(i) + kTwoPi * w;
        if (within_reach(grid, d)) edges.push_back({i, j, w, d});
      }
    }
  }
  return edges;
}

ActionKernel::ActionKernel(PhaseGrid grid, CohomologyClass c, std::vector<double> entries,
                           std::vector<KernelEdge> edges)
    : grid_(grid), c_(std::move(c)), entries_(std::move(entries)), edges_(std::move(edges)) {
  const auto expected = static_cast<std::size_t>(grid_.nx) * grid_.nx * windings();
  if (entries_.size() != expected) throw std::invalid_argument("kernel table has wrong size");
  edge_costs_.reserve(edges_.size());
  in_offsets_.assign(static_cast<std::size_t>(grid_.nx) + 1, 0);
  for (const auto& e : edges_) {
    edge_costs_.push_back(at(e.source, e.target, e.winding));
    ++in_offsets_[static_cast<std::size_t>(e.target) + 1];
  }
  for (int j = 0; j < grid_.nx; ++j) in_offsets_[j + 1] += in_offsets_[j];
}

std::size_t ActionKernel::index(int i, int j, int w) const {
  return (static_cast<std::size_t>(i) * grid_.nx + j) * windings() +
         static_cast<std::size_t>(w + grid_.lift_window);
}

double ActionKernel::at(int i, int j, int w) const {
  if (w < -grid_.lift_window || w > grid_.lift_window) return kInf;
  return entries_[index(i, j, w)];
}

bool ActionKernel::admissible(int i, int j, int w) const { return std::isfinite(at(i, j, w)); }

ActionKernel build_kernel(const LagrangianSpec& spec, const PhaseGrid& grid,
                          const CohomologyClass& c) {
  spec.validate();
  grid.validate();
  const double cc = c.scalar();
  auto edges = admissible_edges(grid);
  const int windings = 2 * grid.lift_window + 1;
  std::vector<double> entries(static_cast<std::size_t>(grid.nx) * grid.nx * windings, kInf);

  parallel_for(0, edges.size(), [&](std::size_t k) {
    const auto& e = edges[k];
    const double mid = grid.position(e.source) + 0.5 * e.displacement;
    const double v = e.displacement / grid.tau;
    const double cost = grid.tau * eval_lagrangian(spec, mid, v) - cc * e.displacement;
    entries[(static_cast<std::size_t>(e.source) * grid.nx + e.target) * windings +
            static_cast<std::size_t>(e.winding + grid.lift_window)] = cost;
  });
  return ActionKernel(grid, c, std::move(entries), std::move(edges));
}

ActionKernel shift_kernel(const ActionKernel& kernel, const CohomologyClass& c) {
  const PhaseGrid& grid = kernel.grid();
  const double dc = c.scalar() - kernel.cohomology().scalar();
  const int windings = kernel.windings();
  std::vector<double> entries(static_cast<std::size_t>(grid.nx) * grid.nx * windings, kInf);
  for (std::size_t k = 0; k < kernel.edges().size(); ++k) {
    const auto& e = kernel.edges()[k];
    entries[(static_cast<std::size_t>(e.source) * grid.nx + e.target) * windings +
            static_cast<std::size_t>(e.winding + grid.lift_window)] =
        kernel.edge_cost(k) - dc * e.displacement;
  }
  return ActionKernel(grid, c, std::move(entries), kernel.edges());
}

}  // namespace matherkit
