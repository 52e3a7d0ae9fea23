#include "matherkit/potential.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "matherkit/parallel.hpp"

namespace matherkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kStabilizationTol = 1e-6;

struct InEdge {
  int source;
  double cost;
};

// In-edges per target with windings collapsed: positions live on the circle,
// so only the cheapest winding between two positions matters.
struct CorrectedKernel {
  int nx = 0;
  std::vector<std::size_t> offsets;
  std::vector<InEdge> edges;
};

CorrectedKernel correct(const ActionKernel& kernel, double alpha_hat) {
  const int nx = kernel.grid().nx;
  const double shift = alpha_hat * kernel.tau();
  CorrectedKernel out;
  out.nx = nx;
  out.offsets.assign(static_cast<std::size_t>(nx) + 1, 0);
  for (int j = 0; j < nx; ++j) {
    std::map<int, double> best;
    for (std::size_t e = kernel.in_begin(j); e < kernel.in_end(j); ++e) {
      const double cost = kernel.edge_cost(e);
      if (!std::isfinite(cost)) continue;
      const int src = kernel.edges()[e].source;
      auto [it, inserted] = best.emplace(src, cost);
      if (!inserted) it->second = std::min(it->second, cost);
    }
    for (const auto& [src, cost] : best) out.edges.push_back({src, cost + shift});
    out.offsets[j + 1] = out.edges.size();
  }
  return out;
}

void require_connected(const CorrectedKernel& k) {
  // Strong connectivity: forward and backward reachability from node 0.
  const auto nx = static_cast<std::size_t>(k.nx);
  std::vector<std::vector<int>> fwd(nx), bwd(nx);
  for (int j = 0; j < k.nx; ++j) {
    for (std::size_t e = k.offsets[j]; e < k.offsets[j + 1]; ++e) {
      fwd[k.edges[e].source].push_back(j);
      bwd[j].push_back(k.edges[e].source);
    }
  }
  auto all_reached = [&](const std::vector<std::vector<int>>& adj) {
    std::vector<bool> seen(nx, false);
    std::vector<int> stack{0};
    seen[0] = true;
    std::size_t count = 1;
    while (!stack.empty()) {
      const int u = stack.back();
      stack.pop_back();
      for (int w : adj[u]) {
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          stack.push_back(w);
        }
      }
    }
    return count == nx;
  };
  if (!all_reached(fwd) || !all_reached(bwd)) {
    throw std::invalid_argument("kernel edge graph does not connect all positions");
  }
}

// next = current (x) kernel, row by row.
void advance(const CorrectedKernel& k, const std::vector<double>& current,
             std::vector<double>& next) {
  const auto nx = static_cast<std::size_t>(k.nx);
  parallel_for(0, nx, [&](std::size_t i) {
    const double* row = current.data() + i * nx;
    double* out = next.data() + i * nx;
    for (std::size_t j = 0; j < nx; ++j) {
      double best = kInf;
      for (std::size_t e = k.offsets[j]; e < k.offsets[j + 1]; ++e) {
        best = std::min(best, row[k.edges[e].source] + k.edges[e].cost);
      }
      out[j] = best;
    }
  });
}

std::vector<double> one_step(const CorrectedKernel& k) {
  const auto nx = static_cast<std::size_t>(k.nx);
  std::vector<double> table(nx * nx, kInf);
  for (std::size_t j = 0; j < nx; ++j) {
    for (std::size_t e = k.offsets[j]; e < k.offsets[j + 1]; ++e) {
      const auto src = static_cast<std::size_t>(k.edges[e].source);
      table[src * nx + j] = std::min(table[src * nx + j], k.edges[e].cost);
    }
  }
  return table;
}

PotentialTable make_table(const ActionKernel& kernel, double alpha_hat, PotentialKind kind) {
  PotentialTable t;
  t.nx = kernel.grid().nx;
  t.tau = kernel.tau();
  t.kind = kind;
  t.c = kernel.cohomology();
  t.alpha_used = alpha_hat;
  return t;
}

void check_grid(const ActionKernel& kernel, const PhaseGrid& grid) {
  if (grid.nx != kernel.grid().nx || grid.tau != kernel.grid().tau) {
    throw std::invalid_argument("grid does not match the kernel");
  }
}

}  // namespace

std::string to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::kFixedTime: return "fixed_time";
    case PotentialKind::kManePotential: return "mane_potential";
    case PotentialKind::kBarrier: return "barrier";
  }
  return "unknown";
}

NegativeCycleError::NegativeCycleError(double cycle_value, double tolerance)
    : std::runtime_error("alpha-corrected kernel has a cycle of value " +
                         std::to_string(cycle_value) + " below -" + std::to_string(tolerance) +
                         "; alpha_hat is too small"),
      cycle_value_(cycle_value) {}

double PotentialTable::interpolate(double x, double y) const {
  const double h = kTwoPi / nx;
  const double fx = wrap_position(x) / h;
  const double fy = wrap_position(y) / h;
  const int i0 = static_cast<int>(std::floor(fx)) % nx;
  const int j0 = static_cast<int>(std::floor(fy)) % nx;
  const double tx = fx - std::floor(fx);
  const double ty = fy - std::floor(fy);
  const int i1 = (i0 + 1) % nx;
  const int j1 = (j0 + 1) % nx;
  return (1 - tx) * (1 - ty) * at(i0, j0) + tx * (1 - ty) * at(i1, j0) +
         (1 - tx) * ty * at(i0, j1) + tx * ty * at(i1, j1);
}

PotentialTable h_c_table(const ActionKernel& kernel, const PhaseGrid& grid, double alpha_hat,
                         int n_steps) {
  check_grid(kernel, grid);
  if (n_steps < 1) throw std::invalid_argument("n_steps must be at least 1");
  const CorrectedKernel k = correct(kernel, alpha_hat);
  require_connected(k);
  std::vector<double> current = one_step(k);
  std::vector<double> next(current.size());
  for (int n = 1; n < n_steps; ++n) {
    advance(k, current, next);
    current.swap(next);
  }
  PotentialTable t = make_table(kernel, alpha_hat, PotentialKind::kFixedTime);
  t.n_steps = n_steps;
  t.values = std::move(current);
  return t;
}

PotentialPair potential_sweep(const ActionKernel& kernel, double alpha_hat, int t_min_steps,
                              int t_max_steps, double tolerance) {
  if (t_min_steps < 1 || t_max_steps < t_min_steps) {
    throw std::invalid_argument("need 1 <= t_min_steps <= t_max_steps");
  }
  const CorrectedKernel k = correct(kernel, alpha_hat);
  require_connected(k);
  const auto nx = static_cast<std::size_t>(k.nx);

  std::vector<double> current = one_step(k);
  std::vector<double> next(current.size());
  std::vector<double> phi = current;
  std::vector<double> barrier(current.size(), kInf);
  int stabilized_at = 1;
  double worst_cycle = kInf;
  for (int n = 1;; ++n) {
    if (n >= t_min_steps) {
      for (std::size_t e = 0; e < current.size(); ++e) barrier[e] = std::min(barrier[e], current[e]);
    }
    for (std::size_t i = 0; i < nx; ++i) worst_cycle = std::min(worst_cycle, current[i * nx + i]);
    if (n > 1) {
      double drop = 0.0;
      for (std::size_t e = 0; e < current.size(); ++e) {
        if (current[e] < phi[e]) {
          drop = std::max(drop, phi[e] - current[e]);
          phi[e] = current[e];
        }
      }
      if (drop > kStabilizationTol) stabilized_at = n;
    }
    if (n == t_max_steps) break;
    advance(k, current, next);
    current.swap(next);
  }
  if (worst_cycle < -tolerance) throw NegativeCycleError(worst_cycle, tolerance);

  for (std::size_t i = 0; i < nx; ++i) phi[i * nx + i] = std::min(0.0, phi[i * nx + i]);

  PotentialPair out{make_table(kernel, alpha_hat, PotentialKind::kManePotential),
                    make_table(kernel, alpha_hat, PotentialKind::kBarrier)};
  out.mane.values = std::move(phi);
  out.mane.n_steps = t_max_steps;
  out.mane.t_max_steps = t_max_steps;
  out.mane.stabilized_at = stabilized_at;
  out.barrier.values = std::move(barrier);
  out.barrier.n_steps = t_max_steps;
  out.barrier.t_min_steps = t_min_steps;
  out.barrier.t_max_steps = t_max_steps;
  out.barrier.stabilized_at = stabilized_at;
  return out;
}

PotentialTable mane_potential(const ActionKernel& kernel, const PhaseGrid& grid, double alpha_hat,
                              int t_max_steps, double tolerance) {
  check_grid(kernel, grid);
  if (t_max_steps < 1) throw std::invalid_argument("t_max_steps must be at least 1");
  return potential_sweep(kernel, alpha_hat, 1, t_max_steps, tolerance).mane;
}

PotentialTable peierls_barrier(const ActionKernel& kernel, const PhaseGrid& grid,
                               double alpha_hat, int t_min_steps, int t_max_steps,
                               double tolerance) {
  check_grid(kernel, grid);
  return potential_sweep(kernel, alpha_hat, t_min_steps, t_max_steps, tolerance).barrier;
}

PotentialTable mane_potential_apsp(const ActionKernel& kernel, double alpha_hat,
                                   double tolerance) {
  const CorrectedKernel k = correct(kernel, alpha_hat);
  require_connected(k);
  const auto nx = static_cast<std::size_t>(k.nx);
  std::vector<double> d = one_step(k);
  for (std::size_t m = 0; m < nx; ++m) {
    parallel_for(0, nx, [&](std::size_t i) {
      const double dim = d[i * nx + m];
      if (!std::isfinite(dim)) return;
      double* row = d.data() + i * nx;
      const double* via = d.data() + m * nx;
      for (std::size_t j = 0; j < nx; ++j) row[j] = std::min(row[j], dim + via[j]);
    });
  }
  double worst_cycle = kInf;
  for (std::size_t i = 0; i < nx; ++i) worst_cycle = std::min(worst_cycle, d[i * nx + i]);
  if (worst_cycle < -tolerance) throw NegativeCycleError(worst_cycle, tolerance);
  for (std::size_t i = 0; i < nx; ++i) d[i * nx + i] = std::min(0.0, d[i * nx + i]);

  PotentialTable t = make_table(kernel, alpha_hat, PotentialKind::kManePotential);
  t.values = std::move(d);
  return t;
}

double d_c(const PotentialTable& table, int i, int j) {
  if (table.kind != PotentialKind::kManePotential) {
    throw std::invalid_argument("d_c needs a Mane potential table");
  }
  return table.at(i, j) + table.at(j, i);
}

std::vector<double> min_plus_product(const std::vector<double>& a, const std::vector<double>& b,
                                     int n) {
  const auto nn = static_cast<std::size_t>(n);
  if (a.size() != nn * nn || b.size() != nn * nn) {
    throw std::invalid_argument("min_plus_product: size mismatch");
  }
  std::vector<double> out(nn * nn, kInf);
  parallel_for(0, nn, [&](std::size_t i) {
    double* row = out.data() + i * nn;
    for (std::size_t j = 0; j < nn; ++j) {
      const double aij = a[i * nn + j];
      if (!std::isfinite(aij)) continue;
      const double* brow = b.data() + j * nn;
      for (std::size_t k = 0; k < nn; ++k) row[k] = std::min(row[k], aij + brow[k]);
    }
  });
  return out;
}

}  // namespace matherkit
