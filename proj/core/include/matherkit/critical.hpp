// Critical values alpha(c), the conjugate beta(h), and minimizing measures.
#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "matherkit/grids.hpp"
#include "matherkit/model.hpp"
#include "matherkit/simplex.hpp"

namespace matherkit {

/// Nonnegative weights on the phase grid cells (x_i, v_j), index i * nv + j.
struct OccupationMeasure {
  PhaseGrid grid;
  std::vector<double> weights;
  double total_mass = 0.0;
  double rotation = 0.0;  // sum of weight * v

  double weight(int i, int j) const {
    return weights[static_cast<std::size_t>(i) * grid.nv + static_cast<std::size_t>(j)];
  }
  /// Number of cells carrying weight above `threshold`.
  std::size_t support_size(double threshold = 1e-12) const;
  /// |sum mu * dphi_k(x) * v| for phi_k in {sin kx, cos kx : k <= order},
  /// ordered sin 1, cos 1, sin 2, ...
  std::vector<double> closedness_residuals(int order) const;
  /// Mean of L(x, v) - c v under the normalized measure.
  double average_action(const LagrangianSpec& spec, double c) const;
};

enum class AlphaMethod { kLaxOleinik, kLinearProgram };
std::string to_string(AlphaMethod method);

struct CriticalValueReport {
  double alpha = 0.0;
  AlphaMethod method = AlphaMethod::kLaxOleinik;
  /// Lax-Oleinik: spread of the last ten slope estimates, or 0 once the
  /// iteration is exactly periodic. LP: largest closedness residual of the
  /// returned measure.
  double residual = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::string status;
  std::optional<OccupationMeasure> measure;
};

struct LaxOleinikOptions {
  std::size_t min_iters = 2000;
  std::size_t max_iters = 256000;
  double tol = 1e-6;
};

/// Long-run slope of the min-plus (Lax-Oleinik) iteration u <- min_i [u(i) + a(i, .)].
///
/// Starts from u = 0 and doubles the iteration count from min_iters until the
/// normalized iterate repeats (the slope over one period is then exact), the
/// ten most recent slope estimates agree within tol, or max_iters is reached.
/// Non-convergence is reported through `converged`, never thrown.
/// Throws std::invalid_argument if the position graph is not strongly connected.
CriticalValueReport alpha_lax_oleinik(const ActionKernel& kernel, const PhaseGrid& grid,
                                      std::size_t max_iters, double tol);
CriticalValueReport alpha_lax_oleinik(const ActionKernel& kernel,
                                      const LaxOleinikOptions& options = {});

struct LpOptions {
  int fourier_order = 32;
  lp::SimplexOptions simplex{};
  /// Replace the optimal vertex by an average of optimal vertices whose
  /// supports cover every cell some minimizing measure can charge.
  bool spread_support = true;
  /// Reduced cost below which a cell counts as lying on the optimal face.
  double face_tol = 1e-8;
};

/// Closed-measure linear program on the phase grid.
///
/// min sum mu (L - c v) subject to mu >= 0, sum mu = 1 and
/// sum mu * dphi_k(x) * v = 0 for the truncated Fourier basis.
///
/// With spread_support the returned measure is still optimal, but its
/// support is the union of the supports of all optimal measures, found by
/// maximizing the weight of each zero-reduced-cost cell over the optimal face.
/// Throws std::invalid_argument for fourier_order < 1 or >= nx / 2 (aliasing),
/// std::runtime_error if the simplex does not reach an optimum.
CriticalValueReport alpha_lp(const LagrangianSpec& spec, const PhaseGrid& grid,
                             const CohomologyClass& c, int fourier_order);
CriticalValueReport alpha_lp(const LagrangianSpec& spec, const PhaseGrid& grid,
                             const CohomologyClass& c, const LpOptions& options);

struct AlphaSample {
  double c;
  double alpha;
};

struct BetaEstimate {
  double beta = 0.0;
  double argmax_c = 0.0;
  /// True when the maximizing class is an endpoint of the sampled range,
  /// in which case beta is only a lower bound.
  bool at_boundary = false;
};

/// Discrete Legendre-Fenchel transform max_c (c h - alpha(c)).
BetaEstimate beta_fenchel(std::span<const AlphaSample> samples, double h);

struct SlopeInterval {
  double left;
  double right;
};

/// One-sided difference quotients of alpha at a sampled class c.
/// Throws std::invalid_argument when c is not an interior sample.
SlopeInterval subdifferential_alpha(std::span<const AlphaSample> samples, double c);

}  // namespace matherkit
