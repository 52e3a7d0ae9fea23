#include "matherkit/critical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <span>
#include <stdexcept>

namespace matherkit {

std::string to_string(AlphaMethod method) {
  return method == AlphaMethod::kLaxOleinik ? "lax_oleinik" : "lp";
}

std::size_t OccupationMeasure::support_size(double threshold) const {
  return static_cast<std::size_t>(
      std::count_if(weights.begin(), weights.end(), [&](double w) { return w > threshold; }));
}

std::vector<double> OccupationMeasure::closedness_residuals(int order) const {
  std::vector<double> out(2 * static_cast<std::size_t>(std::max(order, 0)), 0.0);
  for (int i = 0; i < grid.nx; ++i) {
    const double x = grid.position(i);
    double flux = 0.0;  // sum_j mu_ij v_j
    for (int j = 0; j < grid.nv; ++j) flux += weight(i, j) * grid.velocity(j);
    if (flux == 0.0) continue;
    for (int k = 1; k <= order; ++k) {
      const double kd = k;
      out[2 * (k - 1)] += flux * kd * std::cos(kd * x);
      out[2 * (k - 1) + 1] += flux * -kd * std::sin(kd * x);
    }
  }
  for (double& r : out) r = std::abs(r);
  return out;
}

double OccupationMeasure::average_action(const LagrangianSpec& spec, double c) const {
  double s = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const double w = weight(i, j);
      if (w == 0.0) continue;
      const double v = grid.velocity(j);
      s += w * (eval_lagrangian(spec, grid.position(i), v) - c * v);
    }
  }
  return total_mass > 0.0 ? s / total_mass : 0.0;
}

namespace {

constexpr std::size_t kPeriodWindow = 4096;
constexpr double kPeriodTol = 1e-9;

void require_connected(const ActionKernel& kernel) {
  const int nx = kernel.grid().nx;
  // Forward and backward reachability from node 0 over finite edges.
  auto reach = [&](bool forward) {
    std::vector<std::vector<int>> adj(static_cast<std::size_t>(nx));
    for (std::size_t e = 0; e < kernel.edges().size(); ++e) {
      if (!std::isfinite(kernel.edge_cost(e))) continue;
      const auto& edge = kernel.edges()[e];
      if (forward) {
        adj[edge.source].push_back(edge.target);
      } else {
        adj[edge.target].push_back(edge.source);
      }
    }
    std::vector<bool> seen(static_cast<std::size_t>(nx), false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
      const int u = q.front();
      q.pop();
      for (int w : adj[u]) {
        if (!seen[w]) {
          seen[w] = true;
          ++count;
          q.push(w);
        }
      }
    }
    return count == nx;
  };
  if (!reach(true) || !reach(false)) {
    throw std::invalid_argument("kernel edge graph does not connect all positions");
  }
}

}  // namespace

CriticalValueReport alpha_lax_oleinik(const ActionKernel& kernel, const PhaseGrid& grid,
                                      std::size_t max_iters, double tol) {
  if (grid.nx != kernel.grid().nx || grid.tau != kernel.grid().tau) {
    throw std::invalid_argument("grid does not match the kernel");
  }
  LaxOleinikOptions options;
  options.max_iters = max_iters;
  options.min_iters = std::min(options.min_iters, max_iters);
  options.tol = tol;
  return alpha_lax_oleinik(kernel, options);
}

CriticalValueReport alpha_lax_oleinik(const ActionKernel& kernel,
                                      const LaxOleinikOptions& options) {
  if (options.max_iters < 20) throw std::invalid_argument("max_iters must be at least 20");
  require_connected(kernel);
  const int nx = kernel.grid().nx;
  const double tau = kernel.tau();

  std::vector<double> u(static_cast<std::size_t>(nx), 0.0);
  std::vector<double> next(u.size());
  // cumulative[n] = total amount subtracted after n steps = min_j u_n(j).
  std::vector<double> cumulative{0.0};
  cumulative.reserve(options.max_iters + 1);

  // Ring buffer of recent normalized iterates for period detection.
  const std::size_t window = std::min<std::size_t>(kPeriodWindow, options.max_iters);
  std::vector<double> history(window * static_cast<std::size_t>(nx), 0.0);
  auto slot = [&](std::size_t n) { return history.data() + (n % window) * nx; };

  auto step = [&] {
    for (int j = 0; j < nx; ++j) {
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t e = kernel.in_begin(j); e < kernel.in_end(j); ++e) {
        best = std::min(best, u[kernel.edges()[e].source] + kernel.edge_cost(e));
      }
      next[j] = best;
    }
    const double m = *std::min_element(next.begin(), next.end());
    for (int j = 0; j < nx; ++j) u[j] = next[j] - m;
    cumulative.push_back(cumulative.back() + m);
    std::copy(u.begin(), u.end(), slot(cumulative.size() - 1));
  };

  // Smallest p with u_n == u_{n-p} up to round-off; the iteration is then
  // periodic and the slope over one period is exact.
  auto find_period = [&](std::size_t n) -> std::size_t {
    const double* now = slot(n);
    for (std::size_t p = 1; p < window && p <= n; ++p) {
      const double* then = slot(n - p);
      bool same = true;
      for (int j = 0; j < nx && same; ++j) same = std::abs(now[j] - then[j]) <= kPeriodTol;
      if (same) return p;
    }
    return 0;
  };

  auto estimate = [&](std::size_t n) {
    const std::size_t half = n / 2;
    return -(cumulative[n] - cumulative[n - half]) / (static_cast<double>(half) * tau);
  };

  CriticalValueReport report;
  report.method = AlphaMethod::kLaxOleinik;
  std::size_t target = std::max<std::size_t>(20, std::min(options.min_iters, options.max_iters));
  while (true) {
    while (cumulative.size() <= target) step();
    const std::size_t spacing = std::max<std::size_t>(1, target / 20);
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (std::size_t k = 0; k < 10; ++k) {
      const double e = estimate(target - k * spacing);
      lo = std::min(lo, e);
      hi = std::max(hi, e);
    }
    report.alpha = estimate(target);
    report.residual = hi - lo;
    report.iterations = target;
    if (const std::size_t p = find_period(target)) {
      report.alpha = -(cumulative[target] - cumulative[target - p]) / (static_cast<double>(p) * tau);
      report.residual = 0.0;
    }
    report.converged = report.residual <= options.tol;
    if (report.converged || target >= options.max_iters) break;
    target = std::min(options.max_iters, target * 2);
  }
  report.status = report.converged ? "converged" : "not_converged";
  return report;
}

namespace {

// Columns are phase cells, index i * nv + j; row 0 is the mass constraint,
// rows 2k-1 and 2k the closedness constraints for sin(kx) and cos(kx).
class OccupationLp final : public lp::ColumnSource {
 public:
  OccupationLp(const LagrangianSpec& spec, const PhaseGrid& grid, double c, int order)
      : grid_(grid), order_(order) {
    const auto nx = static_cast<std::size_t>(grid.nx);
    const auto nv = static_cast<std::size_t>(grid.nv);
    costs_.resize(nx * nv);
    velocities_.resize(nv);
    for (std::size_t j = 0; j < nv; ++j) velocities_[j] = grid.velocity(static_cast<int>(j));
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = grid.position(static_cast<int>(i));
      for (std::size_t j = 0; j < nv; ++j) {
        costs_[i * nv + j] = eval_lagrangian(spec, x, velocities_[j]) - c * velocities_[j];
      }
    }
    const std::size_t m = rows();
    test_derivatives_.assign(nx * m, 0.0);
    for (std::size_t i = 0; i < nx; ++i) {
      const double x = grid.position(static_cast<int>(i));
      for (int k = 1; k <= order; ++k) {
        const double kd = k;
        test_derivatives_[i * m + 2 * k - 1] = kd * std::cos(kd * x);
        test_derivatives_[i * m + 2 * k] = -kd * std::sin(kd * x);
      }
    }
  }

  std::size_t rows() const override { return 2 * static_cast<std::size_t>(order_) + 1; }
  std::size_t cols() const override { return costs_.size(); }
  double cost(std::size_t j) const override { return costs_[j]; }

  void column(std::size_t col, std::span<double> out) const override {
    const std::size_t nv = velocities_.size();
    const std::size_t i = col / nv;
    const double v = velocities_[col % nv];
    const std::size_t m = rows();
    out[0] = 1.0;
    for (std::size_t r = 1; r < m; ++r) out[r] = v * test_derivatives_[i * m + r];
  }

  void price(std::span<const double> y, double cost_weight,
             std::span<double> reduced) const override {
    const std::size_t nv = velocities_.size();
    const std::size_t nx = costs_.size() / nv;
    const std::size_t m = rows();
    for (std::size_t i = 0; i < nx; ++i) {
      double s = 0.0;
      for (std::size_t r = 1; r < m; ++r) s += y[r] * test_derivatives_[i * m + r];
      for (std::size_t j = 0; j < nv; ++j) {
        const std::size_t col = i * nv + j;
        reduced[col] = cost_weight * costs_[col] - y[0] - velocities_[j] * s;
      }
    }
  }

 private:
  PhaseGrid grid_;
  int order_;
  std::vector<double> costs_;
  std::vector<double> velocities_;
  std::vector<double> test_derivatives_;
};

// Restriction of a column source to a subset of columns with new costs.
class SubsetColumns final : public lp::ColumnSource {
 public:
  SubsetColumns(const lp::ColumnSource& base, const std::vector<std::size_t>& subset,
                std::vector<double> costs)
      : base_(base), subset_(subset), costs_(std::move(costs)) {}

  std::size_t rows() const override { return base_.rows(); }
  std::size_t cols() const override { return subset_.size(); }
  double cost(std::size_t j) const override { return costs_[j]; }
  void column(std::size_t j, std::span<double> out) const override {
    base_.column(subset_[j], out);
  }

 private:
  const lp::ColumnSource& base_;
  const std::vector<std::size_t>& subset_;
  std::vector<double> costs_;
};

// Averages optimal vertices until every cell of the optimal face that can
// carry mass does. With fixed optimal duals, a feasible measure is optimal
// exactly when it only charges zero-reduced-cost cells.
std::vector<double> spread_over_face(const lp::ColumnSource& problem,
                                     const lp::SimplexResult& optimum,
                                     std::span<const double> b, const LpOptions& options) {
  std::vector<double> reduced(problem.cols());
  problem.price(optimum.duals, 1.0, reduced);
  std::vector<std::size_t> face;
  for (std::size_t j = 0; j < reduced.size(); ++j) {
    if (reduced[j] <= options.face_tol || optimum.x[j] > 0.0) face.push_back(j);
  }

  std::vector<double> sum = optimum.x;
  std::size_t count = 1;
  std::vector<bool> settled(face.size(), false);
  for (std::size_t k = 0; k < face.size(); ++k) settled[k] = optimum.x[face[k]] > 0.0;

  for (std::size_t k = 0; k < face.size(); ++k) {
    if (settled[k]) continue;
    std::vector<double> costs(face.size(), 0.0);
    costs[k] = -1.0;
    const SubsetColumns sub(problem, face, std::move(costs));
    const lp::SimplexResult r = lp::solve(sub, b, options.simplex);
    settled[k] = true;
    if (r.status != lp::SimplexStatus::kOptimal || !(r.x[k] > 0.0)) continue;
    for (std::size_t q = 0; q < face.size(); ++q) {
      if (r.x[q] > 0.0) {
        sum[face[q]] += r.x[q];
        settled[q] = true;
      }
    }
    ++count;
  }
  for (double& w : sum) w /= static_cast<double>(count);
  return sum;
}

}  // namespace

CriticalValueReport alpha_lp(const LagrangianSpec& spec, const PhaseGrid& grid,
                             const CohomologyClass& c, int fourier_order) {
  LpOptions options;
  options.fourier_order = fourier_order;
  return alpha_lp(spec, grid, c, options);
}

CriticalValueReport alpha_lp(const LagrangianSpec& spec, const PhaseGrid& grid,
                             const CohomologyClass& c, const LpOptions& options) {
  spec.validate();
  grid.validate();
  const int order = options.fourier_order;
  if (order < 1) throw std::invalid_argument("fourier order must be at least 1");
  if (2 * order >= grid.nx) {
    throw std::invalid_argument("fourier order must stay below nx / 2 to avoid aliasing");
  }
  const OccupationLp problem(spec, grid, c.scalar(), order);
  std::vector<double> b(problem.rows(), 0.0);
  b[0] = 1.0;
  const lp::SimplexResult res = lp::solve(problem, b, options.simplex);
  if (res.status != lp::SimplexStatus::kOptimal) {
    // The uniform measure on {v = 0} is always feasible and the grid is
    // compact, so anything else is a solver failure.
    throw std::runtime_error("occupation LP failed: " + lp::to_string(res.status));
  }

  OccupationMeasure mu;
  mu.grid = grid;
  mu.weights = options.spread_support ? spread_over_face(problem, res, b, options) : res.x;
  double mass = 0.0;
  double rotation = 0.0;
  for (int i = 0; i < grid.nx; ++i) {
    for (int j = 0; j < grid.nv; ++j) {
      const double w = mu.weight(i, j);
      mass += w;
      rotation += w * grid.velocity(j);
    }
  }
  mu.total_mass = mass;
  mu.rotation = rotation;

  CriticalValueReport report;
  report.method = AlphaMethod::kLinearProgram;
  report.alpha = -res.objective;
  const auto residuals = mu.closedness_residuals(order);
  report.residual = residuals.empty() ? 0.0 : *std::max_element(residuals.begin(), residuals.end());
  report.converged = true;
  report.iterations = res.iterations;
  report.status = "optimal";
  report.measure = std::move(mu);
  return report;
}

BetaEstimate beta_fenchel(std::span<const AlphaSample> samples, double h) {
  if (samples.empty()) throw std::invalid_argument("beta_fenchel needs at least one sample");
  double c_min = samples.front().c;
  double c_max = c_min;
  for (const auto& s : samples) {
    c_min = std::min(c_min, s.c);
    c_max = std::max(c_max, s.c);
  }
  BetaEstimate best{-std::numeric_limits<double>::infinity(), 0.0, false};
  for (const auto& s : samples) {
    const double value = s.c * h - s.alpha;
    if (value > best.beta) best = {value, s.c, false};
  }
  best.at_boundary = samples.size() < 3 || best.argmax_c == c_min || best.argmax_c == c_max;
  return best;
}

SlopeInterval subdifferential_alpha(std::span<const AlphaSample> samples, double c) {
  std::vector<AlphaSample> sorted(samples.begin(), samples.end());
  std::sort(sorted.begin(), sorted.end(),
            [](const AlphaSample& a, const AlphaSample& b) { return a.c < b.c; });
  const double scale = std::max(1.0, std::abs(c));
  auto it = std::find_if(sorted.begin(), sorted.end(),
                         [&](const AlphaSample& s) { return std::abs(s.c - c) <= 1e-9 * scale; });
  if (it == sorted.end()) throw std::invalid_argument("class is not among the alpha samples");
  if (it == sorted.begin() || std::next(it) == sorted.end()) {
    throw std::invalid_argument("class lies on the boundary of the sampled range");
  }
  const auto& prev = *std::prev(it);
  const auto& next = *std::next(it);
  return {(it->alpha - prev.alpha) / (it->c - prev.c), (next.alpha - it->alpha) / (next.c - it->c)};
}

}  // namespace matherkit
