#include "matherkit/sets.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "matherkit/parallel.hpp"

namespace matherkit {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Trial {
  double v = 0.0;
  double defect = kInf;
  bool usable = false;  // stayed in the box
};

Trial evaluate(const LagrangianSpec& spec, const PotentialTable& phi, double c, double alpha_hat,
               double x, double v, DefectKind kind, const CalibrationSettings& settings) {
  const DefectResult r = orbit_defect(spec, phi, c, alpha_hat, {x, v}, kind, settings);
  return {v, r.defect, !r.left_box};
}

// Golden-section search on [lo, hi]; f returns a Trial for a velocity.
template <class F>
Trial golden_minimize(F&& f, double lo, double hi, int steps, Trial best) {
  const double inv_phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double a = lo, b = hi;
  double x1 = b - inv_phi * (b - a);
  double x2 = a + inv_phi * (b - a);
  Trial f1 = f(x1), f2 = f(x2);
  auto score = [](const Trial& t) { return t.usable ? t.defect : kInf; };
  auto keep = [&](const Trial& t) {
    if (score(t) < score(best)) best = t;
  };
  keep(f1);
  keep(f2);
  for (int s = 0; s < steps; ++s) {
    if (score(f1) <= score(f2)) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - inv_phi * (b - a);
      f1 = f(x1);
      keep(f1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + inv_phi * (b - a);
      f2 = f(x2);
      keep(f2);
    }
  }
  return best;
}

CalibrationSettings boxed(CalibrationSettings s, const PhaseGrid& grid) {
  s.v_max = std::min(s.v_max, grid.v_max);
  return s;
}

}  // namespace

std::string to_string(CloudLabel label) {
  switch (label) {
    case CloudLabel::kMather: return "mather";
    case CloudLabel::kAubry: return "aubry";
    case CloudLabel::kMane: return "mane";
    case CloudLabel::kReference: return "reference";
  }
  return "unknown";
}

double phase_distance(const PhaseState& a, const PhaseState& b) {
  const double dx = torus_distance(a.x, b.x);
  const double dv = a.v - b.v;
  return std::sqrt(dx * dx + dv * dv);
}

PointCloud mather_support(const OccupationMeasure& measure, double mass_fraction) {
  if (!(mass_fraction > 0.0 && mass_fraction < 1.0)) {
    throw std::invalid_argument("mass_fraction must lie in (0, 1)");
  }
  double total = 0.0;
  for (double w : measure.weights) total += std::max(w, 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("measure has no mass");

  std::vector<std::size_t> order(measure.weights.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return measure.weights[a] > measure.weights[b];
  });

  PointCloud cloud;
  cloud.label = CloudLabel::kMather;
  cloud.tolerance = 1.0 - mass_fraction;
  const auto nv = static_cast<std::size_t>(measure.grid.nv);
  double captured = 0.0;
  for (std::size_t idx : order) {
    if (captured >= mass_fraction * total) break;
    const double w = measure.weights[idx];
    if (!(w > 0.0)) break;
    captured += w;
    const int i = static_cast<int>(idx / nv);
    const int j = static_cast<int>(idx % nv);
    cloud.points.push_back({measure.grid.position(i), measure.grid.velocity(j)});
  }
  return cloud;
}

std::vector<int> projected_aubry(const PotentialTable& barrier, double epsilon) {
  if (barrier.kind != PotentialKind::kBarrier) {
    throw std::invalid_argument("projected_aubry needs a barrier table");
  }
  std::vector<int> out;
  for (int i = 0; i < barrier.nx; ++i) {
    if (barrier.at(i, i) <= epsilon) out.push_back(i);
  }
  return out;
}

AubryLift lift_aubry(const LagrangianSpec& spec, const PhaseGrid& grid, const PotentialTable& phi,
                     double c, double alpha_hat, std::span<const int> positions,
                     const LiftOptions& options) {
  if (phi.kind != PotentialKind::kManePotential) {
    throw std::invalid_argument("lift_aubry needs a Mane potential table");
  }
  CalibrationSettings screen = boxed(options.orbit, grid);
  screen.reject_above = options.epsilon * std::max(1.0, options.screen_factor);
  CalibrationSettings exact = boxed(options.orbit, grid);

  std::vector<Trial> best(positions.size());
  parallel_for(0, positions.size(), [&](std::size_t k) {
    const double x = grid.position(positions[k]);
    Trial top;
    for (int j = 0; j < grid.nv; ++j) {
      const Trial t =
          evaluate(spec, phi, c, alpha_hat, x, grid.velocity(j), DefectKind::kStatic, screen);
      if (t.usable && t.defect < top.defect) top = t;
    }
    if (!top.usable) {
      best[k] = top;
      return;
    }
    top = evaluate(spec, phi, c, alpha_hat, x, top.v, DefectKind::kStatic, exact);
    auto f = [&](double v) {
      return evaluate(spec, phi, c, alpha_hat, x, v, DefectKind::kStatic, exact);
    };
    const double lo = std::max(-grid.v_max, top.v - grid.hv());
    const double hi = std::min(grid.v_max, top.v + grid.hv());
    best[k] = golden_minimize(f, lo, hi, options.refine_steps, top);
  });

  AubryLift out;
  out.cloud.label = CloudLabel::kAubry;
  out.cloud.tolerance = options.epsilon;
  for (std::size_t k = 0; k < positions.size(); ++k) {
    if (best[k].usable && best[k].defect <= options.epsilon) {
      out.cloud.points.push_back({grid.position(positions[k]), best[k].v});
      out.defects.push_back(best[k].defect);
    } else {
      ++out.dropped;
    }
  }
  return out;
}

ManeResult mane_set(const LagrangianSpec& spec, const PhaseGrid& grid, const PotentialTable& phi,
                    double c, double alpha_hat, const ManeOptions& options) {
  if (phi.kind != PotentialKind::kManePotential) {
    throw std::invalid_argument("mane_set needs a Mane potential table");
  }
  if (options.subsamples < 1) throw std::invalid_argument("subsamples must be at least 1");
  CalibrationSettings settings = boxed(options.orbit, grid);
  settings.reject_above = options.epsilon * std::max(1.0, options.refine_factor);

  const auto nx = static_cast<std::size_t>(grid.nx);
  const auto nv = static_cast<std::size_t>(grid.nv);
  const int s = options.subsamples;
  const double spacing = s > 1 ? grid.hv() / (s - 1) : grid.hv();
  std::vector<Trial> cell(nx * nv);
  std::vector<std::size_t> escaped(nx * nv, 0);

  parallel_for(0, nx * nv, [&](std::size_t idx) {
    const double x = grid.position(static_cast<int>(idx / nv));
    const double vc = grid.velocity(static_cast<int>(idx % nv));
    const double lo = std::max(-grid.v_max, vc - 0.5 * grid.hv());
    const double hi = std::min(grid.v_max, vc + 0.5 * grid.hv());
    Trial top;
    for (int k = 0; k < s; ++k) {
      const double v = s > 1 ? vc + (k * spacing - 0.5 * grid.hv()) : vc;
      if (v < lo - 1e-12 || v > hi + 1e-12) continue;
      const Trial t = evaluate(spec, phi, c, alpha_hat, x, v, DefectKind::kSemiStatic, settings);
      if (!t.usable) {
        ++escaped[idx];
        continue;
      }
      if (t.defect < top.defect) top = t;
    }
    if (top.usable && top.defect > options.epsilon &&
        top.defect <= settings.reject_above && options.refine_steps > 0) {
      auto f = [&](double v) {
        return evaluate(spec, phi, c, alpha_hat, x, v, DefectKind::kSemiStatic, settings);
      };
      top = golden_minimize(f, std::max(lo, top.v - spacing), std::min(hi, top.v + spacing),
                            options.refine_steps, top);
    }
    cell[idx] = top;
  });

  ManeResult out;
  out.cloud.label = CloudLabel::kMane;
  out.cloud.tolerance = options.epsilon;
  out.sampled = nx * nv;
  for (std::size_t idx = 0; idx < nx * nv; ++idx) {
    out.left_box += escaped[idx];
    if (cell[idx].usable && cell[idx].defect <= options.epsilon) {
      out.cloud.points.push_back({grid.position(static_cast<int>(idx / nv)), cell[idx].v});
    }
  }
  return out;
}

double directed_hausdorff(const PointCloud& a, const PointCloud& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("hausdorff: empty point cloud");
  std::vector<double> nearest(a.size());
  parallel_for(0, a.size(), [&](std::size_t i) {
    double best = kInf;
    for (const auto& q : b.points) best = std::min(best, phase_distance(a.points[i], q));
    nearest[i] = best;
  });
  return *std::max_element(nearest.begin(), nearest.end());
}

double hausdorff(const PointCloud& a, const PointCloud& b) {
  return std::max(directed_hausdorff(a, b), directed_hausdorff(b, a));
}

double cell_excess(const PointCloud& a, const PointCloud& b, const PhaseGrid& grid) {
  if (a.empty() || b.empty()) throw std::invalid_argument("cell_excess: empty point cloud");
  double worst = 0.0;
  for (const auto& p : a.points) {
    double best = kInf;
    for (const auto& q : b.points) {
      best = std::min(best, std::max(torus_distance(p.x, q.x) / grid.hx(),
                                     std::abs(p.v - q.v) / grid.hv()));
    }
    worst = std::max(worst, best);
  }
  return worst;
}

std::vector<double> hyperbolic_fixed_points(const LagrangianSpec& spec, const PhaseGrid& grid) {
  std::vector<double> out;
  const double h = grid.hx();
  for (int i = 0; i < grid.nx; ++i) {
    double lo = i * h;
    double hi = lo + h;
    double a_lo = spec.acceleration(lo);
    const double a_hi = spec.acceleration(hi);
    if (!(a_lo < 0.0 && a_hi >= 0.0)) continue;
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      const double a_mid = spec.acceleration(mid);
      if (a_mid < 0.0) {
        lo = mid;
        a_lo = a_mid;
      } else {
        hi = mid;
      }
    }
    out.push_back(wrap_position(hi));
  }
  std::sort(out.begin(), out.end());
  return out;
}

GraphReport graph_check(const PointCloud& cloud, const PhaseGrid& grid, double lipschitz_bound,
                        std::span<const double> fixed_points) {
  GraphReport report;
  std::map<int, std::pair<double, double>> range;  // cell -> (min v, max v)
  std::map<int, std::pair<double, int>> mean;      // cell -> (sum v, count)
  for (const auto& p : cloud.points) {
    const int i = grid.position_index(p.x);
    auto [it, inserted] = range.emplace(i, std::make_pair(p.v, p.v));
    if (!inserted) {
      it->second.first = std::min(it->second.first, p.v);
      it->second.second = std::max(it->second.second, p.v);
    }
    auto& m = mean[i];
    m.first += p.v;
    m.second += 1;
  }
  report.cells = range.size();

  auto excluded = [&](int i) {
    for (double fp : fixed_points) {
      if (torus_distance(grid.position(i), fp) <= 2.0 * grid.hx() + 1e-12) return true;
    }
    return false;
  };
  for (const auto& [i, r] : range) {
    if (excluded(i)) {
      report.excluded_cells.push_back(i);
      continue;
    }
    report.max_spread = std::max(report.max_spread, r.second - r.first);
    const int next = (i + 1) % grid.nx;
    const auto it = mean.find(next);
    if (it == mean.end() || excluded(next)) continue;
    const double v0 = mean[i].first / mean[i].second;
    const double v1 = it->second.first / it->second.second;
    report.max_slope = std::max(report.max_slope, std::abs(v1 - v0) / grid.hx());
  }
  report.passed = report.max_spread <= 2.0 * grid.hv() + 1e-12 &&
                  report.max_slope <= lipschitz_bound;
  return report;
}

}  // namespace matherkit
