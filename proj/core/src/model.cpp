#include "matherkit/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace matherkit {

double wrap_position(double x) {
  double r = std::fmod(x, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  if (r >= kTwoPi) r -= kTwoPi;
  return r;
}

double torus_distance(double a, double b) {
  const double d = wrap_position(a - b);
  return std::min(d, kTwoPi - d);
}

PeriodicFunction PeriodicFunction::fourier(std::vector<std::pair<double, double>> coefficients) {
  PeriodicFunction f;
  bool any = false;
  for (const auto& [a, b] : coefficients) any = any || a != 0.0 || b != 0.0;
  if (any) f.terms_.emplace_back(Fourier{std::move(coefficients)});
  return f;
}

PeriodicFunction PeriodicFunction::pendulum() { return fourier({{-1.0, 0.0}, {1.0, 0.0}}); }

PeriodicFunction PeriodicFunction::constant(double value) { return fourier({{value, 0.0}}); }

namespace {
// Arcs closer than this are treated as touching.
constexpr double kArcSlack = 1e-9;
}  // namespace

PeriodicFunction PeriodicFunction::bump(double amplitude, double width,
                                        const std::vector<double>& centers,
                                        double half_width) {
  if (!(width > 0.0)) throw std::invalid_argument("bump width must be positive");
  if (half_width < 0.0) throw std::invalid_argument("bump half width must be non-negative");
  PeriodicFunction f;
  if (amplitude == 0.0) return f;

  Bump bump{amplitude, width, {}, false};
  if (centers.empty()) {
    // Nothing to vanish on: the bump is the constant amplitude.
    f.terms_.emplace_back(Fourier{{{amplitude, 0.0}}});
    return f;
  }
  std::vector<Arc> raw;
  raw.reserve(centers.size());
  for (double c : centers) {
    const double lo = wrap_position(c - half_width);
    raw.push_back({lo, lo + 2.0 * half_width});
  }
  std::sort(raw.begin(), raw.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });

  std::vector<Arc> merged;
  for (const Arc& a : raw) {
    if (!merged.empty() && a.lo <= merged.back().hi + kArcSlack) {
      merged.back().hi = std::max(merged.back().hi, a.hi);
    } else {
      merged.push_back(a);
    }
  }
  // The last arc may wrap onto the first.
  while (merged.size() > 1 && merged.back().hi + kArcSlack >= merged.front().lo + kTwoPi) {
    merged.front().lo = merged.back().lo - kTwoPi;
    merged.front().hi = std::max(merged.front().hi, merged.back().hi - kTwoPi);
    merged.pop_back();
  }
  const Arc& first = merged.front();
  if (merged.size() == 1 && first.hi - first.lo + kArcSlack >= kTwoPi) bump.covers_circle = true;
  if (bump.covers_circle) return f;  // vanishes identically

  bump.arcs = std::move(merged);
  f.terms_.emplace_back(std::move(bump));
  return f;
}

namespace {

// Signed distance data for a point relative to a set of arcs: distance to the
// nearest arc and the derivative of that distance with respect to x.
struct ArcDistance {
  double distance;
  double slope;
};

ArcDistance distance_to_arcs(const std::vector<PeriodicFunction::Arc>& arcs, double x) {
  const double xw = wrap_position(x);
  ArcDistance best{std::numeric_limits<double>::infinity(), 0.0};
  // Arcs are few after merging for typical Mather sets; a linear scan keeps
  // the wrap-around logic obvious.
  for (const auto& arc : arcs) {
    for (double shift : {-kTwoPi, 0.0, kTwoPi}) {
      const double lo = arc.lo + shift;
      const double hi = arc.hi + shift;
      if (xw >= lo && xw <= hi) return {0.0, 0.0};
      if (xw < lo && lo - xw < best.distance) best = {lo - xw, -1.0};
      if (xw > hi && xw - hi < best.distance) best = {xw - hi, 1.0};
    }
  }
  return best;
}

struct TermEval {
  double x;
  double operator()(const PeriodicFunction::Fourier& f) const {
    double s = 0.0;
    for (std::size_t k = 0; k < f.coefficients.size(); ++k) {
      const double kx = static_cast<double>(k) * x;
      s += f.coefficients[k].first * std::cos(kx) + f.coefficients[k].second * std::sin(kx);
    }
    return s;
  }
  double operator()(const PeriodicFunction::Bump& b) const {
    const auto d = distance_to_arcs(b.arcs, x);
    const double r = d.distance / b.width;
    return b.amplitude * (1.0 - std::exp(-r * r));
  }
};

struct TermDerivative {
  double x;
  double operator()(const PeriodicFunction::Fourier& f) const {
    double s = 0.0;
    for (std::size_t k = 1; k < f.coefficients.size(); ++k) {
      const double kd = static_cast<double>(k);
      s += kd * (-f.coefficients[k].first * std::sin(kd * x) +
                 f.coefficients[k].second * std::cos(kd * x));
    }
    return s;
  }
  double operator()(const PeriodicFunction::Bump& b) const {
    const auto d = distance_to_arcs(b.arcs, x);
    if (d.distance == 0.0) return 0.0;
    const double r = d.distance / b.width;
    return b.amplitude * 2.0 * d.distance / (b.width * b.width) * std::exp(-r * r) * d.slope;
  }
};

}  // namespace

double PeriodicFunction::value(double x) const {
  x = wrap_position(x);
  double s = 0.0;
  for (const auto& t : terms_) s += std::visit(TermEval{x}, t);
  return s;
}

double PeriodicFunction::derivative(double x) const {
  x = wrap_position(x);
  double s = 0.0;
  for (const auto& t : terms_) s += std::visit(TermDerivative{x}, t);
  return s;
}

PeriodicFunction PeriodicFunction::operator+(const PeriodicFunction& other) const {
  PeriodicFunction out = *this;
  out.terms_.insert(out.terms_.end(), other.terms_.begin(), other.terms_.end());
  return out;
}

PeriodicFunction PeriodicFunction::scaled(double factor) const {
  PeriodicFunction out;
  if (factor == 0.0) return out;
  for (auto t : terms_) {
    if (auto* f = std::get_if<Fourier>(&t)) {
      for (auto& [a, b] : f->coefficients) {
        a *= factor;
        b *= factor;
      }
    } else {
      std::get<Bump>(t).amplitude *= factor;
    }
    out.terms_.push_back(std::move(t));
  }
  return out;
}

LagrangianSpec LagrangianSpec::pendulum() {
  LagrangianSpec s;
  s.potential = PeriodicFunction::pendulum();
  return s;
}

LagrangianSpec LagrangianSpec::free_particle() { return LagrangianSpec{}; }

void LagrangianSpec::validate() const {
  if (dimension != 1) throw std::invalid_argument("only dimension 1 is supported");
  if (!(mass > 0.0) || !std::isfinite(mass)) {
    throw std::invalid_argument("mass must be positive and finite");
  }
}

LagrangianSpec LagrangianSpec::with_perturbation(const PeriodicFunction& extra) const {
  LagrangianSpec s = *this;
  s.perturbation = perturbation + extra;
  return s;
}

double CohomologyClass::scalar() const {
  if (components.size() != 1) throw std::logic_error("cohomology class is not one-dimensional");
  return components.front();
}

double eval_lagrangian(const LagrangianSpec& spec, double x, double v) {
  return 0.5 * spec.mass * v * v - spec.effective_potential(x);
}

LegendreImage legendre(const LagrangianSpec& spec, double x, double v) {
  const double p = spec.mass * v;
  return {p, p * p / (2.0 * spec.mass) + spec.effective_potential(x)};
}

double energy(const LagrangianSpec& spec, double x, double v) {
  return 0.5 * spec.mass * v * v + spec.effective_potential(x);
}

PhaseState leapfrog_step(const LagrangianSpec& spec, PhaseState s, double dt) {
  const double half = 0.5 * dt;
  const double v_half = s.v + half * spec.acceleration(s.x);
  const double x_new = s.x + dt * v_half;
  return {x_new, v_half + half * spec.acceleration(x_new)};
}

OrbitSegment integrate_orbit(const LagrangianSpec& spec, double x0, double v0, double step,
                             int n_steps) {
  spec.validate();
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("step must be positive");
  if (n_steps < 0) throw std::invalid_argument("n_steps must be non-negative");
  if (!std::isfinite(x0) || !std::isfinite(v0)) {
    throw std::invalid_argument("initial state must be finite");
  }
  OrbitSegment orbit;
  const auto n = static_cast<std::size_t>(n_steps) + 1;
  orbit.times.reserve(n);
  orbit.states.reserve(n);
  orbit.energy.reserve(n);

  PhaseState s{x0, v0};
  for (int k = 0; k <= n_steps; ++k) {
    if (k > 0) s = leapfrog_step(spec, s, step);
    orbit.times.push_back(k * step);
    orbit.states.push_back(s);
    orbit.energy.push_back(energy(spec, s.x, s.v));
  }
  return orbit;
}

}  // namespace matherkit
