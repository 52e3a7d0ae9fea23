// Tonelli Lagrangians on the circle: L(x, v) = m v^2 / 2 - U(x) + phi(x).
#pragma once

#include <cstddef>
#include <numbers>
#include <utility>
#include <variant>
#include <vector>

namespace matherkit {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Reduces a lifted position to [0, 2*pi).
double wrap_position(double x);

/// Shortest arc length between two positions on the circle of circumference 2*pi.
double torus_distance(double a, double b);

/// A 2*pi-periodic real function built from a sum of terms.
///
/// Two term kinds exist: a truncated Fourier series and a "Mather bump"
/// A * (1 - exp(-(d / width)^2)), where d is the distance to a union of
/// arcs. The bump vanishes with zero derivative on the arcs and is
/// strictly positive off them.
class PeriodicFunction {
 public:
  struct Fourier {
    /// coefficients[k] = (a_k, b_k) for the term a_k cos(kx) + b_k sin(kx).
    std::vector<std::pair<double, double>> coefficients;
  };
  struct Arc {
    double lo;  // lifted start, lo <= hi < lo + 2*pi
    double hi;
  };
  struct Bump {
    double amplitude = 0.0;
    double width = 1.0;
    /// Disjoint arcs sorted by wrapped start. Empty means "everywhere off".
    std::vector<Arc> arcs;
    bool covers_circle = false;
  };
  using Term = std::variant<Fourier, Bump>;

  PeriodicFunction() = default;

  static PeriodicFunction zero() { return {}; }
  static PeriodicFunction fourier(std::vector<std::pair<double, double>> coefficients);
  /// cos(x) - 1, the pendulum potential energy.
  static PeriodicFunction pendulum();
  static PeriodicFunction constant(double value);
  /// Bump vanishing on the union of closed arcs [c - half_width, c + half_width].
  static PeriodicFunction bump(double amplitude, double width,
                               const std::vector<double>& centers, double half_width);

  double value(double x) const;
  double derivative(double x) const;

  bool is_zero() const { return terms_.empty(); }
  const std::vector<Term>& terms() const { return terms_; }

  PeriodicFunction operator+(const PeriodicFunction& other) const;
  PeriodicFunction scaled(double factor) const;

 private:
  std::vector<Term> terms_;
};

/// Mechanical Lagrangian on the circle.
///
/// L(x, v) = mass * v^2 / 2 - potential(x) + perturbation(x). The
/// conjugate Hamiltonian is H(x, p) = p^2 / (2 mass) + potential(x) - perturbation(x).
struct LagrangianSpec {
  int dimension = 1;
  double mass = 1.0;
  PeriodicFunction potential;
  PeriodicFunction perturbation;

  static LagrangianSpec pendulum();
  static LagrangianSpec free_particle();

  /// Throws std::invalid_argument unless mass > 0 and dimension == 1.
  void validate() const;

  /// U(x) - phi(x), the potential seen by the Euler-Lagrange flow.
  double effective_potential(double x) const {
    return potential.value(x) - perturbation.value(x);
  }
  /// Acceleration of the Euler-Lagrange flow at x.
  double acceleration(double x) const {
    return -(potential.derivative(x) - perturbation.derivative(x)) / mass;
  }

  LagrangianSpec with_perturbation(const PeriodicFunction& extra) const;
};

/// Constant closed one-form c dx, an element of H^1 of the torus.
struct CohomologyClass {
  std::vector<double> components;

  CohomologyClass() : components{0.0} {}
  explicit CohomologyClass(double c) : components{c} {}

  std::size_t dimension() const { return components.size(); }
  /// The single component of a class on the circle.
  double scalar() const;
};

struct PhaseState {
  double x;  // lifted position
  double v;
};

struct LegendreImage {
  double p;
  double hamiltonian;
};

struct OrbitSegment {
  std::vector<double> times;
  std::vector<PhaseState> states;
  std::vector<double> energy;
};

double eval_lagrangian(const LagrangianSpec& spec, double x, double v);

/// p = m v and H(x, p) = p v - L(x, v).
LegendreImage legendre(const LagrangianSpec& spec, double x, double v);

/// Energy H(x, m v) of a phase state.
double energy(const LagrangianSpec& spec, double x, double v);

/// Velocity-Verlet (leapfrog) step; dt may be negative to run the flow backward.
PhaseState leapfrog_step(const LagrangianSpec& spec, PhaseState state, double dt);

/// Fixed-step symplectic integration of the Euler-Lagrange flow.
/// Throws std::invalid_argument for step <= 0, n_steps < 0 or a non-finite start.
OrbitSegment integrate_orbit(const LagrangianSpec& spec, double x0, double v0,
                             double step, int n_steps);

}  // namespace matherkit
