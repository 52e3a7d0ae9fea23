#include "matherkit/calibration.hpp"

#include <cmath>
#include <stdexcept>

namespace matherkit {

namespace {

// Leapfrog walker that accumulates the trapezoid action of L - c v + alpha.
struct Walker {
  const LagrangianSpec* spec;
  double dt;  // signed
  PhaseState state;
  double lagrangian_integral = 0.0;  // int L dt over the covered time span
  double elapsed = 0.0;              // |time covered|
  double last_l;    // L at the current state
  double last_acc;  // acceleration at the current position

  // Velocity Verlet, reusing the end-point acceleration of the previous step.
  void step() {
    const double v_half = state.v + 0.5 * dt * last_acc;
    state.x += dt * v_half;
    last_acc = spec->acceleration(state.x);
    state.v = v_half + 0.5 * dt * last_acc;
    const double l1 = eval_lagrangian(*spec, state.x, state.v);
    lagrangian_integral += 0.5 * (last_l + l1) * std::abs(dt);
    last_l = l1;
    elapsed += std::abs(dt);
  }
};

}  // namespace

DefectResult orbit_defect(const LagrangianSpec& spec, const PotentialTable& phi, double c,
                          double alpha_hat, PhaseState start, DefectKind kind,
                          const CalibrationSettings& settings) {
  if (!(settings.horizon > 0.0) || !(settings.dt > 0.0) || !(settings.checkpoint > 0.0)) {
    throw std::invalid_argument("calibration horizon, dt and checkpoint must be positive");
  }
  if (!std::isfinite(start.x) || !std::isfinite(start.v)) {
    throw std::invalid_argument("calibration start state is not finite");
  }
  const double half = settings.forward_only ? settings.horizon : 0.5 * settings.horizon;
  const int total_steps = static_cast<int>(std::lround(half / settings.dt));
  const double dt = half / std::max(total_steps, 1);
  const int per_check = std::max(1, static_cast<int>(std::lround(settings.checkpoint / dt)));

  const double l_start = eval_lagrangian(spec, start.x, start.v);
  const double acc_start = spec.acceleration(start.x);
  Walker fwd{&spec, dt, start, 0.0, 0.0, l_start, acc_start};
  Walker bwd{&spec, -dt, start, 0.0, 0.0, l_start, acc_start};

  auto evaluate = [&]() {
    const double a = bwd.state.x;  // earlier endpoint
    const double b = fwd.state.x;  // later endpoint
    const double span = fwd.elapsed + bwd.elapsed;
    const double action =
        fwd.lagrangian_integral + bwd.lagrangian_integral - c * (b - a) + alpha_hat * span;
    if (kind == DefectKind::kSemiStatic) return action - phi.interpolate(a, b);
    return action + phi.interpolate(b, a);
  };

  DefectResult out;
  const int steps = std::max(total_steps, 1);
  for (int n = 1; n <= steps; ++n) {
    fwd.step();
    if (!settings.forward_only) bwd.step();
    if (std::abs(fwd.state.v) > settings.v_max || std::abs(bwd.state.v) > settings.v_max) {
      out.left_box = true;
      out.defect = evaluate();
      return out;
    }
    if (n % per_check == 0 && n < steps) {
      const double partial = evaluate();
      if (partial > settings.reject_above) {
        out.defect = partial;
        out.stopped_early = true;
        return out;
      }
    }
  }
  out.defect = evaluate();
  return out;
}

}  // namespace matherkit
