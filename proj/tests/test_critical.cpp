#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "matherkit/critical.hpp"
#include "oracles.hpp"

using namespace matherkit;

namespace {

const PhaseGrid kGrid{};

double lax_alpha(const LagrangianSpec& spec, double c, const PhaseGrid& g = kGrid) {
  const CriticalValueReport r = alpha_lax_oleinik(build_kernel(spec, g, CohomologyClass(c)));
  REQUIRE(r.converged);
  return r.alpha;
}

CriticalValueReport lp_report(const LagrangianSpec& spec, double c, const PhaseGrid& g = kGrid) {
  LpOptions opt;
  opt.fourier_order = std::min(opt.fourier_order, g.nx / 2 - 1);
  const CriticalValueReport r = alpha_lp(spec, g, CohomologyClass(c), opt);
  REQUIRE(r.status == "optimal");
  REQUIRE(r.measure.has_value());
  return r;
}

std::vector<AlphaSample> sample_lax(const LagrangianSpec& spec, double lo, double hi, int n) {
  std::vector<AlphaSample> out;
  const ActionKernel base = build_kernel(spec, kGrid, CohomologyClass(lo));
  for (int k = 0; k < n; ++k) {
    const double c = lo + (hi - lo) * k / (n - 1);
    out.push_back({c, alpha_lax_oleinik(shift_kernel(base, CohomologyClass(c))).alpha});
  }
  return out;
}

}  // namespace

TEST_CASE("free particle critical values are c^2 / 2") {
  const auto free = LagrangianSpec::free_particle();
  for (double c : {0.0, 1.0}) {
    CHECK(std::abs(lax_alpha(free, c) - 0.5 * c * c) <= 1e-3);
    CHECK(std::abs(lp_report(free, c).alpha - 0.5 * c * c) <= 1e-3);
  }
}

TEST_CASE("free particle minimizing measures sit on v = c") {
  const auto free = LagrangianSpec::free_particle();
  const CriticalValueReport r0 = lp_report(free, 0.0);
  const int rest = kGrid.velocity_index(0.0);
  for (int i = 0; i < kGrid.nx; ++i) {
    for (int j = 0; j < kGrid.nv; ++j) {
      if (j != rest) CHECK(r0.measure->weight(i, j) <= 1e-12);
    }
  }
  const CriticalValueReport r1 = lp_report(free, 1.0);
  double spread = 0.0;
  for (int i = 0; i < kGrid.nx; ++i)
    for (int j = 0; j < kGrid.nv; ++j)
      spread += r1.measure->weight(i, j) * std::abs(kGrid.velocity(j) - 1.0);
  CHECK(spread / r1.measure->total_mass <= kGrid.hv());
}

TEST_CASE("pendulum is flat at c = 0 and rotating at c = 2") {
  const auto pend = LagrangianSpec::pendulum();
  CHECK(std::abs(lax_alpha(pend, 0.0)) <= 1e-2);
  CHECK(std::abs(lp_report(pend, 0.0).alpha) <= 1e-2);

  PhaseGrid coarse;
  coarse.nx = 64;
  coarse.nv = 65;
  const double reference = lp_report(pend, 2.0, coarse).alpha;
  const double exact = oracle::pendulum_alpha(2.0);
  CHECK(std::abs(lax_alpha(pend, 2.0) - reference) <= 1e-2);
  CHECK(std::abs(lax_alpha(pend, 2.0) - exact) <= 5e-3);
  CHECK(std::abs(lp_report(pend, 2.0).alpha - exact) <= 1e-3);
}

TEST_CASE("pendulum minimizing measure at c = 0 concentrates on the fixed point") {
  const CriticalValueReport r = lp_report(LagrangianSpec::pendulum(), 0.0);
  const OccupationMeasure& mu = *r.measure;
  for (int i = 0; i < kGrid.nx; ++i) {
    for (int j = 0; j < kGrid.nv; ++j) {
      if (mu.weight(i, j) <= 1e-9) continue;
      const double dx = torus_distance(kGrid.position(i), 0.0) / kGrid.hx();
      const double dv = std::abs(kGrid.velocity(j)) / kGrid.hv();
      CHECK(std::max(dx, dv) <= 2.0 + 1e-9);
    }
  }
}

TEST_CASE("LP measures are valid closed probability measures") {
  for (const auto& spec : {LagrangianSpec::pendulum(), LagrangianSpec::free_particle()}) {
    for (double c : {-1.5, 0.4, 2.0}) {
      const CriticalValueReport r = lp_report(spec, c);
      const OccupationMeasure& mu = *r.measure;
      double mass = 0.0;
      for (double w : mu.weights) {
        CHECK(w >= -1e-12);
        mass += w;
      }
      CHECK(std::abs(mass - 1.0) <= 1e-8);
      for (double res : mu.closedness_residuals(LpOptions{}.fourier_order)) CHECK(res <= 1e-8);
      CHECK(mu.average_action(spec, c) == doctest::Approx(-r.alpha).epsilon(1e-9));
    }
  }
}

TEST_CASE("adding a constant to L shifts alpha by minus that constant") {
  const auto pend = LagrangianSpec::pendulum();
  const auto shifted = pend.with_perturbation(PeriodicFunction::constant(0.3));
  for (double c : {0.0, 1.7}) {
    CHECK(lax_alpha(shifted, c) - lax_alpha(pend, c) == doctest::Approx(-0.3).epsilon(1e-9));
    CHECK(lp_report(shifted, c).alpha - lp_report(pend, c).alpha == doctest::Approx(-0.3).epsilon(1e-9));
  }
}

TEST_CASE("sampled alpha is convex") {
  const auto pend = LagrangianSpec::pendulum();
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> uc(-2.5, 2.5), ud(0.05, 0.8);
  const ActionKernel base = build_kernel(pend, kGrid, CohomologyClass(0.0));
  auto alpha = [&](double c) { return alpha_lax_oleinik(shift_kernel(base, CohomologyClass(c))).alpha; };
  for (int k = 0; k < 8; ++k) {
    const double c = uc(rng), d = ud(rng);
    CHECK(alpha(c) <= 0.5 * (alpha(c - d) + alpha(c + d)) + 1e-3);
  }
}

TEST_CASE("beta from the Fenchel transform") {
  const auto free = LagrangianSpec::free_particle();
  const auto free_samples = sample_lax(free, -3.0, 3.0, 61);
  CHECK(std::abs(beta_fenchel(free_samples, 1.0).beta - 0.5) <= 1e-2);

  const auto pend = LagrangianSpec::pendulum();
  const auto samples = sample_lax(pend, -3.0, 3.0, 121);
  CHECK(std::abs(beta_fenchel(samples, 0.0).beta) <= 1e-2);
  const BetaEstimate b = beta_fenchel(samples, 0.5);
  CHECK(b.beta >= oracle::kFlatEdge * 0.5 - 1e-2);
  CHECK_FALSE(b.at_boundary);
  // Fenchel inequality over the sampled grid.
  for (double h : {-1.5, -0.3, 0.0, 0.5, 1.2, 2.0}) {
    const double beta = beta_fenchel(samples, h).beta;
    for (const auto& s : samples) CHECK(s.c * h <= s.alpha + beta + 1e-2);
  }
  // A maximizer at the end of the range is flagged.
  CHECK(beta_fenchel(samples, 5.0).at_boundary);
}

TEST_CASE("one-sided slopes of alpha") {
  // Kernel speeds come in steps of hx / tau, so the Lax-Oleinik slope of the
  // free particle snaps to the nearest kernel speed; the LP velocity grid
  // contains v = 1 exactly.
  const auto free = LagrangianSpec::free_particle();
  std::vector<AlphaSample> fs;
  for (double c : {0.98, 0.99, 1.0, 1.01, 1.02}) fs.push_back({c, lp_report(free, c).alpha});
  const SlopeInterval s1 = subdifferential_alpha(fs, 1.0);
  CHECK(std::abs(s1.left - 1.0) <= 1e-2);
  CHECK(std::abs(s1.right - 1.0) <= 1e-2);

  const auto pend = LagrangianSpec::pendulum();
  const auto ps = sample_lax(pend, -0.1, 0.1, 3);
  const SlopeInterval s0 = subdifferential_alpha(ps, 0.0);
  CHECK(std::abs(s0.left) <= 1e-2);
  CHECK(std::abs(s0.right) <= 1e-2);

  const double e = oracle::kFlatEdge;
  const auto es = sample_lax(pend, e - 0.1, e + 0.1, 3);
  const SlopeInterval se = subdifferential_alpha(es, e);
  CHECK(std::abs(se.left) <= 1e-2);
  CHECK(se.right > 0.1);
  CHECK_THROWS_AS(subdifferential_alpha(es, e - 0.1), std::invalid_argument);
}

TEST_CASE("input checks") {
  const auto pend = LagrangianSpec::pendulum();
  PhaseGrid g;
  g.nx = 32;
  CHECK_THROWS_AS(alpha_lp(pend, g, CohomologyClass(0.0), 16), std::invalid_argument);
  CHECK_THROWS_AS(alpha_lp(pend, g, CohomologyClass(0.0), 0), std::invalid_argument);
  // Without windings and with a tiny reach the position graph falls apart.
  PhaseGrid stuck;
  stuck.nx = 32;
  stuck.lift_window = 0;
  stuck.tau = 0.01;
  stuck.v_max = 1.0;
  CHECK_THROWS_AS(alpha_lax_oleinik(build_kernel(pend, stuck, CohomologyClass(0.0))),
                  std::invalid_argument);
  CHECK(to_string(AlphaMethod::kLinearProgram) == "lp");
}
