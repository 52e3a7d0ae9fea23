#include <cmath>
#include <random>

#include "doctest.h"
#include "matherkit/critical.hpp"
#include "matherkit/potential.hpp"
#include "oracles.hpp"

using namespace matherkit;

namespace {

const PhaseGrid kGrid{};
constexpr double kEps = kDefaultPotentialTolerance;
constexpr int kTMin = 50;
constexpr int kTMax = 200;

struct Tables {
  ActionKernel kernel;
  double alpha;
  PotentialPair pair;
};

Tables tables_at(const LagrangianSpec& spec, double c, const PhaseGrid& g = kGrid,
                 int t_min = kTMin, int t_max = kTMax) {
  ActionKernel k = build_kernel(spec, g, CohomologyClass(c));
  const double a = alpha_lax_oleinik(k).alpha;
  PotentialPair pair = potential_sweep(k, a, t_min, t_max);
  return {std::move(k), a, std::move(pair)};
}

int index_of(double x) { return kGrid.position_index(x); }

}  // namespace

TEST_CASE("fixed-time action") {
  const auto pend = LagrangianSpec::pendulum();
  SUBCASE("resting is an upper bound on the diagonal") {
    const ActionKernel k = build_kernel(pend, kGrid, CohomologyClass(0.7));
    const double a = 0.05;
    const int n = 12;
    const PotentialTable h = h_c_table(k, kGrid, a, n);
    for (int i = 0; i < kGrid.nx; i += 7) {
      const double rest = kGrid.tau * n * (eval_lagrangian(pend, kGrid.position(i), 0.0) + a);
      CHECK(h.at(i, i) <= rest + 1e-12);
    }
  }
  SUBCASE("free particle follows straight lines") {
    const ActionKernel k = build_kernel(LagrangianSpec::free_particle(), kGrid, CohomologyClass(0.0));
    const int n = 10;
    const double t = n * kGrid.tau;
    const PotentialTable h = h_c_table(k, kGrid, 0.0, n);
    for (int i = 0; i < kGrid.nx; i += 9) {
      for (int j = 0; j < kGrid.nx; j += 11) {
        const double d = torus_distance(kGrid.position(i), kGrid.position(j));
        CHECK(std::abs(h.at(i, j) - d * d / (2.0 * t)) <= kGrid.hx());
      }
    }
  }
  SUBCASE("pendulum from the fixed point to the bottom in time 20") {
    const ActionKernel k = build_kernel(pend, kGrid, CohomologyClass(0.0));
    const double a = alpha_lax_oleinik(k).alpha;
    const PotentialTable h = h_c_table(k, kGrid, a, 100);
    CHECK(std::abs(h.at(0, index_of(oracle::kPi)) - oracle::separatrix_half_action()) <= 0.15);
  }
  CHECK_THROWS_AS(h_c_table(build_kernel(pend, kGrid, CohomologyClass(0.0)), kGrid, 0.0, 0),
                  std::invalid_argument);
}

TEST_CASE("semigroup property of the min-plus powers") {
  PhaseGrid g;
  g.nx = 64;
  const ActionKernel k = build_kernel(LagrangianSpec::pendulum(), g, CohomologyClass(0.9));
  for (auto [m, n] : {std::pair{1, 1}, {3, 5}, {7, 2}}) {
    const PotentialTable hm = h_c_table(k, g, 0.1, m);
    const PotentialTable hn = h_c_table(k, g, 0.1, n);
    const PotentialTable hmn = h_c_table(k, g, 0.1, m + n);
    const std::vector<double> composed = min_plus_product(hm.values, hn.values, g.nx);
    for (std::size_t e = 0; e < composed.size(); ++e) {
      if (std::isinf(composed[e])) {
        CHECK(std::isinf(hmn.values[e]));
        continue;
      }
      CHECK(hmn.values[e] <= composed[e] + 1e-9);
      CHECK(hmn.values[e] == doctest::Approx(composed[e]).epsilon(1e-9));
    }
  }
}

TEST_CASE("Mane potential of the pendulum at c = 0") {
  const Tables t = tables_at(LagrangianSpec::pendulum(), 0.0);
  const PotentialTable& phi = t.pair.mane;
  const double half = oracle::separatrix_half_action();
  const int o = index_of(0.0), p = index_of(oracle::kPi);
  for (int i = 0; i < kGrid.nx; ++i) CHECK(std::abs(phi.at(i, i)) <= kEps);
  CHECK(std::abs(phi.at(o, p) - half) <= 0.15);
  CHECK(std::abs(phi.at(p, o) - half) <= 0.15);
  CHECK(std::abs(d_c(phi, o, p) - 2.0 * half) <= 0.3);
  for (int i = 0; i < kGrid.nx; i += 13) CHECK(std::abs(d_c(phi, i, i)) <= 2.0 * kEps);
  // The cheapest return to the bottom runs around the whole separatrix loop.
  CHECK(std::abs(t.pair.barrier.at(p, p) - 2.0 * half) <= 0.3);
  CHECK_THROWS_AS(d_c(t.pair.barrier, o, p), std::invalid_argument);
}

TEST_CASE("at the flat edge the separatrix is static") {
  const Tables t = tables_at(LagrangianSpec::pendulum(), oracle::kFlatEdge);
  const int o = index_of(0.0), p = index_of(oracle::kPi);
  CHECK(std::abs(d_c(t.pair.mane, o, p)) <= 0.3);
  for (int i = 0; i < kGrid.nx; ++i) CHECK(std::abs(t.pair.barrier.at(i, i)) <= 0.3);
}

TEST_CASE("free particle potentials vanish") {
  // A long time step makes slow drifts cheap enough to resolve within eps.
  PhaseGrid g;
  g.nx = 128;
  g.tau = 2.0;
  g.lift_window = 1;
  const Tables t = tables_at(LagrangianSpec::free_particle(), 0.0, g, 5, 200);
  double worst = 0.0;
  for (double v : t.pair.mane.values) worst = std::max(worst, std::abs(v));
  CHECK(worst <= kEps);
  for (int i = 0; i < g.nx; ++i) CHECK(std::abs(t.pair.barrier.at(i, i)) <= kEps);

  const Tables d = tables_at(LagrangianSpec::free_particle(), 0.0);
  for (int i = 0; i < kGrid.nx; ++i) CHECK(std::abs(d.pair.barrier.at(i, i)) <= kEps);
}

TEST_CASE("potential properties over random pairs and triples") {
  const auto pend = LagrangianSpec::pendulum();
  std::mt19937_64 rng(23);
  std::uniform_int_distribution<int> ui(0, kGrid.nx - 1);
  for (double c : {0.0, 0.8, oracle::kFlatEdge, 1.6, -2.0}) {
    const Tables t = tables_at(pend, c);
    const PotentialTable& phi = t.pair.mane;
    double min_d = INFINITY;
    for (int i = 0; i < kGrid.nx; ++i)
      for (int j = 0; j < kGrid.nx; ++j) min_d = std::min(min_d, d_c(phi, i, j));
    CHECK(min_d >= -2.0 * kEps);
    double slack = 0.0;
    for (int k = 0; k < 1000; ++k) {
      const int x = ui(rng), y = ui(rng), z = ui(rng);
      slack = std::max(slack, phi.at(x, z) - phi.at(x, y) - phi.at(y, z));
    }
    CHECK(slack <= 1e-6);
  }
}

TEST_CASE("diagonal stays flat across the flat") {
  for (double c : {0.0, 0.5, 1.0}) {
    const Tables t = tables_at(LagrangianSpec::pendulum(), c);
    for (int i = 0; i < kGrid.nx; ++i) CHECK(std::abs(t.pair.mane.at(i, i)) <= kEps);
  }
}

TEST_CASE("sweep, separate tables and the long-time limit agree") {
  PhaseGrid g;
  g.nx = 64;
  const auto pend = LagrangianSpec::pendulum();
  const ActionKernel k = build_kernel(pend, g, CohomologyClass(0.6));
  const double a = alpha_lax_oleinik(k).alpha;
  const PotentialPair pair = potential_sweep(k, a, 10, 60);
  const PotentialTable phi = mane_potential(k, g, a, 60);
  const PotentialTable bar = peierls_barrier(k, g, a, 10, 60);
  const PotentialTable lim = mane_potential_apsp(k, a);
  CHECK(phi.kind == PotentialKind::kManePotential);
  CHECK(bar.kind == PotentialKind::kBarrier);
  for (std::size_t e = 0; e < phi.values.size(); ++e) {
    CHECK(pair.mane.values[e] == doctest::Approx(phi.values[e]));
    CHECK(pair.barrier.values[e] == doctest::Approx(bar.values[e]));
    CHECK(lim.values[e] <= phi.values[e] + 1e-9);
  }
}

TEST_CASE("an underestimated critical value is a negative cycle") {
  PhaseGrid g;
  g.nx = 64;
  const ActionKernel k = build_kernel(LagrangianSpec::pendulum(), g, CohomologyClass(2.0));
  const double a = alpha_lax_oleinik(k).alpha;
  CHECK_THROWS_AS(mane_potential(k, g, a - 0.2, 100), NegativeCycleError);
  try {
    potential_sweep(k, a - 0.2, 10, 100);
    FAIL("expected a negative cycle");
  } catch (const NegativeCycleError& e) {
    CHECK(e.cycle_value() < -kEps);
  }
}

TEST_CASE("interpolation reproduces grid values and wraps") {
  PhaseGrid g;
  g.nx = 64;
  const ActionKernel k = build_kernel(LagrangianSpec::pendulum(), g, CohomologyClass(0.0));
  const PotentialTable phi = mane_potential(k, g, 0.0, 60);
  CHECK(phi.interpolate(g.position(5), g.position(40)) == doctest::Approx(phi.at(5, 40)));
  CHECK(phi.interpolate(g.position(5) + kTwoPi, g.position(40) - kTwoPi) ==
        doctest::Approx(phi.at(5, 40)));
  const double mid = phi.interpolate(0.5 * (g.position(5) + g.position(6)), g.position(40));
  CHECK(mid == doctest::Approx(0.5 * (phi.at(5, 40) + phi.at(6, 40))));
}
