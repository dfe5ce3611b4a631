#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlab/bsde.hpp"
#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/presets.hpp"
#include "vlab/rng.hpp"

using namespace vlab;

namespace {

StateRule zero_rule() {
  return [](double, std::span<const double>, double) { return 0.0; };
}

BsdeDynamics driftless(const TimeGrid& space, double x0) {
  return BsdeDynamics{{}, [](double t, double s) { return 0.4 * std::exp(-(s - t)); },
                      SobolevPath::constant(space, x0)};
}

std::vector<double> grid11() {
  std::vector<double> a;
  for (int k = 0; k <= 10; ++k) a.push_back(-1.0 + 0.2 * k);
  return a;
}

}  // namespace

TEST_CASE("hamiltonian examples") {
  const std::vector<double> st{0.0};
  HamiltonianSpec h{zero_rule(), [](double, std::span<const double>, double a) { return -(a - 0.3) * (a - 0.3); },
                    grid11(), 1.0};
  for (double z : {-2.0, 0.0, 5.0}) {
    const auto v = hamiltonian(h, 0.0, st, z);
    CHECK(v.value == doctest::Approx(-0.01));
    CHECK(v.a_star == doctest::Approx(0.2));
  }
  HamiltonianSpec lin{[](double, std::span<const double>, double a) { return a; }, zero_rule(), grid11(), 1.0};
  for (double z : {-1.7, 0.4, 3.0}) {
    const auto v = hamiltonian(lin, 0.0, st, z);
    CHECK(v.value == doctest::Approx(std::abs(z)));
    CHECK(v.a_star == (z > 0 ? 1.0 : -1.0));
    // brute force: no grid point does better
    for (double a : lin.a_grid) CHECK(v.value >= z * a);
  }
  const auto tie = hamiltonian(lin, 0.0, st, 0.0);
  CHECK(tie.index == 0);
  lin.a_grid = {0.25};
  CHECK(hamiltonian(lin, 0.0, st, 2.0).value == doctest::Approx(0.5));
}

TEST_CASE("regression reproduces quadratic data exactly") {
  const std::size_t n = 500;
  std::vector<double> states(2 * n), target(n);
  for (std::size_t p = 0; p < n; ++p) {
    const double x = standard_normal(1, p, 0), y = 3.0 + standard_normal(1, p, 1);
    states[2 * p] = x;
    states[2 * p + 1] = y;
    target[p] = 1.0 + 2.0 * x - y + 0.5 * x * y + y * y;
  }
  const auto r = fit_regression(states, 2, target, 2);
  CHECK(r.n_features == 6);
  CHECK(r.rank == 6);
  for (std::size_t p = 0; p < n; p += 50) {
    CHECK(r.predict(std::span<const double>(states).subspan(2 * p, 2)) == doctest::Approx(target[p]).epsilon(1e-9));
  }
  // a duplicated variable makes the design rank-deficient
  for (std::size_t p = 0; p < n; ++p) states[2 * p + 1] = 2.0 * states[2 * p];
  const auto d = fit_regression(states, 2, target, 2);
  CHECK(d.rank < d.n_features);
  CHECK_THROWS_AS(fit_regression(states, 2, target, 7), ConfigError);
  CHECK_THROWS_AS(fit_regression(states, 3, target, 2), DimensionError);
}

TEST_CASE("deterministic driver integrates exactly") {
  const TimeGrid space(1.0, 16), time(1.0, 10);
  HamiltonianSpec h{zero_rule(), [](double t, std::span<const double>, double) { return 1.0 + t; }, {0.0}, 1.0};
  const auto sol = solve_bsde(h, driftless(space, 0.0), [](std::span<const double>) { return 2.0; }, time, 200, 1);
  double integral = 0.0;
  for (int i = 0; i < 10; ++i) integral += (1.0 + time.point(i)) * time.step();
  CHECK(sol.y0 == doctest::Approx(2.0 + integral).epsilon(1e-10));
}

TEST_CASE("martingale terminal value returns the start") {
  const TimeGrid space(1.0, 16), time(1.0, 20);
  HamiltonianSpec h{zero_rule(), zero_rule(), {0.0}, 1.0};
  const auto sol = solve_bsde(h, driftless(space, 0.7), [](std::span<const double> s) { return s[0]; }, time, 4000, 2);
  CHECK(sol.y0_se > 1e-3);
  CHECK(std::abs(sol.y0 - 0.7) < 3.0 * sol.y0_se);
}

TEST_CASE("fixed control examples") {
  const TimeGrid space(1.0, 16), time(1.0, 10);
  HamiltonianSpec h{zero_rule(), zero_rule(), grid11(), 1.0};
  const auto zero = fixed_control_value(h, 0.5, driftless(space, 1.0), [](std::span<const double>) { return 0.0; }, time, 100, 1);
  CHECK(zero.mean == 0.0);
  auto G = [](std::span<const double> s) { return s[0] * s[0]; };
  const auto a = fixed_control_value(h, -1.0, driftless(space, 1.0), G, time, 300, 1);
  const auto b = fixed_control_value(h, 1.0, driftless(space, 1.0), G, time, 300, 1);
  CHECK(a.mean == b.mean);
}

TEST_CASE("comparison, single-point grid and greedy policy") {
  const TimeGrid space(1.0, 32), time(1.0, 20);
  auto prob = bsde_preset("quadratic-target", space, 0.5, 11);
  const std::size_t n = 6000;
  const auto sol = solve_bsde(prob.spec, prob.dyn, prob.G, time, n, 3);
  for (double a : prob.spec.a_grid) {
    const auto f = fixed_control_value(prob.spec, a, prob.dyn, prob.G, time, n, derive_seed(3, 1));
    CHECK(sol.y0 >= f.mean - 3.0 * std::hypot(f.std_err, sol.y0_se));
  }
  auto single = prob.spec;
  single.a_grid = {0.4};
  const auto s1 = solve_bsde(single, prob.dyn, prob.G, time, n, 3);
  const auto f1 = fixed_control_value(single, 0.4, prob.dyn, prob.G, time, n, derive_seed(3, 1));
  CHECK(std::abs(s1.y0 - f1.mean) < 3.0 * std::hypot(s1.y0_se, f1.std_err));
  const auto g = greedy_value(prob.spec, sol, prob.dyn, prob.G, time, n, derive_seed(3, 2));
  CHECK(std::abs(g.mean - sol.y0) < 3.0 * std::hypot(g.std_err, sol.y0_se) + 0.02 * std::abs(sol.y0));
}

TEST_CASE("solution is independent of the worker count") {
  const TimeGrid space(1.0, 16), time(1.0, 10);
  auto prob = bsde_preset("quadratic-target", space, 0.5, 5);
  const int saved = worker_count();
  set_worker_count(1);
  const auto a = solve_bsde(prob.spec, prob.dyn, prob.G, time, 700, 4);
  set_worker_count(3);
  const auto b = solve_bsde(prob.spec, prob.dyn, prob.G, time, 700, 4);
  set_worker_count(saved);
  CHECK(a.y0 == b.y0);
  CHECK(a.y_residual == b.y_residual);
}

TEST_CASE("state summary layout") {
  const TimeGrid space(1.0, 32);
  const StateSummary s(space, 3);
  CHECK(s.dim() == 4);
  std::vector<double> row(33, 2.0), out(4);
  s(1.5, row, out);
  CHECK(out[0] == 1.5);
  CHECK(out[1] == doctest::Approx(2.0));  // <2, e_0> with T = 1
  CHECK(std::abs(out[2]) < 1e-12);
}
