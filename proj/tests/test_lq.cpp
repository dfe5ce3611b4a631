#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "vlab/error.hpp"
#include "vlab/lq.hpp"

using namespace vlab;

namespace {

// Exact dynamic programming for the time-discretised problem: state = the
// sheet on the grid, y' = A y + B a + phi dW, reward -h/2 (y_i^2 + a^2).
// V_i(y) = 1/2 y'P_i y + k_i.
double discrete_lq_value(const Kernel& phi, const TimeGrid& g, double x0) {
  const int n = g.intervals();
  const double h = g.step();
  const int m = n + 1;
  Eigen::MatrixXd P = Eigen::MatrixXd::Zero(m, m);
  double k = 0.0;
  for (int i = n - 1; i >= 0; --i) {
    Eigen::VectorXd f = Eigen::VectorXd::Zero(m);
    for (int j = i; j <= n; ++j) f(j) = phi(g.point(j) - g.point(i));
    Eigen::MatrixXd A = Eigen::MatrixXd::Identity(m, m);
    A.col(i) += h * f;
    const Eigen::VectorXd B = h * f;
    const double denom = h - B.dot(P * B);
    const Eigen::VectorXd PA_B = A.transpose() * (P * B);
    Eigen::MatrixXd next = A.transpose() * P * A + PA_B * PA_B.transpose() / denom;
    next(i, i) -= h;
    k += 0.5 * h * f.dot(P * f);
    P = next;
  }
  const Eigen::VectorXd y = Eigen::VectorXd::Constant(m, x0);
  return 0.5 * y.dot(P * y) + k;
}

std::vector<double> constant(const TimeGrid& g, double v) { return std::vector<double>(static_cast<std::size_t>(g.size()), v); }

}  // namespace

TEST_CASE("star operator examples") {
  const TimeGrid g(1.0, 200);
  RiccatiField c(g);
  const int i = 40;
  for (int j = i; j <= 200; ++j) {
    for (int k = j; k <= 200; ++k) c.set(i, j, k, 1.0);
  }
  auto s = star(c, kernel_preset("one"), i);
  for (int j = i; j <= 200; ++j) CHECK(s[static_cast<std::size_t>(j)] == doctest::Approx(1.0 - g.point(i)).epsilon(1e-12));
  for (int j = 0; j < i; ++j) CHECK(s[static_cast<std::size_t>(j)] == 0.0);
  s = star(c, kernel_preset("zero"), i);
  for (double v : s) CHECK(v == 0.0);

  RiccatiField d(g);
  for (int j = 0; j <= 200; ++j) {
    for (int k = j; k <= 200; ++k) d.set(0, j, k, g.point(j) * g.point(k));
  }
  s = star(d, kernel_preset("exp"), 0);
  for (int j : {0, 50, 200}) {
    CHECK(std::abs(s[static_cast<std::size_t>(j)] - g.point(j) * (1.0 - 2.0 / std::numbers::e)) < 1e-5);
  }
}

TEST_CASE("field is symmetric and vanishes outside its support") {
  const TimeGrid g(0.5, 20);
  const auto c = solve_riccati(kernel_preset("one"), g);
  for (int i = 0; i <= 20; ++i) {
    for (int j = 0; j <= 20; ++j) {
      for (int k = 0; k <= 20; ++k) {
        CHECK(c.at(i, j, k) == c.at(i, k, j));
        if (j < i || k < i) CHECK(c.at(i, j, k) == 0.0);
      }
    }
  }
  // terminal: the value functional at T integrates over an empty window
  CHECK(value(c, 20, constant(g, 3.0)) == 0.0);
  CHECK(c.offset(20) == 0.0);
}

TEST_CASE("zero kernel: no controllability, no noise") {
  const TimeGrid g(1.0, 50);
  const auto c = solve_riccati(kernel_preset("zero"), g);
  for (int i = 0; i < 50; ++i) {
    for (int j = i; j <= 50; ++j) CHECK(c.at(i, j, 50) == 0.0);
    CHECK(c.offset(i) == 0.0);
  }
  std::vector<double> x(51);
  for (int j = 0; j <= 50; ++j) x[static_cast<std::size_t>(j)] = std::sin(3 * g.point(j));
  double direct = 0.0;
  for (int j = 10; j <= 50; ++j) direct += (j == 10 || j == 50 ? 0.5 : 1.0) * g.step() * x[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  CHECK(value(c, 10, x) == doctest::Approx(-0.5 * direct).epsilon(1e-12));
  CHECK(feedback(c, kernel_preset("zero"), 10, x) == 0.0);
  const auto mc = mc_value(kernel_preset("zero"), ControlPath::constant(0.0), 1.0, g, 50, 1);
  CHECK(mc.mean == doctest::Approx(-0.5).epsilon(1e-12));
  CHECK(mc.std_err < 1e-12);
}

TEST_CASE("zero path: no quadratic value, no feedback") {
  const TimeGrid g(0.5, 20);
  const auto c = solve_riccati(kernel_preset("one"), g);
  const auto zero = constant(g, 0.0);
  CHECK(quadratic_value(c, 3, zero) == 0.0);
  CHECK(value(c, 3, zero) == c.offset(3));
  CHECK(feedback(c, kernel_preset("one"), 3, zero) == 0.0);
}

TEST_CASE("Riccati value agrees with exact discrete dynamic programming") {
  for (const char* name : {"one", "exp"}) {
    const auto phi = kernel_preset(name);
    const TimeGrid g(0.5, 60);
    const auto c = solve_riccati(phi, g);
    const double oracle = discrete_lq_value(phi, g, 1.0);
    CHECK(value(c, 0, constant(g, 1.0)) == doctest::Approx(oracle).epsilon(0.01));
  }
}

TEST_CASE("feedback beats zero control and perturbed gains") {
  const auto phi = kernel_preset("one");
  const TimeGrid g(0.5, 40);
  const auto c = solve_riccati(phi, g);
  const std::size_t n = 20000;
  const auto base = mc_rewards(phi, riccati_policy(c, phi, 1.0), 1.0, g, n, 4);
  const auto zero = mc_rewards(phi, ControlPath::constant(0.0), 1.0, g, n, 4);
  const auto big = mc_rewards(phi, riccati_policy(c, phi, 1.5), 1.0, g, n, 4);
  std::vector<double> d0(n), d1(n);
  for (std::size_t p = 0; p < n; ++p) {
    d0[p] = zero[p] - base[p];
    d1[p] = big[p] - base[p];
  }
  const auto e0 = estimate(d0), e1 = estimate(d1);
  CHECK(e0.mean <= 2.0 * e0.std_err);
  CHECK(e1.mean <= 2.0 * e1.std_err);
  // the Monte Carlo value sits near the optimum of the same discrete problem
  // (the field value itself carries an O(h) bias on this coarse grid)
  const auto fb = estimate(base);
  const double oracle = discrete_lq_value(phi, g, 1.0);
  CHECK(std::abs(fb.mean - oracle) < std::max(0.01 * std::abs(oracle), 3.0 * fb.std_err));
  CHECK(std::abs(fb.mean - value(c, 0, constant(g, 1.0))) < 0.03 * std::abs(fb.mean));
}

TEST_CASE("blow-up and bad presets are reported") {
  const TimeGrid g(0.5, 20);
  RiccatiOptions o;
  o.blowup_cap = 1e-3;
  CHECK_THROWS_AS(solve_riccati(kernel_preset("one"), g, o), SolverError);
  CHECK_THROWS_AS(kernel_preset("nope"), ConfigError);
  RiccatiField c(g);
  CHECK_THROWS_AS(c.set(5, 2, 7, 1.0), DimensionError);
}

TEST_CASE("starter closed form") {
  const TimeGrid g(1.0, 512);
  CHECK(starter_value(0.0, SobolevPath::constant(g, 0.0)) == 0.0);
  CHECK(starter_value(0.0, SobolevPath::constant(g, 1.0)) == doctest::Approx(std::numbers::e).epsilon(1e-5));
  const auto id = SobolevPath::from_function(g, [](double s) { return s; }, [](double) { return 1.0; });
  CHECK(starter_value(0.0, id) == doctest::Approx(std::numbers::e - 1.0).epsilon(1e-5));
}

TEST_CASE("starter closed form against a brute-force ODE integration") {
  // z' = x + z from z(t) = 0; u = x(T) + z(T).
  auto x = [](double s) { return std::cos(2 * s) + 0.5 * s; };
  const double t = 0.3, T = 1.0;
  const int steps = 20000;
  const double h = (T - t) / steps;
  double z = 0.0, s = t;
  for (int k = 0; k < steps; ++k) {
    const double k1 = x(s) + z;
    const double k2 = x(s + h / 2) + z + h / 2 * k1;
    const double k3 = x(s + h / 2) + z + h / 2 * k2;
    const double k4 = x(s + h) + z + h * k3;
    z += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    s += h;
  }
  const TimeGrid g(T, 1000);
  const auto path = SobolevPath::from_function(g, x, [](double r) { return -2 * std::sin(2 * r) + 0.5; });
  CHECK(starter_value(t, path) == doctest::Approx(x(T) + z).epsilon(1e-5));
}

TEST_CASE("starter Monte Carlo matches the Euler expectation") {
  const TimeGrid time(1.0, 64), space(1.0, 8);
  const auto r = starter_check(SobolevPath::constant(space, 1.0), time, 20000, 9);
  const double euler = std::pow(1.0 + time.step(), 64);
  CHECK(std::abs(r.mc_mean - euler) < 3.0 * r.std_err);
  CHECK(r.closed_form == doctest::Approx(std::numbers::e).epsilon(1e-3));  // 8 space cells
}

TEST_CASE("starter PDE residual is second order") {
  std::vector<double> res;
  for (int n : {64, 128, 256}) {
    const TimeGrid g(1.0, n);
    res.push_back(starter_pde_residual(SobolevPath::from_function(g, [](double s) { return std::cos(s); },
                                                                  [](double s) { return -std::sin(s); })));
  }
  CHECK(res[0] / res[1] == doctest::Approx(4.0).epsilon(0.1));
  CHECK(res[1] / res[2] == doctest::Approx(4.0).epsilon(0.1));
}
