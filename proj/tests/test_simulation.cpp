#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/presets.hpp"
#include "vlab/rng.hpp"
#include "vlab/volterra.hpp"

using namespace vlab;

namespace {

CoefficientSet zero_coeffs() {
  CoefficientSet c;
  c.b1 = [](double, double, double, double) { return 0.0; };
  c.s1 = [](double, double, double, double) { return 0.0; };
  return c;
}

// Diagonal-dependent drift and a slice term: exercises every code path.
CoefficientSet busy_coeffs() {
  CoefficientSet c;
  c.b1 = [](double t, double s, double x, double a) { return -0.3 * x * std::exp(-(s - t)) + 0.1 * a; };
  c.db1 = [](double t, double s, double x, double) { return 0.3 * x * std::exp(-(s - t)); };
  c.s1 = [](double t, double s, double x, double) { return 0.2 * std::cos(x) * std::exp(-(s - t)) + 0.1; };
  c.ds1 = [](double t, double s, double x, double) { return -0.2 * std::cos(x) * std::exp(-(s - t)); };
  c.b2 = [](double, double s, double) { return -0.1 * s; };
  c.db2 = [](double, double, double) { return -0.1; };
  c.bound = 1.0;
  c.lipschitz = 1.0;
  return c;
}

}  // namespace

TEST_CASE("philox known answers") {
  // Published Philox4x32-10 test vectors.
  CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == PhiloxCounter{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
  CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
        PhiloxCounter{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
  CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
        PhiloxCounter{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("normals have unit variance and are reproducible") {
  double s = 0.0, s2 = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double z = standard_normal(5, 3, static_cast<std::uint64_t>(i));
    s += z;
    s2 += z * z;
  }
  CHECK(std::abs(s / n) < 4.0 / std::sqrt(n));
  CHECK(std::abs(s2 / n - 1.0) < 4.0 * std::sqrt(2.0 / n));
  CHECK(standard_normal(5, 3, 17) == standard_normal(5, 3, 17));
  CHECK(standard_normal(5, 3, 17) != standard_normal(6, 3, 17));
  CHECK(derive_seed(5, 1) != derive_seed(5, 2));
}

TEST_CASE("brownian increments are coupled across refinements") {
  std::vector<double> coarse(8), fine(32);
  brownian_increments(9, 4, 0.25, 4, coarse);
  brownian_increments(9, 4, 0.0625, 1, fine);
  for (std::size_t i = 0; i < coarse.size(); ++i) {
    const double sum = ((fine[4 * i] + fine[4 * i + 1]) + fine[4 * i + 2]) + fine[4 * i + 3];
    CHECK(coarse[i] == doctest::Approx(sum).epsilon(1e-14));
  }
}

TEST_CASE("zero coefficients keep the initial value") {
  const TimeGrid g(1.0, 20);
  const auto d = simulate_direct(zero_coeffs(), ControlPath::constant(0.0), 1.5, g, 7, 1);
  for (std::size_t p = 0; p < 7; ++p) {
    for (int i = 0; i <= 20; ++i) CHECK(d.x(p, i) == 1.5);
  }
  const TimeGrid sg(1.0, 8);
  const auto x0 = SobolevPath::from_function(sg, [](double s) { return 1.0 + s; }, [](double) { return 1.0; });
  const auto l = simulate_lifted(zero_coeffs(), ControlPath::constant(0.0), x0, g, 3, 1);
  for (std::size_t p = 0; p < 3; ++p) {
    for (int i = 0; i <= 20; ++i) {
      const auto row = l.slice(p, i);
      for (int j = 0; j <= 8; ++j) CHECK(row[static_cast<std::size_t>(j)] == x0.value(j));
    }
  }
  const auto c = simulate_lifted(zero_coeffs(), ControlPath::constant(0.0), SobolevPath::constant(sg, 2.0), g, 2, 1);
  const auto diag = diagonal(c);
  for (int i = 0; i <= 20; ++i) CHECK(diag.x(1, i) == 2.0);
}

TEST_CASE("constant drift integrates exactly") {
  CoefficientSet c = zero_coeffs();
  c.b1 = [](double, double, double, double a) { return a; };
  const TimeGrid g(1.0, 16);
  const auto d = simulate_direct(c, ControlPath::constant(1.0), 0.5, g, 4, 2);
  for (int i = 0; i <= 16; ++i) CHECK(d.x(2, i) == doctest::Approx(0.5 + g.point(i)).epsilon(1e-13));
}

TEST_CASE("Ito isometry for an exponential noise kernel") {
  // X_1 = int e^{-(1-r)} dW_r; only the s = T row is needed, so a coarse space grid suffices.
  const auto coeffs = coefficient_preset("exp-noise", 1.0);
  const TimeGrid time(1.0, 400), space(1.0, 2);
  const std::size_t n = 100000;
  LiftedOptions o;
  o.store_sheets = false;
  const auto ens = simulate_lifted(coeffs, ControlPath::constant(0.0), SobolevPath::constant(space, 0.0), time, n, 17, o);
  std::vector<double> sq(n);
  for (std::size_t p = 0; p < n; ++p) sq[p] = ens.x(p, 400) * ens.x(p, 400);
  const auto e = estimate(sq);
  const double exact = (1.0 - std::exp(-2.0)) / 2.0;
  CHECK(std::abs(e.mean - exact) < 3.0 * e.std_err);
}

TEST_CASE("brownian preset has variance t") {
  const auto coeffs = coefficient_preset("brownian", 1.0);
  const TimeGrid g(1.0, 10);
  const std::size_t n = 40000;
  const auto d = simulate_direct(coeffs, ControlPath::constant(0.0), 0.0, g, n, 3);
  for (int i : {5, 10}) {
    std::vector<double> sq(n);
    for (std::size_t p = 0; p < n; ++p) sq[p] = d.x(p, i) * d.x(p, i);
    const auto e = estimate(sq);
    CHECK(std::abs(e.mean - g.point(i)) < 3.0 * e.std_err);
  }
}

TEST_CASE("lifted diagonal equals direct simulation on the same grid") {
  const double T = 1.0;
  const auto coeffs = coefficient_preset("smooth-kernel", T);
  const TimeGrid g(T, 32);
  const auto l = simulate_lifted(coeffs, ControlPath::constant(0.0), SobolevPath::constant(g, 1.0), g, 50, 4);
  const auto d = simulate_direct(coeffs, ControlPath::constant(0.0), 1.0, g, 50, 4);
  const auto ld = diagonal(l);
  for (std::size_t p = 0; p < 50; ++p) {
    for (int i = 0; i <= 32; ++i) CHECK(ld.x(p, i) == d.x(p, i));
  }
}

TEST_CASE("parallel kernels match the serial references bit for bit") {
  const TimeGrid time(1.0, 24), space(1.0, 12);
  const auto x0 = SobolevPath::from_function(space, [](double s) { return std::sin(s); }, [](double s) { return std::cos(s); });
  const auto ctrl = ControlPath::lifted_feedback(
      [](const StepContext& c) { return 0.5 * c.x_diag + 0.1 * c.slice.back(); }, {-1.0, 1.0});
  const auto ref_l = reference::simulate_lifted(busy_coeffs(), ctrl, x0, time, 37, 8);
  const auto sep = coefficient_preset("smooth-kernel", 1.0);
  const auto fb = ControlPath::feedback([](double, double x) { return -x; }, {-2.0, 2.0});
  DirectOptions dopt;
  dopt.substeps = 3;
  const auto ref_d = reference::simulate_direct(sep, fb, 0.7, time, 37, 8, dopt);
  const int saved = worker_count();
  for (int w = 1; w <= 3; ++w) {
    set_worker_count(w);
    CHECK(simulate_lifted(busy_coeffs(), ctrl, x0, time, 37, 8).data()[0] == ref_l.data()[0]);
    const auto l = simulate_lifted(busy_coeffs(), ctrl, x0, time, 37, 8);
    CHECK(std::equal(l.data().begin(), l.data().end(), ref_l.data().begin(), ref_l.data().end()));
    const auto d = simulate_direct(sep, fb, 0.7, time, 37, 8, dopt);
    CHECK(std::equal(d.data().begin(), d.data().end(), ref_d.data().begin(), ref_d.data().end()));
  }
  set_worker_count(saved);
}

TEST_CASE("non-finite states report path and step") {
  CoefficientSet c = zero_coeffs();
  c.b1 = [](double, double, double x, double a) { return a * (1.0 + x * x); };
  c.lipschitz = 25.0;
  const TimeGrid g(4.0, 2);
  const auto ctrl = ControlPath::lifted_feedback([](const StepContext& s) { return s.path == 3 ? 1e308 : 0.0; });
  bool thrown = false;
  try {
    simulate_lifted(c, ctrl, SobolevPath::constant(g, 1.0), g, 6, 1);
  } catch (const NumericalError& e) {
    thrown = true;
    CHECK(e.path() == 3);
    CHECK(e.step() == 1);
  }
  CHECK(thrown);
  const auto dctrl = ControlPath::feedback([](double, double) { return 1e308; });
  CHECK_THROWS_AS(simulate_direct(c, dctrl, 1.0, g, 2, 1), NumericalError);
}

TEST_CASE("preconditions are enforced") {
  const TimeGrid g(1.0, 4);
  CHECK_THROWS_AS(simulate_direct(zero_coeffs(), ControlPath::constant(0.0), 0.0, g, 0, 1), DomainError);
  CHECK_THROWS_AS(simulate_direct(zero_coeffs(), ControlPath::piecewise({0.0, 1.0}), 0.0, g, 1, 1), DimensionError);
  CHECK_THROWS_AS(ControlPath::constant(2.0, {0.0, 1.0}), DomainError);
  // slice-dependent coefficients have no direct form
  CHECK_THROWS_AS(simulate_direct(busy_coeffs(), ControlPath::constant(0.0), 0.0, g, 1, 1), DomainError);
  CoefficientSet wild = zero_coeffs();
  wild.b1 = [](double, double, double x, double) { return 50.0 * x; };
  wild.lipschitz = 1.0;
  CHECK_THROWS_AS(simulate_direct(wild, ControlPath::constant(0.0), 0.0, g, 1, 1), DomainError);
  CoefficientSet big = zero_coeffs();
  big.b2 = [](double, double, double) { return 5.0; };
  big.bound = 1.0;
  CHECK_THROWS_AS(simulate_lifted(big, ControlPath::constant(0.0), SobolevPath::constant(g, 0.0), g, 1, 1), DomainError);
}

TEST_CASE("tail trace") {
  const TimeGrid g(1.0, 128);
  const auto basis = cosine_basis(8, g);
  CoefficientSet c = zero_coeffs();
  c.s1 = [](double, double, double, double) { return 1.0; };
  const auto x = SobolevPath::constant(g, 0.0);
  for (int n = 1; n < 8; ++n) CHECK(tail_trace(c, basis, n, 0.3, x, 0.0) < 1e-20);
  CoefficientSet k = zero_coeffs();
  k.s1 = [](double t, double s, double, double) { return std::exp(-(s - t)); };
  k.ds1 = [](double t, double s, double, double) { return -std::exp(-(s - t)); };
  double prev = 1e9;
  for (int n = 0; n < 8; ++n) {
    const double tt = tail_trace(k, basis, n, 0.3, x, 0.0);
    CHECK(tt <= prev);
    prev = tt;
  }
  const double last = inner_product(k.vol_profile(0.3, x, 0.0), basis.members[7]);
  CHECK(tail_trace(k, basis, 7, 0.3, x, 0.0) == doctest::Approx(last * last));
  CHECK_THROWS_AS(tail_trace(k, basis, 8, 0.3, x, 0.0), DomainError);
}

TEST_CASE("estimates are order independent of thread count") {
  std::vector<double> v(1000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = standard_normal(1, 0, i);
  const auto e = estimate(v);
  CHECK(e.n == 1000);
  CHECK(e.std_err > 0.0);
  CHECK(pairwise_sum(v) == pairwise_sum(v));
}
