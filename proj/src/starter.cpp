#include <cmath>

#include "vlab/error.hpp"
#include "vlab/lq.hpp"

namespace vlab {

double starter_value(double t, const SobolevPath& x) {
  const TimeGrid& g = x.grid();
  const double T = g.horizon();
  if (!(t >= 0.0 && t <= T)) throw DomainError("starter_value: t outside [0,T]");
  auto f = [&](int i) { return std::exp(T - g.point(i)) * x.value(i); };
  int j = g.node_index(t);
  double integral = 0.0;
  if (j < 0) {
    j = static_cast<int>(std::ceil(t / g.step()));
    integral += 0.5 * (std::exp(T - t) * x.at(t) + f(j)) * (g.point(j) - t);
  }
  for (int i = j; i < g.intervals(); ++i) integral += 0.5 * g.step() * (f(i) + f(i + 1));
  return x.value(g.intervals()) + integral;
}

StarterReport starter_check(const SobolevPath& x, const TimeGrid& time, std::size_t n_paths,
                            std::uint64_t seed) {
  CoefficientSet c;
  c.b1 = [](double, double, double xd, double) { return xd; };
  c.s1 = [](double, double, double, double) { return 1.0; };
  c.lipschitz = 1.0;
  LiftedOptions opts;
  opts.store_sheets = false;
  const auto ens = simulate_lifted(c, ControlPath::constant(0.0), x, time, n_paths, seed, opts);
  const auto est = estimate(ens.at_time(time.intervals()));
  StarterReport r;
  r.mc_mean = est.mean;
  r.std_err = est.std_err;
  r.closed_form = starter_value(0.0, x);
  r.z = est.std_err > 0.0 ? (r.mc_mean - r.closed_form) / est.std_err : 0.0;
  return r;
}

double starter_pde_residual(const SobolevPath& x) {
  const TimeGrid& g = x.grid();
  const int n = g.intervals();
  const double T = g.horizon();
  const double h = g.step();
  // u(t_i) and int_{t_i}^T e^{T-s} ds accumulated backwards.
  std::vector<double> u(static_cast<std::size_t>(n + 1)), ker(static_cast<std::size_t>(n + 1));
  double iu = 0.0, ik = 0.0;
  u[static_cast<std::size_t>(n)] = x.value(n);
  for (int i = n - 1; i >= 0; --i) {
    const double e0 = std::exp(T - g.point(i)), e1 = std::exp(T - g.point(i + 1));
    iu += 0.5 * h * (e0 * x.value(i) + e1 * x.value(i + 1));
    ik += 0.5 * h * (e0 + e1);
    u[static_cast<std::size_t>(i)] = x.value(n) + iu;
    ker[static_cast<std::size_t>(i)] = ik;
  }
  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    const double du = (u[k + 1] - u[k - 1]) / (2.0 * h);
    const double xt = inner_product(riesz_representer(g.point(i), g).rep, x);
    worst = std::max(worst, std::abs(du + xt * (ker[k] + 1.0)));
  }
  return worst;
}

}  // namespace vlab
