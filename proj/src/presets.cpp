#include "vlab/presets.hpp"

#include <cmath>

#include "vlab/error.hpp"

namespace vlab {

SeparableModel separable_preset(const std::string& name, double horizon) {
  if (name != "smooth-kernel") throw ConfigError("unknown separable preset '" + name + "'");
  SeparableModel m;
  m.kb = [](double t, double s) { return std::exp(-(s - t)); };
  m.kb_ds = [](double t, double s) { return -std::exp(-(s - t)); };
  m.ks = m.kb;
  m.ks_ds = m.kb_ds;
  m.fb = [](double x) { return -0.5 * x; };
  m.fs = [](double x) { return 0.5 * x; };
  m.lipschitz = 0.5 * std::exp(horizon) * 1.001;
  return m;
}

CoefficientSet coefficient_preset(const std::string& name, double horizon) {
  CoefficientSet c;
  if (name == "zero") {
    c.b1 = [](double, double, double, double) { return 0.0; };
    c.s1 = c.b1;
    return c;
  }
  if (name == "brownian") {
    c.b1 = [](double, double, double, double) { return 0.0; };
    c.s1 = [](double, double, double, double) { return 1.0; };
    return c;
  }
  if (name == "exp-noise") {
    c.b1 = [](double, double, double, double) { return 0.0; };
    c.s1 = [](double t, double s, double, double) { return std::exp(-(s - t)); };
    c.ds1 = [](double t, double s, double, double) { return -std::exp(-(s - t)); };
    return c;
  }
  return separable_preset(name, horizon).coefficients();
}

ControlPath control_preset(const std::string& name) {
  if (name == "zero") return ControlPath::constant(0.0);
  if (name == "one") return ControlPath::constant(1.0);
  throw ConfigError("unknown control preset '" + name + "' (expected zero, one)");
}

BsdeProblem bsde_preset(const std::string& name, const TimeGrid& space, double sigma0,
                        int n_controls) {
  if (name != "quadratic-target") throw ConfigError("unknown bsde preset '" + name + "'");
  if (n_controls < 1) throw ConfigError("parameter 'n_controls' must be >= 1");
  BsdeProblem p{{}, {{}, {}, SobolevPath::constant(space, 0.0)}, {}};
  p.spec.theta = [](double, std::span<const double>, double a) { return a; };
  p.spec.F = [](double, std::span<const double>, double a) { return -0.5 * a * a; };
  p.spec.bound = 1.0;
  if (n_controls == 1) {
    p.spec.a_grid = {0.0};
  } else {
    for (int k = 0; k < n_controls; ++k) p.spec.a_grid.push_back(-1.0 + 2.0 * k / (n_controls - 1));
  }
  // Separable in (t, s): every sheet is a multiple of e^{-s}, so the summary is
  // exact but collinear and the regression runs on its pseudo-inverse.
  p.dyn.sigma = [sigma0](double t, double s) { return sigma0 * std::exp(-(s - t)); };
  p.dyn.lipschitz = 1.0;
  p.dyn.summary_modes = 4;
  p.G = [](std::span<const double> st) { return -0.5 * (st[0] - 1.0) * (st[0] - 1.0); };
  return p;
}

}  // namespace vlab
