#pragma once

// Named coefficient, control and problem presets used by the CLI and tests.

#include <string>

#include "vlab/bsde.hpp"
#include "vlab/markov.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

/// "smooth-kernel": b_t(s,x) = -x/2 e^{-(s-t)}, sigma_t(s,x) = x/2 e^{-(s-t)},
/// kernel extended smoothly to s < t. Separable, so usable by the Markov study.
SeparableModel separable_preset(const std::string& name, double horizon);

/// Any separable preset, or "zero" (b = sigma = 0), "brownian" (sigma = 1),
/// "exp-noise" (b = 0, sigma_t(s) = e^{-(s-t)}).
CoefficientSet coefficient_preset(const std::string& name, double horizon);

/// "zero" or "one" (constant controls).
ControlPath control_preset(const std::string& name);

struct BsdeProblem {
  HamiltonianSpec spec;
  BsdeDynamics dyn;
  TerminalRule G;
};

/// "quadratic-target": Gamma = 0, Sigma = sigma0 e^{-(s-t)}, theta(a) = a on an
/// n_controls grid of [-1, 1], F = -a^2/2, G = -(x(T) - 1)^2 / 2, x0 = 0.
BsdeProblem bsde_preset(const std::string& name, const TimeGrid& space, double sigma0,
                        int n_controls);

}  // namespace vlab
