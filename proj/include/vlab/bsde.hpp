#pragma once

// Weak formulation with uncontrolled volatility: drift B = Gamma + Sigma theta(a),
// value through the backward SDE
//   -dY = H(t, X, Z) dt - Z dW,  Y_T = G(X_T),  H = sup_a { z theta(a) + F(a) },
// solved by least-squares regression on a finite state summary.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "vlab/sobolev.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

/// State summary: [diagonal value, <X_t, e_0>, ..., <X_t, e_{m-1}>].
using StateRule = std::function<double(double t, std::span<const double> state, double a)>;

struct HamiltonianSpec {
  StateRule theta;  // bounded by M
  StateRule F;
  std::vector<double> a_grid;
  double bound = 1.0;  // M
};

struct HamiltonianValue {
  double value = 0.0;
  double a_star = 0.0;
  std::size_t index = 0;
};

/// Grid maximum of z theta + F; ties go to the first grid index.
HamiltonianValue hamiltonian(const HamiltonianSpec& spec, double t, std::span<const double> state,
                             double z);

/// Lifted dynamics dX^s = (Gamma_t(s, X^t_t) + Sigma_t(s) theta) dt + Sigma_t(s) dW.
struct BsdeDynamics {
  std::function<double(double t, double s, double x)> gamma;  // empty == 0
  std::function<double(double t, double s)> sigma;
  SobolevPath x0;
  double lipschitz = 1.0;
  int summary_modes = 4;  // basis coefficients in the state summary
};

using TerminalRule = std::function<double(std::span<const double> state)>;

struct Regression {
  std::vector<double> mean, scale;  // per summary variable; scale 0 == dropped
  std::vector<double> coef;         // on the monomial features
  std::vector<std::vector<int>> terms;  // monomials as variable-index multisets
  int degree = 2;
  int rank = 0;
  int n_features = 0;
  double predict(std::span<const double> state) const;
};

/// Least squares with standardised monomial features up to `degree`, solved
/// from the normal equations by a rank-revealing decomposition.
Regression fit_regression(std::span<const double> states, std::size_t dim,
                          std::span<const double> target, int degree);

struct BsdeSolution {
  double y0 = 0.0;
  double y0_se = 0.0;
  std::size_t n_paths = 0;
  int n_features = 0;
  int rank_deficient_steps = 0;
  std::vector<double> y_residual;  // RMS residual of the Y regression per step
  std::vector<double> z_residual;
  std::vector<Regression> z_fit;   // per step, used by the greedy policy
  std::vector<double> y_paths, z_paths;  // [p][i]
};

struct BsdeOptions {
  int degree = 2;
  bool keep_paths = false;
};

BsdeSolution solve_bsde(const HamiltonianSpec& spec, const BsdeDynamics& dyn, const TerminalRule& G,
                        const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                        const BsdeOptions& opts = {});

/// E[int F dt + G] with the drift Gamma + Sigma theta(a_const) applied pathwise.
McEstimate fixed_control_value(const HamiltonianSpec& spec, double a_const, const BsdeDynamics& dyn,
                               const TerminalRule& G, const TimeGrid& time, std::size_t n_paths,
                               std::uint64_t seed);

/// Same, with a_t = argmax H(t, X_t, Z_fit(X_t)) from a solved BSDE.
McEstimate greedy_value(const HamiltonianSpec& spec, const BsdeSolution& sol, const BsdeDynamics& dyn,
                        const TerminalRule& G, const TimeGrid& time, std::size_t n_paths,
                        std::uint64_t seed);

/// Summary of a lifted row: diagonal value then the first modes cosine projections.
class StateSummary {
 public:
  StateSummary(const TimeGrid& space, int modes);
  std::size_t dim() const { return functionals_.size() + 1; }
  void operator()(double x_diag, std::span<const double> row, std::span<double> out) const;

 private:
  std::vector<std::vector<double>> functionals_;
};

}  // namespace vlab
