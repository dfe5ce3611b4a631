#pragma once

// Linear-quadratic Volterra control
//   dX^s_t = phi(s - t)(X^t_t + a_t) dt + phi(s - t) dW_t,   s >= t,
//   V(t, x) = sup E[-1/2 int_t^T (X_r^2 + a_r^2) dr],
// solved through the quadratic ansatz
//   V(t, x) = -1/2 int_t^T x^2 + 1/2 int int_{[t,T]^2} c(t, r, s) x(r) x(s) + a(t).
// With g = -phi + c*phi the field obeys dc/dt = -g(t,r) g(t,s) inside and
// c(t, t, r) = g(t, r) on the boundary. Also the closed-form starter problem.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "vlab/sobolev.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

using Kernel = std::function<double(double)>;

/// Named kernels: "one" (phi = 1), "zero", "exp" (e^{-u}).
Kernel kernel_preset(const std::string& name);

/// Symmetric c(t_i, r_j, s_k), stored for j, k >= i only (triangular support).
class RiccatiField {
 public:
  explicit RiccatiField(TimeGrid grid);

  const TimeGrid& grid() const { return grid_; }
  /// Zero outside the support.
  double at(int i, int j, int k) const;
  void set(int i, int j, int k, double v);
  /// Constant part a(t_i) of the value.
  double offset(int i) const { return offset_[static_cast<std::size_t>(i)]; }
  void set_offset(int i, double v) { offset_[static_cast<std::size_t>(i)] = v; }

 private:
  std::size_t index(int i, int j, int k) const;
  TimeGrid grid_;
  std::vector<std::size_t> start_;
  std::vector<double> data_;
  std::vector<double> offset_;
};

/// (c * phi)(t_i, r_j) = int_{t_i}^T c(t_i, r_j, u) phi(u - t_i) du (trapezoid), j = 0..n.
std::vector<double> star(const RiccatiField& c, const Kernel& phi, int i);

/// Feedback kernel g(t_i, r) = -phi(r - t_i) + (c * phi)(t_i, r) (zero for r < t_i).
std::vector<double> feedback_kernel(const RiccatiField& c, const Kernel& phi, int i);

struct RiccatiOptions {
  double blowup_cap = 1e8;
};

/// Backward sweep from t = T. Interior entries take an explicit step; the
/// boundary row includes its own trapezoid self-term and is solved exactly.
RiccatiField solve_riccati(const Kernel& phi, const TimeGrid& grid, const RiccatiOptions& opts = {});

/// Full value V(t_i, x), x sampled on the field grid.
double value(const RiccatiField& c, int i, std::span<const double> x);
/// Quadratic part only (without the noise constant a(t_i)).
double quadratic_value(const RiccatiField& c, int i, std::span<const double> x);
/// a*(t_i, x) = int_{t_i}^T g(t_i, r) x(r) dr.
double feedback(const RiccatiField& c, const Kernel& phi, int i, std::span<const double> x);

/// Lifted coefficient set of the LQ dynamics (zero for s < t).
CoefficientSet lq_coefficients(const Kernel& phi, double horizon);

/// Control rule acting on the lifted state: gain * a*(t, X_t). Precomputes
/// the feedback kernels; the field must outlive nothing (kernels are copied).
ControlPath riccati_policy(const RiccatiField& c, const Kernel& phi, double gain = 1.0);

/// E[-1/2 int (X^2 + a^2)] by Monte Carlo over the lifted dynamics started
/// from the constant path x0 on the field grid.
McEstimate mc_value(const Kernel& phi, const ControlPath& policy, double x0, const TimeGrid& grid,
                    std::size_t n_paths, std::uint64_t seed);

/// Per-path rewards (for paired comparisons under common random numbers).
std::vector<double> mc_rewards(const Kernel& phi, const ControlPath& policy, double x0,
                               const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed);

// Starter problem: dX^s = X^t_t dt + dW, u(t, x) = E[X^T_T] = x(T) + int_t^T e^{T-r} x(r) dr.

double starter_value(double t, const SobolevPath& x);

struct StarterReport {
  double mc_mean = 0.0;
  double std_err = 0.0;
  double closed_form = 0.0;
  double z = 0.0;  // (mc - closed) / se
};

/// MC mean of the lifted diagonal at T from x; n_s is the s-grid of the lifted state.
StarterReport starter_check(const SobolevPath& x, const TimeGrid& time, std::size_t n_paths,
                            std::uint64_t seed);

/// max over interior nodes of |d/dt u + <v_t, x>_H (int_t^T e^{T-s} ds + 1)|,
/// d/dt by central differences, integrals by trapezoid on x's grid.
double starter_pde_residual(const SobolevPath& x);

}  // namespace vlab
