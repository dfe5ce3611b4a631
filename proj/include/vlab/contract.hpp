#pragma once

// Finite-dimensional reduction of the contracting problem under the
// multi-exponential discount f(t) = sum_k beta_k e^{-rho_k t}:
// Y and Z live in span{phi_k}, phi_k(s) = beta_k e^{rho_k s}, and the
// terminal constraint becomes membership of a line in R^N.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vlab/sobolev.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

struct DiscountSpec {
  std::vector<double> betas;
  std::vector<double> rhos;

  /// Throws DomainError: betas positive summing to 1, rhos nonnegative and distinct.
  void validate() const;
  std::size_t size() const { return betas.size(); }
  double f(double t) const;
  double phi(std::size_t k, double s) const;
};

struct PhiBasis {
  std::vector<SobolevPath> phi;
  std::vector<double> gram;  // N x N, row-major
  double min_eigenvalue = 0.0;
};

PhiBasis phi_basis(const DiscountSpec& spec, const TimeGrid& grid);

/// c*(t, z); the agent's best-response cost, valued in [0, cbar].
using CostRule = std::function<double(double t, double z)>;
/// 1/2 clamp(z, 0, amax)^2.
CostRule clamped_quadratic_cost(double amax);

/// Writes Z~_t given (t, Y~_t).
using ZRule = std::function<void(double t, std::span<const double> y, std::span<double> z)>;

struct ReducedEnsemble {
  TimeGrid time;
  std::size_t n_paths = 0;
  std::size_t dim = 0;
  std::vector<double> y;  // [p][i][k]
  std::span<const double> at(std::size_t p, int i) const {
    return std::span<const double>(y).subspan((p * static_cast<std::size_t>(time.size()) + static_cast<std::size_t>(i)) * dim, dim);
  }
  std::span<const double> terminal(std::size_t p) const { return at(p, time.intervals()); }
};

/// Euler: Y~^k += e^{-rho_k t} c*(t, sum_k phi_k(t) Z~^k) dt + Z~^k dW.
ReducedEnsemble simulate_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                                 std::span<const double> y0, const TimeGrid& time,
                                 std::size_t n_paths, std::uint64_t seed);

namespace reference {
ReducedEnsemble simulate_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                                 std::span<const double> y0, const TimeGrid& time,
                                 std::size_t n_paths, std::uint64_t seed);
}

/// The line {lambda d}, d_k = e^{-rho_k T}: Y~^k_T = e^{-rho_k T} Y^0_T / f(T).
struct TargetLine {
  std::vector<double> direction;  // unit vector
  double distance(std::span<const double> y) const;
};

TargetLine target_line(const DiscountSpec& spec, double horizon);

std::vector<double> target_distance(const ReducedEnsemble& ens, const TargetLine& line);

/// Z~ = d zeta(t) with deterministic zeta, started at y0 = lambda0 d - D,
/// D_k = int_0^T e^{-rho_k r} c*(r, zeta(r) f(T - r)) dr (fine quadrature).
/// Then Y~_T = (lambda0 + int zeta dW) d lies on the line up to time stepping.
struct AdmissibleControl {
  std::vector<double> y0;
  ZRule rule;
};

AdmissibleControl admissible_control(const DiscountSpec& spec, const CostRule& cost,
                                     std::function<double(double)> zeta, double lambda0,
                                     double horizon, int quad_intervals = 20000);

/// Lifted coefficients of Y^s under the admissible control: drift
/// f(t - s) c*(t, zeta f(T - t)), volatility zeta f(T - s) + eps cos(pi s / T).
CoefficientSet reduced_lifted_coefficients(const DiscountSpec& spec, const CostRule& cost,
                                           std::function<double(double)> zeta, double horizon,
                                           double eps_orthogonal = 0.0);

/// sum_k phi_k y_k with analytic derivatives.
SobolevPath assemble(const DiscountSpec& spec, const TimeGrid& grid, std::span<const double> y);

/// Mean H-norm of the component orthogonal to span{phi_k}.
double span_residual(std::span<const SobolevPath> paths, const DiscountSpec& spec);

/// Same over all paths and times of a lifted ensemble. Rows get finite
/// difference derivatives; analytic_basis = false differences the phi_k the
/// same way (sample-consistent), true uses their analytic derivatives.
double span_residual(const PathEnsemble& lifted, const DiscountSpec& spec, bool analytic_basis);

struct GramRow {
  double t = 0.0;
  double det = 0.0;
};

/// det of the Gram matrix of {v_0, v_t} in H for each t.
std::vector<GramRow> gram_impossibility(std::span<const double> t_values, const TimeGrid& grid);

}  // namespace vlab
