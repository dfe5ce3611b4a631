#pragma once

// Finite-dimensional Markovian approximation of the lifted dynamics:
//   X_t = sum_k v_t^k X_t^k,  v_t^k = <v_t, e_k>,  X_t^k = <X_t, e_k>,
// truncated to the first n basis members.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "vlab/sobolev.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

/// Uncontrolled coefficients with a separable s-profile:
///   b_t(s, x) = kb(t, s) fb(x),  sigma_t(s, x) = ks(t, s) fs(x).
/// This is the setting where the projections b^k, sigma^k are cheap.
struct SeparableModel {
  std::function<double(double t, double s)> kb, kb_ds, ks, ks_ds;
  std::function<double(double x)> fb, fs;
  double lipschitz = 1.0;

  CoefficientSet coefficients() const;
};

struct RepresenterCoefficients {
  TimeGrid time;
  int n = 0;
  std::vector<double> v;      // [i][k], v_{t_i}^k
  std::vector<double> v_dot;  // [i][k], d/dt v_t^k at t_i

  std::span<const double> v_at(int i) const {
    return std::span<const double>(v).subspan(static_cast<std::size_t>(i * n), static_cast<std::size_t>(n));
  }
  std::span<const double> v_dot_at(int i) const {
    return std::span<const double>(v_dot).subspan(static_cast<std::size_t>(i * n), static_cast<std::size_t>(n));
  }
};

/// <v_t, e_k> by quadrature against the closed-form representer.
std::vector<double> representer_projection(const BasisSet& basis, double t);
/// d/dt <v_t, e_k>. Since <v_t, e_k> = e_k(t) exactly in H, this is e_k'(t);
/// analytic for the cosine family, the stored derivative otherwise.
std::vector<double> representer_projection_dt(const BasisSet& basis, double t, bool cosine);

RepresenterCoefficients representer_coeffs(const BasisSet& basis, const TimeGrid& time,
                                           bool cosine = true);

/// Vector p with p . samples == <from_samples(samples), e_k>. Lets sampled
/// sheets be projected with one dot product.
std::vector<double> projection_functional(const BasisSet& basis, int k);

struct ProjectedCoefficients {
  TimeGrid time;
  int n = 0;
  std::vector<double> x;   // <x0, e_k>
  std::vector<double> kb;  // [i][k], <kb(t_i, .), e_k>
  std::vector<double> ks;  // [i][k]
  std::function<double(double)> fb, fs;
};

ProjectedCoefficients project_coefficients(const SeparableModel& model, const SobolevPath& x0,
                                           const BasisSet& basis, const TimeGrid& time);

/// Euler scheme for X^{k,n}; X^{0,n} advances by dv^k X^{k,n} + v^k dX^{k,n}
/// with dv^k the increment of the table (v_dot integrated over the step).
/// Returns the X^{0,n} trajectories. The start value x_start is the initial diagonal x0(0).
PathEnsemble simulate_truncated(int n, const ProjectedCoefficients& proj,
                                const RepresenterCoefficients& rep, double x_start,
                                std::size_t n_paths, std::uint64_t seed, int substeps = 1);

namespace reference {
PathEnsemble simulate_truncated(int n, const ProjectedCoefficients& proj,
                                const RepresenterCoefficients& rep, double x_start,
                                std::size_t n_paths, std::uint64_t seed, int substeps = 1);
}

struct ConvergenceRow {
  int n = 0;
  double err_sup = 0.0;  // E sup_t |X^{0,n} - X^0|^2, X^0 the lifted diagonal
  double err_sup_se = 0.0;
  double err_xbar = 0.0;  // E sup_t |X^{0,n} - Xbar^n|^2, Xbar^n = sum_{k<n} v^k X^k
  double err_xbar_se = 0.0;
  double tail_proxy = 0.0;  // int E (R^n_t)^2 dt
  double ratio = 0.0;       // err_xbar / tail_proxy, the Gronwall constant
};

struct ConvergenceSetup {
  SeparableModel model;
  SobolevPath x0;
  int basis_size = 32;
  bool cosine = true;
  TimeGrid time;
  std::size_t n_paths = 1000;
  std::uint64_t seed = 0;
};

/// All runs share the Brownian increments of the reference lifted run.
std::vector<ConvergenceRow> convergence_study(const std::vector<int>& n_list,
                                              const ConvergenceSetup& setup);

}  // namespace vlab
