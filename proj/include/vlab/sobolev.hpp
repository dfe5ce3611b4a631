#pragma once

// Discretised W^{1,2}([0,T]): uniform grids, paths carrying values and
// derivatives, the trapezoidal H inner product, the evaluation representer
// and orthonormal bases.

#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

namespace vlab {

/// Uniform grid s_i = i*T/n on [0,T], n >= 2 subintervals.
class TimeGrid {
 public:
  TimeGrid(double horizon, int intervals);

  double horizon() const { return horizon_; }
  int intervals() const { return intervals_; }
  int size() const { return intervals_ + 1; }
  double step() const { return horizon_ / intervals_; }
  double point(int i) const;

  /// Grid index of t if t is a node (up to 1e-12 relative), otherwise -1.
  int node_index(double t) const;

  friend bool operator==(const TimeGrid& a, const TimeGrid& b) {
    return a.horizon_ == b.horizon_ && a.intervals_ == b.intervals_;
  }

 private:
  double horizon_;
  int intervals_;
};

/// Trapezoidal weights on the grid.
std::vector<double> trapezoid_weights(const TimeGrid& grid);

/// Trapezoidal integral of samples on the grid.
double trapezoid(const TimeGrid& grid, std::span<const double> samples);

/// Linear interpolation of grid samples at t in [0,T].
double interpolate(const TimeGrid& grid, std::span<const double> samples, double t);

/// Central differences in the interior, one-sided second-order at the ends.
std::vector<double> differentiate(const TimeGrid& grid, std::span<const double> samples);

/// Element of W^{1,2}([0,T]) sampled on a grid: values x(s_i) and Sobolev
/// derivative x'(s_i).
class SobolevPath {
 public:
  SobolevPath(TimeGrid grid, std::vector<double> values, std::vector<double> derivs);

  static SobolevPath from_function(const TimeGrid& grid, const std::function<double(double)>& f,
                                   const std::function<double(double)>& df);
  /// Derivative samples recovered by finite differences.
  static SobolevPath from_samples(const TimeGrid& grid, std::vector<double> values);
  static SobolevPath constant(const TimeGrid& grid, double c);

  const TimeGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<const double> derivs() const { return derivs_; }
  double value(int i) const { return values_[static_cast<std::size_t>(i)]; }
  double deriv(int i) const { return derivs_[static_cast<std::size_t>(i)]; }

  /// Continuous representative at t (linear interpolation).
  double at(double t) const;

  SobolevPath& operator+=(const SobolevPath& other);
  SobolevPath& operator-=(const SobolevPath& other);
  SobolevPath& operator*=(double c);

 private:
  TimeGrid grid_;
  std::vector<double> values_;
  std::vector<double> derivs_;
};

SobolevPath operator+(SobolevPath a, const SobolevPath& b);
SobolevPath operator-(SobolevPath a, const SobolevPath& b);
SobolevPath operator*(double c, SobolevPath a);

/// <u,v>_H = int u v + int u' v' (trapezoidal). Throws DimensionError on grid mismatch.
double inner_product(const SobolevPath& u, const SobolevPath& v);
double h_norm(const SobolevPath& u);
double sup_norm(const SobolevPath& u);

/// Vector-valued paths: component-wise sum of scalar inner products.
double inner_product(std::span<const SobolevPath> u, std::span<const SobolevPath> v);

/// sup_t |x(t)| <= sqrt(T + 1/T) ||x||_H on W^{1,2}([0,T]).
double embedding_constant(double horizon);

struct EmbeddingReport {
  double sup_norm = 0.0;
  double h_norm = 0.0;
  double bound = 0.0;  ///< embedding_constant(T) * h_norm
  bool constant_ok = false;
};

EmbeddingReport embedding_check(const SobolevPath& u);

/// Neumann Green's function of v - v'' = delta_t on [0,T].
double green_function(double horizon, double t, double s);
/// d/ds of green_function; at the kink s == t the mean of the one-sided
/// limits (one-sided at the boundary).
double green_function_ds(double horizon, double t, double s);
/// d/dt of green_function (t-derivative at fixed s).
double green_function_dt(double horizon, double t, double s);

struct RieszRepresenter {
  double eval_time;
  SobolevPath rep;
};

/// v_t with <v_t, x>_H = x(t). Throws DomainError for t outside [0,T].
RieszRepresenter riesz_representer(double t, const TimeGrid& grid);

struct BasisSet {
  TimeGrid grid;
  std::vector<SobolevPath> members;
  std::size_t size() const { return members.size(); }
};

/// Neumann cosine family e_0 = 1/sqrt(T), e_k = sqrt(2/T) cos(k pi s/T)/sqrt(1+(k pi/T)^2).
BasisSet cosine_basis(int n, const TimeGrid& grid);

/// Monomials (s/T)^k orthonormalised in H by repeated modified Gram-Schmidt.
BasisSet polynomial_basis(int n, const TimeGrid& grid);

/// Analytic value and derivative of the k-th cosine member.
double cosine_member(int k, double horizon, double s);
double cosine_member_ds(int k, double horizon, double s);

std::vector<double> project(const SobolevPath& x, const BasisSet& basis);
SobolevPath reconstruct(std::span<const double> coeffs, const BasisSet& basis);

/// CSV with columns s,value,deriv.
void write_path_csv(std::ostream& os, const SobolevPath& x);

}  // namespace vlab
