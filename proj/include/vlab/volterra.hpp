#pragma once

// Monte Carlo simulation of controlled Volterra dynamics, both directly
//   X_t = x0 + sum_r b_r(t, X_r, a_r) dr + sum_r sigma_r(t, X_r, a_r) dW_r
// and through the lifted W^{1,2}-valued SDE
//   dX^s_t = b_t(s, X^t_t, X^s_t, a_t) dt + sigma_t(s, X^t_t, X^s_t, a_t) dW_t.
//
// Coefficients use the lifted convention throughout: first argument is the
// running time t, second the Volterra parameter s. The direct equation reads
// b_r(t, x, a) as b1(r, t, x, a).

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "vlab/sobolev.hpp"

namespace vlab {

/// phi_t(s, x, y, a) = phi1_t(s, x, a) + phi2_t(s, a) * y  for phi in {b, sigma}.
struct CoefficientSet {
  using DiagonalRule = std::function<double(double t, double s, double x, double a)>;
  using SliceRule = std::function<double(double t, double s, double a)>;

  DiagonalRule b1, db1, s1, ds1;  // db1, ds1: d/ds
  SliceRule b2, db2, s2, ds2;     // empty rule == 0

  double bound = 1.0;      ///< declared M bounding |b2|, |db2|, |s2|, |ds2|
  double lipschitz = 1.0;  ///< declared L for b1, db1, s1, ds1 in x

  bool depends_on_slice() const { return static_cast<bool>(b2) || static_cast<bool>(s2); }

  double drift(double t, double s, double x, double y, double a) const {
    return b2 ? b1(t, s, x, a) + b2(t, s, a) * y : b1(t, s, x, a);
  }
  double vol(double t, double s, double x, double y, double a) const {
    return s2 ? s1(t, s, x, a) + s2(t, s, a) * y : s1(t, s, x, a);
  }
  /// d/ds of s -> b_t(s, x, y(s), a) given y(s) and y'(s).
  double drift_ds(double t, double s, double x, double y, double dy, double a) const;
  double vol_ds(double t, double s, double x, double y, double dy, double a) const;

  /// s -> sigma_t(s, x(t), x(s), a) as an element of H (analytic s-derivative).
  SobolevPath vol_profile(double t, const SobolevPath& x, double a) const;
  SobolevPath drift_profile(double t, const SobolevPath& x, double a) const;
};

/// Compact control set A = [lo, hi].
struct ControlBox {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool contains(double a) const { return a >= lo && a <= hi; }
  double clamp(double a) const { return a < lo ? lo : (a > hi ? hi : a); }
};

struct CoefficientCheck {
  bool bounded_ok = true;
  bool lipschitz_ok = true;
  double max_bound_seen = 0.0;
  double max_lipschitz_seen = 0.0;
  bool ok() const { return bounded_ok && lipschitz_ok; }
};

/// Randomised probing of the declared bound M and Lipschitz constant L over
/// (t, s) in [0,T]^2, a in the box (or [-1,1] if unbounded) and |x| <= 10.
CoefficientCheck check_coefficients(const CoefficientSet& c, double horizon, ControlBox box,
                                    int probes = 256, std::uint64_t seed = 0x5eed);

/// What a control rule sees at a step: the path, the step index, the time,
/// the diagonal value and (lifted runs only) the current sheet row.
struct StepContext {
  std::size_t path = 0;
  int step = 0;
  double t = 0.0;
  double x_diag = 0.0;
  std::span<const double> slice;
};

class ControlPath {
 public:
  enum class Kind { constant, piecewise, diagonal_feedback, lifted_feedback };

  static ControlPath constant(double a, ControlBox box = {});
  /// values[i] applies on [t_i, t_{i+1}); breakpoints are grid nodes by construction.
  static ControlPath piecewise(std::vector<double> values, ControlBox box = {});
  static ControlPath feedback(std::function<double(double t, double x)> rule, ControlBox box = {});
  static ControlPath lifted_feedback(std::function<double(const StepContext&)> rule,
                                     ControlBox box = {});

  Kind kind() const { return kind_; }
  const ControlBox& box() const { return box_; }
  /// Control value in the box for this step.
  double at(const StepContext& ctx) const;
  /// Throws DomainError/DimensionError if the control cannot drive `steps` steps.
  void validate(int steps) const;

 private:
  Kind kind_ = Kind::constant;
  ControlBox box_;
  double constant_ = 0.0;
  std::vector<double> values_;
  std::function<double(double, double)> diag_rule_;
  std::function<double(const StepContext&)> lifted_rule_;
};

struct McEstimate {
  double mean = 0.0;
  double std_err = 0.0;
  std::size_t n = 0;
};

/// Mean and standard error with a fixed pairwise summation order.
McEstimate estimate(std::span<const double> samples);
double pairwise_sum(std::span<const double> x);

class PathEnsemble {
 public:
  enum class Layout { diagonal, lifted };

  static PathEnsemble make_diagonal(TimeGrid time, std::size_t n_paths, std::uint64_t seed,
                                    std::vector<double> data);
  static PathEnsemble make_lifted(TimeGrid time, TimeGrid space, std::size_t n_paths,
                                  std::uint64_t seed, std::vector<double> data);

  Layout layout() const { return layout_; }
  const TimeGrid& time_grid() const { return time_; }
  const TimeGrid& space_grid() const;
  std::size_t n_paths() const { return n_paths_; }
  std::uint64_t seed() const { return seed_; }
  std::span<const double> data() const { return data_; }

  /// Diagonal trajectory of path p (diagonal layout).
  std::span<const double> path(std::size_t p) const;
  double x(std::size_t p, int i) const { return path(p)[static_cast<std::size_t>(i)]; }
  /// Sheet row s -> X^s_{t_i} of path p (lifted layout).
  std::span<const double> slice(std::size_t p, int i) const;
  /// Column of all paths at time index i (diagonal layout).
  std::vector<double> at_time(int i) const;

 private:
  PathEnsemble(Layout layout, TimeGrid time, std::optional<TimeGrid> space, std::size_t n_paths,
               std::uint64_t seed, std::vector<double> data);

  Layout layout_;
  TimeGrid time_;
  std::optional<TimeGrid> space_;
  std::size_t n_paths_;
  std::uint64_t seed_;
  std::vector<double> data_;
};

/// t -> X^t_t read by linear interpolation in s.
PathEnsemble diagonal(const PathEnsemble& lifted);

/// CSV: diagonal `path_id,t,x`; lifted `path_id,t,s,x`.
void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens);

struct LiftedOptions {
  int substeps = 1;          ///< Brownian refinement factor (coupling across grids)
  bool store_sheets = true;  ///< false: keep only the diagonal
  /// Called at every step i = 0..n_t with the state at t_i and the control
  /// applied on [t_i, t_{i+1}) (NaN at the final step). Must only write
  /// path-local data.
  std::function<void(const StepContext&, double control)> observer;
};

struct DirectOptions {
  int substeps = 1;
  std::function<void(const StepContext&, double control)> observer;
};

/// Left-point Euler for the Volterra integral equation; O(n_t^2) per path.
PathEnsemble simulate_direct(const CoefficientSet& coeffs, const ControlPath& ctrl, double x0,
                             const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                             const DirectOptions& opts = {});

/// Euler step applied to every s-slice of the lifted state.
PathEnsemble simulate_lifted(const CoefficientSet& coeffs, const ControlPath& ctrl,
                             const SobolevPath& x0_path, const TimeGrid& time,
                             std::size_t n_paths, std::uint64_t seed,
                             const LiftedOptions& opts = {});

namespace reference {
// Serial reference implementations; same results bit for bit.
PathEnsemble simulate_direct(const CoefficientSet& coeffs, const ControlPath& ctrl, double x0,
                             const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                             const DirectOptions& opts = {});
PathEnsemble simulate_lifted(const CoefficientSet& coeffs, const ControlPath& ctrl,
                             const SobolevPath& x0_path, const TimeGrid& time,
                             std::size_t n_paths, std::uint64_t seed,
                             const LiftedOptions& opts = {});
}  // namespace reference

/// sum_{k >= N} <sigma_t(., x(t), x(.), a), e_k>^2 over the basis (0-based
/// members, the first N are retained).
double tail_trace(const CoefficientSet& coeffs, const BasisSet& basis, int retained, double t,
                  const SobolevPath& x, double a);

/// Shared precondition of both simulators.
void validate_simulation(const CoefficientSet& coeffs, const ControlPath& ctrl,
                         const TimeGrid& time, std::size_t n_paths, int substeps);

}  // namespace vlab
