#include "vlab/bsde.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "vlab/error.hpp"
#include "vlab/markov.hpp"
#include "vlab/parallel.hpp"
#include "vlab/rng.hpp"

namespace vlab {

HamiltonianValue hamiltonian(const HamiltonianSpec& spec, double t, std::span<const double> state,
                             double z) {
  if (spec.a_grid.empty()) throw DomainError("hamiltonian: empty control grid");
  HamiltonianValue best;
  best.value = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < spec.a_grid.size(); ++k) {
    const double a = spec.a_grid[k];
    const double v = z * spec.theta(t, state, a) + spec.F(t, state, a);
    if (v > best.value) best = {v, a, k};  // strict: first index wins ties
  }
  return best;
}

StateSummary::StateSummary(const TimeGrid& space, int modes) {
  if (modes < 0) throw DomainError("StateSummary: negative mode count");
  if (modes == 0) return;
  const auto basis = cosine_basis(modes, space);
  for (int k = 0; k < modes; ++k) functionals_.push_back(projection_functional(basis, k));
}

void StateSummary::operator()(double x_diag, std::span<const double> row, std::span<double> out) const {
  out[0] = x_diag;
  for (std::size_t k = 0; k < functionals_.size(); ++k) {
    double acc = 0.0;
    const auto& f = functionals_[k];
    for (std::size_t j = 0; j < f.size(); ++j) acc += f[j] * row[j];
    out[k + 1] = acc;
  }
}

namespace {

// Multisets of variable indices of size <= degree, skipping dropped variables.
std::vector<std::vector<int>> monomials(const std::vector<double>& scale, int degree) {
  std::vector<std::vector<int>> out{{}};
  std::vector<std::vector<int>> layer{{}};
  const int d = static_cast<int>(scale.size());
  for (int deg = 1; deg <= degree; ++deg) {
    std::vector<std::vector<int>> next;
    for (const auto& m : layer) {
      for (int j = m.empty() ? 0 : m.back(); j < d; ++j) {
        if (scale[static_cast<std::size_t>(j)] == 0.0) continue;
        auto e = m;
        e.push_back(j);
        next.push_back(e);
      }
    }
    out.insert(out.end(), next.begin(), next.end());
    layer = std::move(next);
  }
  return out;
}

void features(const Regression& r, const std::vector<std::vector<int>>& mono,
              std::span<const double> state, std::vector<double>& f) {
  const std::size_t d = r.mean.size();
  double u[16];
  for (std::size_t j = 0; j < d; ++j) u[j] = r.scale[j] > 0.0 ? (state[j] - r.mean[j]) / r.scale[j] : 0.0;
  f.resize(mono.size());
  for (std::size_t q = 0; q < mono.size(); ++q) {
    double v = 1.0;
    for (int j : mono[q]) v *= u[j];
    f[q] = v;
  }
}

}  // namespace

double Regression::predict(std::span<const double> state) const {
  thread_local std::vector<double> f;
  features(*this, terms, state, f);
  double acc = 0.0;
  for (std::size_t q = 0; q < f.size(); ++q) acc += coef[q] * f[q];
  return acc;
}

Regression fit_regression(std::span<const double> states, std::size_t dim,
                          std::span<const double> target, int degree) {
  if (degree < 0 || degree > 4) throw ConfigError("reg_degree must lie in [0, 4]");
  if (dim == 0 || dim > 16) throw DimensionError("fit_regression: summary dimension out of range");
  const std::size_t n = target.size();
  if (states.size() != n * dim || n == 0) throw DimensionError("fit_regression: size mismatch");
  Regression r;
  r.degree = degree;
  r.mean.assign(dim, 0.0);
  r.scale.assign(dim, 0.0);
  for (std::size_t j = 0; j < dim; ++j) {
    std::vector<double> col(n);
    for (std::size_t p = 0; p < n; ++p) col[p] = states[p * dim + j];
    const auto e = estimate(col);
    const double sd = e.std_err * std::sqrt(static_cast<double>(n));
    r.mean[j] = e.mean;
    r.scale[j] = sd > 1e-12 * (1.0 + std::abs(e.mean)) ? sd : 0.0;
  }
  const auto mono = monomials(r.scale, degree);
  const auto q = static_cast<Eigen::Index>(mono.size());
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(q, q);
  Eigen::VectorXd b = Eigen::VectorXd::Zero(q);
  std::vector<double> f;
  for (std::size_t p = 0; p < n; ++p) {
    features(r, mono, states.subspan(p * dim, dim), f);
    const Eigen::Map<const Eigen::VectorXd> fv(f.data(), q);
    A.selfadjointView<Eigen::Lower>().rankUpdate(fv);
    b += target[p] * fv;
  }
  A.triangularView<Eigen::StrictlyUpper>() = A.transpose();
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod;
  cod.setThreshold(1e-10);
  cod.compute(A);
  const Eigen::VectorXd c = cod.solve(b);
  r.coef.assign(c.data(), c.data() + q);
  r.terms = mono;
  r.rank = static_cast<int>(cod.rank());
  r.n_features = static_cast<int>(q);
  return r;
}

namespace {

CoefficientSet weak_coefficients(const BsdeDynamics& dyn) {
  if (!dyn.sigma) throw DomainError("BsdeDynamics: sigma is required");
  CoefficientSet c;
  if (dyn.gamma) {
    c.b1 = [g = dyn.gamma, s = dyn.sigma](double t, double sp, double x, double u) {
      return g(t, sp, x) + s(t, sp) * u;
    };
  } else {
    c.b1 = [s = dyn.sigma](double t, double sp, double, double u) { return s(t, sp) * u; };
  }
  c.s1 = [s = dyn.sigma](double t, double sp, double, double) { return s(t, sp); };
  c.lipschitz = dyn.lipschitz;
  return c;
}

// Runs the dynamics under the control rule choose(i, t, state) and returns
// per-path int F dt + G (left-point sums).
std::vector<double> run_policy(const HamiltonianSpec& spec, const BsdeDynamics& dyn,
                               const TerminalRule& G, const TimeGrid& time, std::size_t n_paths,
                               std::uint64_t seed,
                               const std::function<double(int, double, std::span<const double>)>& choose) {
  const StateSummary summary(dyn.x0.grid(), dyn.summary_modes);
  const std::size_t dim = summary.dim();
  std::vector<double> state(n_paths * dim), chosen(n_paths), payoff(n_paths, 0.0);
  const double h = time.step();
  const int n = time.intervals();
  auto rule = [&](const StepContext& ctx) {
    std::span<double> st(state.data() + ctx.path * dim, dim);
    summary(ctx.x_diag, ctx.slice, st);
    const double a = choose(ctx.step, ctx.t, st);
    chosen[ctx.path] = a;
    return spec.theta(ctx.t, st, a);
  };
  LiftedOptions opts;
  opts.store_sheets = false;
  opts.observer = [&](const StepContext& ctx, double) {
    std::span<double> st(state.data() + ctx.path * dim, dim);
    if (ctx.step < n) {
      payoff[ctx.path] += spec.F(ctx.t, st, chosen[ctx.path]) * h;
    } else {
      summary(ctx.x_diag, ctx.slice, st);
      payoff[ctx.path] += G(st);
    }
  };
  simulate_lifted(weak_coefficients(dyn), ControlPath::lifted_feedback(rule), dyn.x0, time, n_paths,
                  seed, opts);
  return payoff;
}

}  // namespace

BsdeSolution solve_bsde(const HamiltonianSpec& spec, const BsdeDynamics& dyn, const TerminalRule& G,
                        const TimeGrid& time, std::size_t n_paths, std::uint64_t seed,
                        const BsdeOptions& opts) {
  if (!spec.theta || !spec.F || spec.a_grid.empty()) throw DomainError("solve_bsde: incomplete Hamiltonian");
  if (!G) throw DomainError("solve_bsde: terminal rule required");
  const StateSummary summary(dyn.x0.grid(), dyn.summary_modes);
  const std::size_t dim = summary.dim();
  const int n = time.intervals();
  const auto rows = static_cast<std::size_t>(n + 1);
  const double h = time.step();

  // Forward pass under the base measure (theta not applied).
  std::vector<double> states(n_paths * rows * dim);
  LiftedOptions lo;
  lo.store_sheets = false;
  lo.observer = [&](const StepContext& ctx, double) {
    std::span<double> st(states.data() + (ctx.path * rows + static_cast<std::size_t>(ctx.step)) * dim, dim);
    summary(ctx.x_diag, ctx.slice, st);
  };
  simulate_lifted(weak_coefficients(dyn), ControlPath::constant(0.0), dyn.x0, time, n_paths, seed, lo);

  std::vector<double> dw(n_paths * static_cast<std::size_t>(n));
  parallel_paths(n_paths, [&](std::size_t p) {
    brownian_increments(seed, p, h, 1, std::span<double>(dw).subspan(p * static_cast<std::size_t>(n), static_cast<std::size_t>(n)));
  });

  auto state_at = [&](std::size_t p, int i) {
    return std::span<const double>(states).subspan((p * rows + static_cast<std::size_t>(i)) * dim, dim);
  };

  BsdeSolution sol;
  sol.n_paths = n_paths;
  sol.y_residual.assign(rows, 0.0);
  sol.z_residual.assign(rows, 0.0);
  sol.z_fit.resize(static_cast<std::size_t>(n));
  if (opts.keep_paths) {
    sol.y_paths.assign(n_paths * rows, 0.0);
    sol.z_paths.assign(n_paths * rows, 0.0);
  }

  std::vector<double> y(n_paths), target(n_paths), zt(n_paths), z(n_paths), slab(n_paths * dim);
  // Unregressed pathwise value G + sum H h: same mean as y0, but its spread is
  // the honest Monte Carlo error (the regressed targets are smoothed).
  std::vector<double> pathwise(n_paths);
  for (std::size_t p = 0; p < n_paths; ++p) {
    y[p] = G(state_at(p, n));
    pathwise[p] = y[p];
    if (!std::isfinite(y[p])) throw NumericalError(p, n, "terminal value not finite");
    if (opts.keep_paths) sol.y_paths[p * rows + static_cast<std::size_t>(n)] = y[p];
  }

  for (int i = n - 1; i >= 0; --i) {
    const double t = time.point(i);
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto st = state_at(p, i);
      std::copy(st.begin(), st.end(), slab.begin() + static_cast<std::ptrdiff_t>(p * dim));
      zt[p] = y[p] * dw[p * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] / h;
    }
    const auto zfit = fit_regression(slab, dim, zt, opts.degree);
    if (zfit.rank < zfit.n_features) ++sol.rank_deficient_steps;
    double zres = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const auto st = state_at(p, i);
      z[p] = zfit.predict(st);
      zres += (zt[p] - z[p]) * (zt[p] - z[p]);
      const double hv = hamiltonian(spec, t, st, z[p]).value * h;
      target[p] = y[p] + hv;
      pathwise[p] += hv;
    }
    const auto yfit = fit_regression(slab, dim, target, opts.degree);
    if (yfit.rank < yfit.n_features) ++sol.rank_deficient_steps;
    double yres = 0.0;
    for (std::size_t p = 0; p < n_paths; ++p) {
      const double fit = yfit.predict(state_at(p, i));
      yres += (target[p] - fit) * (target[p] - fit);
      y[p] = fit;
      if (!std::isfinite(fit)) throw NumericalError(p, i, "BSDE value not finite");
      if (opts.keep_paths) {
        sol.y_paths[p * rows + static_cast<std::size_t>(i)] = fit;
        sol.z_paths[p * rows + static_cast<std::size_t>(i)] = z[p];
      }
    }
    sol.y_residual[static_cast<std::size_t>(i)] = std::sqrt(yres / static_cast<double>(n_paths));
    sol.z_residual[static_cast<std::size_t>(i)] = std::sqrt(zres / static_cast<double>(n_paths));
    sol.n_features = std::max(sol.n_features, yfit.n_features);
    sol.z_fit[static_cast<std::size_t>(i)] = zfit;
    if (i == 0) {
      sol.y0 = estimate(target).mean;
      sol.y0_se = estimate(pathwise).std_err;
    }
  }
  return sol;
}

McEstimate fixed_control_value(const HamiltonianSpec& spec, double a_const, const BsdeDynamics& dyn,
                               const TerminalRule& G, const TimeGrid& time, std::size_t n_paths,
                               std::uint64_t seed) {
  return estimate(run_policy(spec, dyn, G, time, n_paths, seed,
                             [a_const](int, double, std::span<const double>) { return a_const; }));
}

McEstimate greedy_value(const HamiltonianSpec& spec, const BsdeSolution& sol, const BsdeDynamics& dyn,
                        const TerminalRule& G, const TimeGrid& time, std::size_t n_paths,
                        std::uint64_t seed) {
  if (sol.z_fit.size() != static_cast<std::size_t>(time.intervals())) {
    throw DimensionError("greedy_value: solution was computed on a different grid");
  }
  return estimate(run_policy(spec, dyn, G, time, n_paths, seed,
                             [&](int i, double t, std::span<const double> st) {
                               const double z = sol.z_fit[static_cast<std::size_t>(i)].predict(st);
                               return hamiltonian(spec, t, st, z).a_star;
                             }));
}

}  // namespace vlab
