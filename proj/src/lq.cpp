#include "vlab/lq.hpp"

#include <cmath>
#include <memory>

#include "vlab/error.hpp"

namespace vlab {

Kernel kernel_preset(const std::string& name) {
  if (name == "one") return [](double) { return 1.0; };
  if (name == "zero") return [](double) { return 0.0; };
  if (name == "exp") return [](double u) { return std::exp(-u); };
  throw ConfigError("unknown kernel preset '" + name + "' (expected one, zero, exp)");
}

RiccatiField::RiccatiField(TimeGrid grid) : grid_(grid) {
  const int n = grid_.intervals();
  std::size_t total = 0;
  for (int i = 0; i <= n; ++i) {
    start_.push_back(total);
    const auto m = static_cast<std::size_t>(n - i + 1);
    total += m * m;
  }
  data_.assign(total, 0.0);
  offset_.assign(static_cast<std::size_t>(n + 1), 0.0);
}

std::size_t RiccatiField::index(int i, int j, int k) const {
  const auto m = static_cast<std::size_t>(grid_.intervals() - i + 1);
  return start_[static_cast<std::size_t>(i)] + static_cast<std::size_t>(j - i) * m +
         static_cast<std::size_t>(k - i);
}

double RiccatiField::at(int i, int j, int k) const {
  if (j < i || k < i) return 0.0;
  return data_[index(i, j, k)];
}

void RiccatiField::set(int i, int j, int k, double v) {
  const int n = grid_.intervals();
  if (i < 0 || i > n || j < i || k < i || j > n || k > n) {
    throw DimensionError("RiccatiField::set: index outside the triangular support");
  }
  data_[index(i, j, k)] = v;
  data_[index(i, k, j)] = v;
}

namespace {

// Trapezoid weights on [t_i, T] restricted to nodes i..n (zero-length at i == n).
std::vector<double> tail_weights(const TimeGrid& g, int i) {
  const int n = g.intervals();
  std::vector<double> w(static_cast<std::size_t>(n + 1), 0.0);
  if (i == n) return w;
  const double h = g.step();
  for (int m = i; m <= n; ++m) w[static_cast<std::size_t>(m)] = h;
  w[static_cast<std::size_t>(i)] = 0.5 * h;
  w[static_cast<std::size_t>(n)] = 0.5 * h;
  return w;
}

std::vector<double> kernel_row(const TimeGrid& g, const Kernel& phi, int i) {
  std::vector<double> p(static_cast<std::size_t>(g.size()), 0.0);
  for (int m = i; m <= g.intervals(); ++m) p[static_cast<std::size_t>(m)] = phi(g.point(m) - g.point(i));
  return p;
}

}  // namespace

std::vector<double> star(const RiccatiField& c, const Kernel& phi, int i) {
  const TimeGrid& g = c.grid();
  const int n = g.intervals();
  const auto w = tail_weights(g, i);
  const auto p = kernel_row(g, phi, i);
  std::vector<double> out(static_cast<std::size_t>(n + 1), 0.0);
  for (int j = i; j <= n; ++j) {
    double acc = 0.0;
    for (int m = i; m <= n; ++m) acc += w[static_cast<std::size_t>(m)] * c.at(i, j, m) * p[static_cast<std::size_t>(m)];
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

std::vector<double> feedback_kernel(const RiccatiField& c, const Kernel& phi, int i) {
  auto g = star(c, phi, i);
  for (int j = i; j <= c.grid().intervals(); ++j) {
    g[static_cast<std::size_t>(j)] -= phi(c.grid().point(j) - c.grid().point(i));
  }
  return g;
}

RiccatiField solve_riccati(const Kernel& phi, const TimeGrid& grid, const RiccatiOptions& opts) {
  if (!phi) throw DomainError("solve_riccati: empty kernel");
  const int n = grid.intervals();
  const double h = grid.step();
  const double phi0 = phi(0.0);
  if (!std::isfinite(phi0)) throw DomainError("solve_riccati: kernel not finite at 0");
  RiccatiField c(grid);

  auto check = [&](int i, double v) {
    if (!std::isfinite(v) || std::abs(v) > opts.blowup_cap) {
      throw SolverError(i, "Riccati field exceeded the blow-up cap");
    }
  };

  // t = T: the support is the single point (T, T).
  std::vector<double> g_next(static_cast<std::size_t>(n + 1), 0.0);
  g_next[static_cast<std::size_t>(n)] = -phi0;
  c.set(n, n, n, -phi0);
  double q_next = 0.0;  // Q(t) = int_t^T phi(r - t) g(t, r) dr

  for (int i = n - 1; i >= 0; --i) {
    for (int j = i + 1; j <= n; ++j) {
      for (int k = j; k <= n; ++k) {
        const double v = c.at(i + 1, j, k) + h * g_next[static_cast<std::size_t>(j)] * g_next[static_cast<std::size_t>(k)];
        check(i, v);
        c.set(i, j, k, v);
      }
    }
    const auto w = tail_weights(grid, i);
    const auto p = kernel_row(grid, phi, i);
    const double denom = 1.0 - w[static_cast<std::size_t>(i)] * phi0;
    if (std::abs(denom) < 1e-12) throw SolverError(i, "boundary system is singular (step too large)");
    std::vector<double> g(static_cast<std::size_t>(n + 1), 0.0);
    for (int j = i + 1; j <= n; ++j) {
      double acc = -p[static_cast<std::size_t>(j)];
      for (int m = i + 1; m <= n; ++m) acc += w[static_cast<std::size_t>(m)] * c.at(i, j, m) * p[static_cast<std::size_t>(m)];
      g[static_cast<std::size_t>(j)] = acc / denom;
    }
    double corner = -phi0;
    for (int m = i + 1; m <= n; ++m) corner += w[static_cast<std::size_t>(m)] * g[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(m)];
    g[static_cast<std::size_t>(i)] = corner / denom;
    for (int j = i; j <= n; ++j) {
      check(i, g[static_cast<std::size_t>(j)]);
      c.set(i, i, j, g[static_cast<std::size_t>(j)]);
    }
    double q = 0.0;
    for (int m = i; m <= n; ++m) q += w[static_cast<std::size_t>(m)] * p[static_cast<std::size_t>(m)] * g[static_cast<std::size_t>(m)];
    // da/dt = -Q/2, trapezoid in t.
    c.set_offset(i, c.offset(i + 1) + 0.25 * h * (q + q_next));
    g_next = std::move(g);
    q_next = q;
  }
  return c;
}

double quadratic_value(const RiccatiField& c, int i, std::span<const double> x) {
  const TimeGrid& g = c.grid();
  const int n = g.intervals();
  if (x.size() != static_cast<std::size_t>(n + 1)) throw DimensionError("value: path not on the field grid");
  const auto w = tail_weights(g, i);
  double diag = 0.0, quad = 0.0;
  for (int j = i; j <= n; ++j) {
    const double xj = x[static_cast<std::size_t>(j)];
    const double wj = w[static_cast<std::size_t>(j)];
    diag += wj * xj * xj;
    double row = 0.0;
    for (int k = i; k <= n; ++k) row += w[static_cast<std::size_t>(k)] * c.at(i, j, k) * x[static_cast<std::size_t>(k)];
    quad += wj * xj * row;
  }
  return -0.5 * diag + 0.5 * quad;
}

double value(const RiccatiField& c, int i, std::span<const double> x) {
  return quadratic_value(c, i, x) + c.offset(i);
}

double feedback(const RiccatiField& c, const Kernel& phi, int i, std::span<const double> x) {
  const TimeGrid& g = c.grid();
  if (x.size() != static_cast<std::size_t>(g.size())) throw DimensionError("feedback: path not on the field grid");
  const auto gk = feedback_kernel(c, phi, i);
  const auto w = tail_weights(g, i);
  double acc = 0.0;
  for (int j = i; j <= g.intervals(); ++j) {
    acc += w[static_cast<std::size_t>(j)] * gk[static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
  }
  return acc;
}

CoefficientSet lq_coefficients(const Kernel& phi, double horizon) {
  double sup = 0.0;
  for (int k = 0; k <= 1000; ++k) sup = std::max(sup, std::abs(phi(horizon * k / 1000.0)));
  CoefficientSet c;
  c.b1 = [phi](double t, double s, double x, double a) { return s >= t ? phi(s - t) * (x + a) : 0.0; };
  c.s1 = [phi](double t, double s, double, double) { return s >= t ? phi(s - t) : 0.0; };
  c.lipschitz = sup * 1.001 + 1e-12;
  return c;
}

ControlPath riccati_policy(const RiccatiField& c, const Kernel& phi, double gain) {
  const TimeGrid& g = c.grid();
  // Weighted feedback kernels, one row per step.
  auto rows = std::make_shared<std::vector<std::vector<double>>>();
  for (int i = 0; i <= g.intervals(); ++i) {
    auto gk = feedback_kernel(c, phi, i);
    const auto w = tail_weights(g, i);
    for (std::size_t j = 0; j < gk.size(); ++j) gk[j] *= gain * w[j];
    rows->push_back(std::move(gk));
  }
  return ControlPath::lifted_feedback([rows](const StepContext& ctx) {
    const auto& r = (*rows)[static_cast<std::size_t>(ctx.step)];
    if (ctx.slice.size() != r.size()) throw DimensionError("riccati_policy: lifted state not on the field grid");
    double acc = 0.0;
    for (std::size_t j = static_cast<std::size_t>(ctx.step); j < r.size(); ++j) acc += r[j] * ctx.slice[j];
    return acc;
  });
}

std::vector<double> mc_rewards(const Kernel& phi, const ControlPath& policy, double x0,
                               const TimeGrid& grid, std::size_t n_paths, std::uint64_t seed) {
  std::vector<double> reward(n_paths, 0.0);
  const double h = grid.step();
  const int n = grid.intervals();
  LiftedOptions opts;
  opts.store_sheets = false;
  opts.observer = [&](const StepContext& ctx, double a) {
    if (ctx.step < n) reward[ctx.path] += -0.5 * (ctx.x_diag * ctx.x_diag + a * a) * h;
  };
  simulate_lifted(lq_coefficients(phi, grid.horizon()), policy, SobolevPath::constant(grid, x0), grid,
                  n_paths, seed, opts);
  return reward;
}

McEstimate mc_value(const Kernel& phi, const ControlPath& policy, double x0, const TimeGrid& grid,
                    std::size_t n_paths, std::uint64_t seed) {
  return estimate(mc_rewards(phi, policy, x0, grid, n_paths, seed));
}

}  // namespace vlab
