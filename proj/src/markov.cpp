#include "vlab/markov.hpp"

#include <algorithm>
#include <cmath>

#include "vlab/error.hpp"

namespace vlab {

CoefficientSet SeparableModel::coefficients() const {
  if (!kb || !ks || !fb || !fs) throw DomainError("SeparableModel: kb, ks, fb, fs are required");
  CoefficientSet c;
  c.b1 = [kb = kb, fb = fb](double t, double s, double x, double) { return kb(t, s) * fb(x); };
  c.s1 = [ks = ks, fs = fs](double t, double s, double x, double) { return ks(t, s) * fs(x); };
  if (kb_ds) c.db1 = [d = kb_ds, fb = fb](double t, double s, double x, double) { return d(t, s) * fb(x); };
  if (ks_ds) c.ds1 = [d = ks_ds, fs = fs](double t, double s, double x, double) { return d(t, s) * fs(x); };
  c.lipschitz = lipschitz;
  return c;
}

std::vector<double> representer_projection(const BasisSet& basis, double t) {
  const TimeGrid& g = basis.grid;
  if (g.node_index(t) >= 0 || t <= 0.0 || t >= g.horizon()) {
    return project(riesz_representer(t, g).rep, basis);
  }
  // Off-node the kink sits inside a cell and the trapezoid drops to first order;
  // t -> <v_t, e_k> is smooth, so interpolate between the neighbouring nodes.
  const int i = std::min(static_cast<int>(t / g.step()), g.intervals() - 1);
  const double w = (t - g.point(i)) / g.step();
  auto lo = project(riesz_representer(g.point(i), g).rep, basis);
  const auto hi = project(riesz_representer(g.point(i + 1), g).rep, basis);
  for (std::size_t k = 0; k < lo.size(); ++k) lo[k] = (1.0 - w) * lo[k] + w * hi[k];
  return lo;
}

std::vector<double> representer_projection_dt(const BasisSet& basis, double t, bool cosine) {
  std::vector<double> d(basis.size());
  const double T = basis.grid.horizon();
  for (std::size_t k = 0; k < basis.size(); ++k) {
    d[k] = cosine ? cosine_member_ds(static_cast<int>(k), T, t)
                  : interpolate(basis.grid, basis.members[k].derivs(), t);
  }
  return d;
}

RepresenterCoefficients representer_coeffs(const BasisSet& basis, const TimeGrid& time,
                                           bool cosine) {
  if (basis.grid.horizon() != time.horizon()) {
    throw DimensionError("representer_coeffs: basis and time grid horizons differ");
  }
  RepresenterCoefficients r{time, static_cast<int>(basis.size()), {}, {}};
  for (int i = 0; i < time.size(); ++i) {
    const auto v = representer_projection(basis, time.point(i));
    const auto d = representer_projection_dt(basis, time.point(i), cosine);
    r.v.insert(r.v.end(), v.begin(), v.end());
    r.v_dot.insert(r.v_dot.end(), d.begin(), d.end());
  }
  return r;
}

std::vector<double> projection_functional(const BasisSet& basis, int k) {
  const auto& e = basis.members.at(static_cast<std::size_t>(k));
  const auto w = trapezoid_weights(basis.grid);
  const std::size_t n = w.size();
  const double h2 = 2.0 * basis.grid.step();
  std::vector<double> p(n), u(n);
  for (std::size_t j = 0; j < n; ++j) {
    p[j] = w[j] * e.value(static_cast<int>(j));
    u[j] = w[j] * e.deriv(static_cast<int>(j));
  }
  // p += D^T u with D the differencing operator of `differentiate`.
  p[0] += u[0] * -3.0 / h2;
  p[1] += u[0] * 4.0 / h2;
  p[2] += u[0] * -1.0 / h2;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    p[i + 1] += u[i] / h2;
    p[i - 1] -= u[i] / h2;
  }
  p[n - 1] += u[n - 1] * 3.0 / h2;
  p[n - 2] += u[n - 1] * -4.0 / h2;
  p[n - 3] += u[n - 1] * 1.0 / h2;
  return p;
}

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) acc += a[j] * b[j];
  return acc;
}

}  // namespace

ProjectedCoefficients project_coefficients(const SeparableModel& model, const SobolevPath& x0,
                                           const BasisSet& basis, const TimeGrid& time) {
  if (!(x0.grid() == basis.grid)) throw DimensionError("project_coefficients: x0 not on the basis grid");
  if (!model.kb || !model.ks || !model.fb || !model.fs) {
    throw DomainError("project_coefficients: incomplete model");
  }
  const int n = static_cast<int>(basis.size());
  const TimeGrid& g = basis.grid;
  std::vector<std::vector<double>> func(basis.size());
  for (int k = 0; k < n; ++k) func[static_cast<std::size_t>(k)] = projection_functional(basis, k);

  ProjectedCoefficients pc{time, n, {}, {}, {}, model.fb, model.fs};
  for (int k = 0; k < n; ++k) pc.x.push_back(dot(func[static_cast<std::size_t>(k)], x0.values()));
  std::vector<double> kb_row(static_cast<std::size_t>(g.size())), ks_row(kb_row.size());
  for (int i = 0; i < time.size(); ++i) {
    const double t = time.point(i);
    for (int j = 0; j < g.size(); ++j) {
      kb_row[static_cast<std::size_t>(j)] = model.kb(t, g.point(j));
      ks_row[static_cast<std::size_t>(j)] = model.ks(t, g.point(j));
    }
    for (int k = 0; k < n; ++k) {
      pc.kb.push_back(dot(func[static_cast<std::size_t>(k)], kb_row));
      pc.ks.push_back(dot(func[static_cast<std::size_t>(k)], ks_row));
    }
  }
  return pc;
}

std::vector<ConvergenceRow> convergence_study(const std::vector<int>& n_list,
                                              const ConvergenceSetup& setup) {
  if (n_list.empty()) throw ConfigError("convergence_study: n_list is empty");
  const int kmax = *std::max_element(n_list.begin(), n_list.end());
  if (*std::min_element(n_list.begin(), n_list.end()) < 1 || kmax > setup.basis_size) {
    throw ConfigError("convergence_study: n values must lie in [1, basis_size]");
  }
  const TimeGrid& time = setup.time;
  const BasisSet basis = setup.cosine ? cosine_basis(setup.basis_size, setup.x0.grid())
                                      : polynomial_basis(setup.basis_size, setup.x0.grid());
  const auto rep = representer_coeffs(basis, time, setup.cosine);
  const auto proj = project_coefficients(setup.model, setup.x0, basis, time);

  std::vector<std::vector<double>> func;
  for (int k = 0; k < kmax; ++k) func.push_back(projection_functional(basis, k));

  const std::size_t np = setup.n_paths;
  const auto rows = static_cast<std::size_t>(time.size());
  const auto km = static_cast<std::size_t>(kmax);
  std::vector<double> comps(np * rows * km);

  LiftedOptions opts;
  opts.store_sheets = false;
  opts.observer = [&](const StepContext& ctx, double) {
    double* dst = comps.data() + (ctx.path * rows + static_cast<std::size_t>(ctx.step)) * km;
    for (std::size_t k = 0; k < km; ++k) dst[k] = dot(func[k], ctx.slice);
  };
  const auto ref = simulate_lifted(setup.model.coefficients(), ControlPath::constant(0.0), setup.x0,
                                   time, np, setup.seed, opts);

  std::vector<ConvergenceRow> out;
  for (int n : n_list) {
    const auto trunc = simulate_truncated(n, proj, rep, setup.x0.value(0), np, setup.seed);
    std::vector<double> e_ref(np), e_bar(np), tail(np), r2(rows);
    for (std::size_t p = 0; p < np; ++p) {
      double m_ref = 0.0, m_bar = 0.0;
      for (std::size_t i = 0; i < rows; ++i) {
        const auto v = rep.v_at(static_cast<int>(i));
        const double* xk = comps.data() + (p * rows + i) * km;
        double xbar = 0.0;
        for (int k = 0; k < n; ++k) xbar += v[static_cast<std::size_t>(k)] * xk[k];
        const double diag = ref.x(p, static_cast<int>(i));
        const double x = trunc.x(p, static_cast<int>(i));
        m_ref = std::max(m_ref, (x - diag) * (x - diag));
        m_bar = std::max(m_bar, (x - xbar) * (x - xbar));
        r2[i] = (diag - xbar) * (diag - xbar);
      }
      e_ref[p] = m_ref;
      e_bar[p] = m_bar;
      tail[p] = trapezoid(time, r2);
    }
    const auto a = estimate(e_ref);
    const auto b = estimate(e_bar);
    const auto c = estimate(tail);
    out.push_back({n, a.mean, a.std_err, b.mean, b.std_err, c.mean,
                   c.mean > 0.0 ? b.mean / c.mean : std::numeric_limits<double>::infinity()});
  }
  return out;
}

}  // namespace vlab
