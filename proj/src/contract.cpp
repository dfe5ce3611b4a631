#include "vlab/contract.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Dense>

#include "vlab/error.hpp"

namespace vlab {

void DiscountSpec::validate() const {
  if (betas.empty() || betas.size() != rhos.size()) {
    throw DomainError("DiscountSpec: betas and rhos must be nonempty and of equal length");
  }
  double sum = 0.0;
  for (double b : betas) {
    if (!(b > 0.0)) throw DomainError("DiscountSpec: betas must be positive");
    sum += b;
  }
  if (std::abs(sum - 1.0) > 1e-12) throw DomainError("DiscountSpec: betas must sum to 1");
  for (std::size_t k = 0; k < rhos.size(); ++k) {
    if (!(rhos[k] >= 0.0) || !std::isfinite(rhos[k])) throw DomainError("DiscountSpec: rhos must be >= 0");
    for (std::size_t j = 0; j < k; ++j) {
      if (rhos[j] == rhos[k]) throw DomainError("DiscountSpec: duplicate rho");
    }
  }
}

double DiscountSpec::f(double t) const {
  double acc = 0.0;
  for (std::size_t k = 0; k < betas.size(); ++k) acc += betas[k] * std::exp(-rhos[k] * t);
  return acc;
}

double DiscountSpec::phi(std::size_t k, double s) const { return betas[k] * std::exp(rhos[k] * s); }

PhiBasis phi_basis(const DiscountSpec& spec, const TimeGrid& grid) {
  spec.validate();
  PhiBasis b;
  const std::size_t n = spec.size();
  for (std::size_t k = 0; k < n; ++k) {
    const double r = spec.rhos[k];
    b.phi.push_back(SobolevPath::from_function(
        grid, [&spec, k](double s) { return spec.phi(k, s); },
        [&spec, k, r](double s) { return r * spec.phi(k, s); }));
  }
  Eigen::MatrixXd g(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double v = inner_product(b.phi[i], b.phi[j]);
      b.gram.push_back(v);
      g(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
    }
  }
  b.min_eigenvalue = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(g).eigenvalues().minCoeff();
  return b;
}

CostRule clamped_quadratic_cost(double amax) {
  if (!(amax > 0.0)) throw DomainError("clamped_quadratic_cost: amax must be positive");
  return [amax](double, double z) {
    const double a = std::clamp(z, 0.0, amax);
    return 0.5 * a * a;
  };
}

void check_reduced(const DiscountSpec& spec, const ZRule& z_rule, const CostRule& cost,
                   std::span<const double> y0, std::size_t n_paths) {
  spec.validate();
  if (!z_rule || !cost) throw DomainError("simulate_reduced: control and cost rules required");
  if (y0.size() != spec.size()) throw DimensionError("simulate_reduced: y0 has the wrong length");
  if (n_paths == 0) throw DomainError("simulate_reduced: n_paths must be positive");
  for (int k = -20; k <= 20; ++k) {
    const double c = cost(0.0, 0.5 * k);
    if (!std::isfinite(c) || c < 0.0) throw DomainError("simulate_reduced: cost must be finite and >= 0");
  }
}

double TargetLine::distance(std::span<const double> y) const {
  if (y.size() != direction.size()) throw DimensionError("target_distance: dimension mismatch");
  double along = 0.0, sq = 0.0;
  for (std::size_t k = 0; k < y.size(); ++k) along += y[k] * direction[k];
  for (std::size_t k = 0; k < y.size(); ++k) {
    const double r = y[k] - along * direction[k];
    sq += r * r;
  }
  return std::sqrt(sq);
}

TargetLine target_line(const DiscountSpec& spec, double horizon) {
  spec.validate();
  TargetLine l;
  double nrm = 0.0;
  for (double r : spec.rhos) {
    l.direction.push_back(std::exp(-r * horizon));
    nrm += l.direction.back() * l.direction.back();
  }
  nrm = std::sqrt(nrm);
  for (auto& d : l.direction) d /= nrm;
  return l;
}

std::vector<double> target_distance(const ReducedEnsemble& ens, const TargetLine& line) {
  if (line.direction.size() != ens.dim) throw DimensionError("target_distance: dimension mismatch");
  std::vector<double> out(ens.n_paths);
  for (std::size_t p = 0; p < ens.n_paths; ++p) out[p] = line.distance(ens.terminal(p));
  return out;
}

AdmissibleControl admissible_control(const DiscountSpec& spec, const CostRule& cost,
                                     std::function<double(double)> zeta, double lambda0,
                                     double horizon, int quad_intervals) {
  spec.validate();
  if (quad_intervals < 2 || quad_intervals % 2 != 0) throw DomainError("admissible_control: need an even quadrature count");
  const std::size_t n = spec.size();
  std::vector<double> d(n);
  for (std::size_t k = 0; k < n; ++k) d[k] = std::exp(-spec.rhos[k] * horizon);
  AdmissibleControl a;
  const double h = horizon / quad_intervals;
  for (std::size_t k = 0; k < n; ++k) {
    // Simpson
    double acc = 0.0;
    for (int m = 0; m <= quad_intervals; ++m) {
      const double r = m * h;
      const double w = (m == 0 || m == quad_intervals) ? 1.0 : (m % 2 ? 4.0 : 2.0);
      acc += w * std::exp(-spec.rhos[k] * r) * cost(r, zeta(r) * spec.f(horizon - r));
    }
    a.y0.push_back(lambda0 * d[k] - acc * h / 3.0);
  }
  a.rule = [d, zeta](double t, std::span<const double>, std::span<double> z) {
    const double zt = zeta(t);
    for (std::size_t k = 0; k < d.size(); ++k) z[k] = d[k] * zt;
  };
  return a;
}

CoefficientSet reduced_lifted_coefficients(const DiscountSpec& spec, const CostRule& cost,
                                           std::function<double(double)> zeta, double horizon,
                                           double eps_orthogonal) {
  spec.validate();
  CoefficientSet c;
  c.b1 = [spec, cost, zeta, horizon](double t, double s, double, double) {
    return spec.f(t - s) * cost(t, zeta(t) * spec.f(horizon - t));
  };
  c.s1 = [spec, zeta, horizon, eps_orthogonal](double t, double s, double, double) {
    return zeta(t) * spec.f(horizon - s) + eps_orthogonal * std::cos(std::numbers::pi * s / horizon);
  };
  c.lipschitz = 1.0;
  return c;
}

SobolevPath assemble(const DiscountSpec& spec, const TimeGrid& grid, std::span<const double> y) {
  const auto b = phi_basis(spec, grid);
  if (y.size() != b.phi.size()) throw DimensionError("assemble: coefficient count mismatch");
  auto out = SobolevPath::constant(grid, 0.0);
  for (std::size_t k = 0; k < y.size(); ++k) out += y[k] * b.phi[k];
  return out;
}

namespace {

std::vector<SobolevPath> orthonormal(std::vector<SobolevPath> v) {
  std::vector<SobolevPath> q;
  for (auto& p : v) {
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& e : q) p -= inner_product(p, e) * e;
    }
    const double nrm = h_norm(p);
    if (!(nrm > 1e-14)) throw DomainError("span_residual: phi family is numerically dependent");
    p *= 1.0 / nrm;
    q.push_back(std::move(p));
  }
  return q;
}

double residual_norm(const SobolevPath& x, const std::vector<SobolevPath>& q) {
  auto r = x;
  for (const auto& e : q) r -= inner_product(x, e) * e;
  return h_norm(r);
}

}  // namespace

double span_residual(std::span<const SobolevPath> paths, const DiscountSpec& spec) {
  if (paths.empty()) return 0.0;
  const auto q = orthonormal(phi_basis(spec, paths.front().grid()).phi);
  double acc = 0.0;
  for (const auto& x : paths) acc += residual_norm(x, q);
  return acc / static_cast<double>(paths.size());
}

double span_residual(const PathEnsemble& lifted, const DiscountSpec& spec, bool analytic_basis) {
  const TimeGrid& space = lifted.space_grid();
  auto phi = phi_basis(spec, space).phi;
  if (!analytic_basis) {
    for (auto& p : phi) p = SobolevPath::from_samples(space, {p.values().begin(), p.values().end()});
  }
  const auto q = orthonormal(std::move(phi));
  std::vector<double> per;
  for (std::size_t p = 0; p < lifted.n_paths(); ++p) {
    for (int i = 0; i < lifted.time_grid().size(); ++i) {
      const auto row = lifted.slice(p, i);
      per.push_back(residual_norm(SobolevPath::from_samples(space, {row.begin(), row.end()}), q));
    }
  }
  return pairwise_sum(per) / static_cast<double>(per.size());
}

std::vector<GramRow> gram_impossibility(std::span<const double> t_values, const TimeGrid& grid) {
  const auto v0 = riesz_representer(0.0, grid).rep;
  const double a = inner_product(v0, v0);
  std::vector<GramRow> out;
  for (double t : t_values) {
    const auto vt = riesz_representer(t, grid).rep;
    const double b = inner_product(v0, vt);
    const double c = inner_product(vt, vt);
    out.push_back({t, a * c - b * b});
  }
  return out;
}

}  // namespace vlab
