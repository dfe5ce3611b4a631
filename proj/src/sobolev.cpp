#include "vlab/sobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>

#include "vlab/csv.hpp"
#include "vlab/error.hpp"

namespace vlab {

TimeGrid::TimeGrid(double horizon, int intervals) : horizon_(horizon), intervals_(intervals) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    throw DomainError("TimeGrid: horizon must be positive and finite");
  }
  if (intervals < 2) {
    throw DomainError("TimeGrid: need at least 2 subintervals");
  }
}

double TimeGrid::point(int i) const {
  if (i == intervals_) return horizon_;
  return horizon_ * static_cast<double>(i) / static_cast<double>(intervals_);
}

int TimeGrid::node_index(double t) const {
  const double x = t / step();
  const double r = std::round(x);
  if (r < 0.0 || r > intervals_) return -1;
  if (std::abs(x - r) > 1e-9) return -1;
  return static_cast<int>(r);
}

std::vector<double> trapezoid_weights(const TimeGrid& grid) {
  std::vector<double> w(static_cast<std::size_t>(grid.size()), grid.step());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

double trapezoid(const TimeGrid& grid, std::span<const double> samples) {
  if (samples.size() != static_cast<std::size_t>(grid.size())) {
    throw DimensionError("trapezoid: sample count does not match grid");
  }
  double acc = 0.5 * (samples.front() + samples.back());
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) acc += samples[i];
  return acc * grid.step();
}

double interpolate(const TimeGrid& grid, std::span<const double> samples, double t) {
  const double x = std::clamp(t / grid.step(), 0.0, static_cast<double>(grid.intervals()));
  const double nearest = std::round(x);
  if (std::abs(x - nearest) <= 1e-9 * std::max(1.0, x)) {
    return samples[static_cast<std::size_t>(nearest)];
  }
  int i = static_cast<int>(std::floor(x));
  if (i >= grid.intervals()) i = grid.intervals() - 1;
  const double frac = x - i;
  const auto k = static_cast<std::size_t>(i);
  if (frac == 0.0) return samples[k];
  return samples[k] + frac * (samples[k + 1] - samples[k]);
}

std::vector<double> differentiate(const TimeGrid& grid, std::span<const double> samples) {
  const std::size_t n = samples.size();
  if (n != static_cast<std::size_t>(grid.size())) {
    throw DimensionError("differentiate: sample count does not match grid");
  }
  const double h = grid.step();
  std::vector<double> d(n);
  for (std::size_t i = 1; i + 1 < n; ++i) d[i] = (samples[i + 1] - samples[i - 1]) / (2.0 * h);
  d[0] = (-3.0 * samples[0] + 4.0 * samples[1] - samples[2]) / (2.0 * h);
  d[n - 1] = (3.0 * samples[n - 1] - 4.0 * samples[n - 2] + samples[n - 3]) / (2.0 * h);
  return d;
}

SobolevPath::SobolevPath(TimeGrid grid, std::vector<double> values, std::vector<double> derivs)
    : grid_(grid), values_(std::move(values)), derivs_(std::move(derivs)) {
  const auto n = static_cast<std::size_t>(grid_.size());
  if (values_.size() != n || derivs_.size() != n) {
    throw DimensionError("SobolevPath: values and derivs must have n_s+1 entries");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(values_[i]) || !std::isfinite(derivs_[i])) {
      throw DomainError("SobolevPath: non-finite entry");
    }
  }
}

SobolevPath SobolevPath::from_function(const TimeGrid& grid, const std::function<double(double)>& f,
                                       const std::function<double(double)>& df) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  std::vector<double> d(v.size());
  for (int i = 0; i < grid.size(); ++i) {
    const double s = grid.point(i);
    v[static_cast<std::size_t>(i)] = f(s);
    d[static_cast<std::size_t>(i)] = df(s);
  }
  return SobolevPath(grid, std::move(v), std::move(d));
}

SobolevPath SobolevPath::from_samples(const TimeGrid& grid, std::vector<double> values) {
  auto d = differentiate(grid, values);
  return SobolevPath(grid, std::move(values), std::move(d));
}

SobolevPath SobolevPath::constant(const TimeGrid& grid, double c) {
  const auto n = static_cast<std::size_t>(grid.size());
  return SobolevPath(grid, std::vector<double>(n, c), std::vector<double>(n, 0.0));
}

double SobolevPath::at(double t) const { return interpolate(grid_, values_, t); }

namespace {

void require_same_grid(const SobolevPath& a, const SobolevPath& b, const char* op) {
  if (!(a.grid() == b.grid())) {
    throw DimensionError(std::string(op) + ": paths live on different grids");
  }
}

}  // namespace

SobolevPath& SobolevPath::operator+=(const SobolevPath& other) {
  require_same_grid(*this, other, "operator+=");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] += other.values_[i];
    derivs_[i] += other.derivs_[i];
  }
  return *this;
}

SobolevPath& SobolevPath::operator-=(const SobolevPath& other) {
  require_same_grid(*this, other, "operator-=");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    values_[i] -= other.values_[i];
    derivs_[i] -= other.derivs_[i];
  }
  return *this;
}

SobolevPath& SobolevPath::operator*=(double c) {
  for (auto& v : values_) v *= c;
  for (auto& d : derivs_) d *= c;
  return *this;
}

SobolevPath operator+(SobolevPath a, const SobolevPath& b) { return a += b; }
SobolevPath operator-(SobolevPath a, const SobolevPath& b) { return a -= b; }
SobolevPath operator*(double c, SobolevPath a) { return a *= c; }

double inner_product(const SobolevPath& u, const SobolevPath& v) {
  require_same_grid(u, v, "inner_product");
  const auto uv = u.values();
  const auto ud = u.derivs();
  const auto vv = v.values();
  const auto vd = v.derivs();
  const std::size_t n = uv.size();
  double acc = 0.5 * (uv[0] * vv[0] + ud[0] * vd[0] + uv[n - 1] * vv[n - 1] + ud[n - 1] * vd[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) acc += uv[i] * vv[i] + ud[i] * vd[i];
  return acc * u.grid().step();
}

double inner_product(std::span<const SobolevPath> u, std::span<const SobolevPath> v) {
  if (u.size() != v.size()) throw DimensionError("inner_product: component counts differ");
  double acc = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) acc += inner_product(u[k], v[k]);
  return acc;
}

double h_norm(const SobolevPath& u) { return std::sqrt(inner_product(u, u)); }

double sup_norm(const SobolevPath& u) {
  double m = 0.0;
  for (double x : u.values()) m = std::max(m, std::abs(x));
  return m;
}

double embedding_constant(double horizon) { return std::sqrt(horizon + 1.0 / horizon); }

EmbeddingReport embedding_check(const SobolevPath& u) {
  EmbeddingReport r;
  r.sup_norm = sup_norm(u);
  r.h_norm = h_norm(u);
  r.bound = embedding_constant(u.grid().horizon()) * r.h_norm;
  r.constant_ok = r.sup_norm <= r.bound;
  return r;
}

double green_function(double horizon, double t, double s) {
  const double denom = std::sinh(horizon);
  if (s <= t) return std::cosh(s) * std::cosh(horizon - t) / denom;
  return std::cosh(t) * std::cosh(horizon - s) / denom;
}

double green_function_ds(double horizon, double t, double s) {
  const double denom = std::sinh(horizon);
  const double left = std::sinh(s) * std::cosh(horizon - t) / denom;
  const double right = -std::cosh(t) * std::sinh(horizon - s) / denom;
  if (s < t) return left;
  if (s > t) return right;
  // Kink: a trapezoid node sitting on it sees each panel's own one-sided limit.
  if (s <= 0.0) return right;
  if (s >= horizon) return left;
  return 0.5 * (left + right);
}

double green_function_dt(double horizon, double t, double s) {
  const double denom = std::sinh(horizon);
  const double below = -std::cosh(s) * std::sinh(horizon - t) / denom;  // s < t
  const double above = std::sinh(t) * std::cosh(horizon - s) / denom;   // s > t
  if (s < t) return below;
  if (s > t) return above;
  return 0.5 * (below + above);
}

RieszRepresenter riesz_representer(double t, const TimeGrid& grid) {
  const double T = grid.horizon();
  if (!(t >= 0.0 && t <= T)) throw DomainError("riesz_representer: t outside [0,T]");
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  std::vector<double> d(v.size());
  const int node = grid.node_index(t);
  for (int i = 0; i < grid.size(); ++i) {
    const double s = (i == node) ? t : grid.point(i);
    v[static_cast<std::size_t>(i)] = green_function(T, t, s);
    d[static_cast<std::size_t>(i)] = green_function_ds(T, t, s);
  }
  return {t, SobolevPath(grid, std::move(v), std::move(d))};
}

double cosine_member(int k, double horizon, double s) {
  if (k == 0) return 1.0 / std::sqrt(horizon);
  const double w = k * std::numbers::pi / horizon;
  return std::sqrt(2.0 / horizon) * std::cos(w * s) / std::sqrt(1.0 + w * w);
}

double cosine_member_ds(int k, double horizon, double s) {
  if (k == 0) return 0.0;
  const double w = k * std::numbers::pi / horizon;
  return -std::sqrt(2.0 / horizon) * w * std::sin(w * s) / std::sqrt(1.0 + w * w);
}

BasisSet cosine_basis(int n, const TimeGrid& grid) {
  if (n < 1) throw DomainError("cosine_basis: n must be >= 1");
  BasisSet b{grid, {}};
  b.members.reserve(static_cast<std::size_t>(n));
  const double T = grid.horizon();
  for (int k = 0; k < n; ++k) {
    b.members.push_back(SobolevPath::from_function(
        grid, [k, T](double s) { return cosine_member(k, T, s); },
        [k, T](double s) { return cosine_member_ds(k, T, s); }));
  }
  return b;
}

BasisSet polynomial_basis(int n, const TimeGrid& grid) {
  if (n < 1) throw DomainError("polynomial_basis: n must be >= 1");
  const double T = grid.horizon();
  BasisSet b{grid, {}};
  for (int k = 0; k < n; ++k) {
    auto p = SobolevPath::from_function(
        grid, [k, T](double s) { return std::pow(s / T, k); },
        [k, T](double s) { return k == 0 ? 0.0 : k * std::pow(s / T, k - 1) / T; });
    for (int pass = 0; pass < 2; ++pass) {
      for (const auto& q : b.members) p -= inner_product(p, q) * q;
    }
    const double nrm = h_norm(p);
    if (!(nrm > 1e-12)) throw DomainError("polynomial_basis: degree too high for grid");
    p *= 1.0 / nrm;
    b.members.push_back(std::move(p));
  }
  return b;
}

std::vector<double> project(const SobolevPath& x, const BasisSet& basis) {
  std::vector<double> c(basis.size());
  for (std::size_t k = 0; k < basis.size(); ++k) c[k] = inner_product(x, basis.members[k]);
  return c;
}

SobolevPath reconstruct(std::span<const double> coeffs, const BasisSet& basis) {
  if (coeffs.size() > basis.size()) throw DimensionError("reconstruct: too many coefficients");
  auto out = SobolevPath::constant(basis.grid, 0.0);
  for (std::size_t k = 0; k < coeffs.size(); ++k) out += coeffs[k] * basis.members[k];
  return out;
}

void write_path_csv(std::ostream& os, const SobolevPath& x) {
  CsvWriter csv(os, {"s", "value", "deriv"});
  for (int i = 0; i < x.grid().size(); ++i) {
    csv.row(x.grid().point(i), x.value(i), x.deriv(i));
  }
  csv.finish();
}

}  // namespace vlab
