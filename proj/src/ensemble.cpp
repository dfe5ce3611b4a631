#include <cmath>
#include <cstdlib>
#include <ostream>
#include <string>

#include "vlab/csv.hpp"
#include "vlab/error.hpp"
#include "vlab/parallel.hpp"
#include "vlab/volterra.hpp"

namespace vlab {

int worker_count() { return omp_get_max_threads(); }

void set_worker_count(int n) {
  if (n < 1) throw ConfigError("worker count must be >= 1");
  omp_set_num_threads(n);
}

int apply_thread_env() {
  if (const char* env = std::getenv("VLAB_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) throw ConfigError("VLAB_THREADS must be a positive integer");
    set_worker_count(static_cast<int>(n));
  }
  return worker_count();
}

double pairwise_sum(std::span<const double> x) {
  if (x.size() <= 16) {
    double acc = 0.0;
    for (double v : x) acc += v;
    return acc;
  }
  const std::size_t half = x.size() / 2;
  return pairwise_sum(x.first(half)) + pairwise_sum(x.subspan(half));
}

McEstimate estimate(std::span<const double> samples) {
  McEstimate e;
  e.n = samples.size();
  if (e.n == 0) return e;
  e.mean = pairwise_sum(samples) / static_cast<double>(e.n);
  if (e.n > 1) {
    std::vector<double> sq(e.n);
    for (std::size_t i = 0; i < e.n; ++i) sq[i] = (samples[i] - e.mean) * (samples[i] - e.mean);
    const double var = pairwise_sum(sq) / static_cast<double>(e.n - 1);
    e.std_err = std::sqrt(var / static_cast<double>(e.n));
  }
  return e;
}

PathEnsemble::PathEnsemble(Layout layout, TimeGrid time, std::optional<TimeGrid> space,
                           std::size_t n_paths, std::uint64_t seed, std::vector<double> data)
    : layout_(layout),
      time_(time),
      space_(space),
      n_paths_(n_paths),
      seed_(seed),
      data_(std::move(data)) {}

PathEnsemble PathEnsemble::make_diagonal(TimeGrid time, std::size_t n_paths, std::uint64_t seed,
                                         std::vector<double> data) {
  if (data.size() != n_paths * static_cast<std::size_t>(time.size())) {
    throw DimensionError("PathEnsemble: diagonal data has the wrong size");
  }
  return PathEnsemble(Layout::diagonal, time, std::nullopt, n_paths, seed, std::move(data));
}

PathEnsemble PathEnsemble::make_lifted(TimeGrid time, TimeGrid space, std::size_t n_paths,
                                       std::uint64_t seed, std::vector<double> data) {
  if (data.size() != n_paths * static_cast<std::size_t>(time.size()) *
                         static_cast<std::size_t>(space.size())) {
    throw DimensionError("PathEnsemble: lifted data has the wrong size");
  }
  return PathEnsemble(Layout::lifted, time, space, n_paths, seed, std::move(data));
}

const TimeGrid& PathEnsemble::space_grid() const {
  if (!space_) throw DimensionError("PathEnsemble: diagonal ensemble has no s-grid");
  return *space_;
}

std::span<const double> PathEnsemble::path(std::size_t p) const {
  if (layout_ != Layout::diagonal) throw DimensionError("PathEnsemble: not a diagonal ensemble");
  const auto nt = static_cast<std::size_t>(time_.size());
  return std::span<const double>(data_).subspan(p * nt, nt);
}

std::span<const double> PathEnsemble::slice(std::size_t p, int i) const {
  if (layout_ != Layout::lifted) throw DimensionError("PathEnsemble: not a lifted ensemble");
  const auto nt = static_cast<std::size_t>(time_.size());
  const auto ns = static_cast<std::size_t>(space_->size());
  return std::span<const double>(data_).subspan((p * nt + static_cast<std::size_t>(i)) * ns, ns);
}

std::vector<double> PathEnsemble::at_time(int i) const {
  std::vector<double> col(n_paths_);
  for (std::size_t p = 0; p < n_paths_; ++p) col[p] = x(p, i);
  return col;
}

PathEnsemble diagonal(const PathEnsemble& lifted) {
  if (lifted.layout() != PathEnsemble::Layout::lifted) {
    throw DimensionError("diagonal: expects a lifted ensemble");
  }
  const TimeGrid& time = lifted.time_grid();
  const TimeGrid& space = lifted.space_grid();
  const auto nt = static_cast<std::size_t>(time.size());
  std::vector<double> out(lifted.n_paths() * nt);
  for (std::size_t p = 0; p < lifted.n_paths(); ++p) {
    for (int i = 0; i < time.size(); ++i) {
      out[p * nt + static_cast<std::size_t>(i)] = interpolate(space, lifted.slice(p, i), time.point(i));
    }
  }
  return PathEnsemble::make_diagonal(time, lifted.n_paths(), lifted.seed(), std::move(out));
}

void write_ensemble_csv(std::ostream& os, const PathEnsemble& ens) {
  const TimeGrid& time = ens.time_grid();
  if (ens.layout() == PathEnsemble::Layout::diagonal) {
    CsvWriter csv(os, {"path_id", "t", "x"});
    for (std::size_t p = 0; p < ens.n_paths(); ++p) {
      for (int i = 0; i < time.size(); ++i) csv.row(p, time.point(i), ens.x(p, i));
    }
    csv.finish();
    return;
  }
  const TimeGrid& space = ens.space_grid();
  CsvWriter csv(os, {"path_id", "t", "s", "x"});
  for (std::size_t p = 0; p < ens.n_paths(); ++p) {
    for (int i = 0; i < time.size(); ++i) {
      const auto row = ens.slice(p, i);
      for (int j = 0; j < space.size(); ++j) {
        csv.row(p, time.point(i), space.point(j), row[static_cast<std::size_t>(j)]);
      }
    }
  }
  csv.finish();
}

}  // namespace vlab
