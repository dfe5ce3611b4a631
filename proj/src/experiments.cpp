#include "vlab/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>

#include <json.hpp>

#include "vlab/bsde.hpp"
#include "vlab/contract.hpp"
#include "vlab/csv.hpp"
#include "vlab/error.hpp"
#include "vlab/lq.hpp"
#include "vlab/markov.hpp"
#include "vlab/parallel.hpp"
#include "vlab/presets.hpp"
#include "vlab/rng.hpp"
#include "vlab/sobolev.hpp"

#ifndef VLAB_VERSION
#define VLAB_VERSION "unknown"
#endif

namespace vlab {

const char* version() { return VLAB_VERSION; }

namespace fs = std::filesystem;

namespace {

std::ofstream open_csv(const fs::path& dir, const std::string& name) {
  std::ofstream os(dir / name, std::ios::binary);
  if (!os) throw ConfigError("cannot write '" + (dir / name).string() + "'");
  return os;
}

int as_int(std::int64_t v, const char* key) {
  if (v > 1'000'000'000) throw ConfigError(std::string("parameter '") + key + "' is too large");
  return static_cast<int>(v);
}

std::size_t paths(const ExperimentConfig& c, const char* key = "n_paths") {
  return static_cast<std::size_t>(c.integer(key));
}

// Band-limited random path with analytic derivative.
SobolevPath random_path(const TimeGrid& g, int modes, std::uint64_t seed, std::uint64_t id) {
  const double T = g.horizon();
  std::vector<double> a(static_cast<std::size_t>(2 * modes + 1));
  for (std::size_t k = 0; k < a.size(); ++k) a[k] = standard_normal(seed, id, k);
  auto f = [&](double s) {
    double v = a[0];
    for (int m = 1; m <= modes; ++m) {
      const double w = m * std::numbers::pi / T;
      v += (a[static_cast<std::size_t>(2 * m - 1)] * std::cos(w * s) + a[static_cast<std::size_t>(2 * m)] * std::sin(w * s)) / m;
    }
    return v;
  };
  auto df = [&](double s) {
    double v = 0.0;
    for (int m = 1; m <= modes; ++m) {
      const double w = m * std::numbers::pi / T;
      v += w * (-a[static_cast<std::size_t>(2 * m - 1)] * std::sin(w * s) + a[static_cast<std::size_t>(2 * m)] * std::cos(w * s)) / m;
    }
    return v;
  };
  return SobolevPath::from_function(g, f, df);
}

void run_embed(const ExperimentConfig& c, const fs::path& out) {
  auto os = open_csv(out, "embedding.csv");
  CsvWriter csv(os, {"T", "path_id", "sup_norm", "h_norm", "bound", "constant_ok"});
  std::uint64_t family = 0;
  for (double T : c.reals("horizons")) {
    const TimeGrid g(T, as_int(c.integer("n_s"), "n_s"));
    for (std::size_t p = 0; p < paths(c); ++p) {
      const auto r = embedding_check(random_path(g, as_int(c.integer("modes"), "modes"), c.seed(), family * 1'000'000 + p));
      csv.row(T, p, r.sup_norm, r.h_norm, r.bound, r.constant_ok);
    }
    ++family;
  }
  csv.finish();
}

// Smooth test path for the reproducing property.
SobolevPath riesz_test_path(const TimeGrid& g) {
  return SobolevPath::from_function(
      g, [](double s) { return std::cos(3.0 * s) + s * s; },
      [](double s) { return -3.0 * std::sin(3.0 * s) + 2.0 * s; });
}

void run_riesz(const ExperimentConfig& c, const fs::path& out) {
  auto os = open_csv(out, "riesz.csv");
  CsvWriter csv(os, {"n_s", "h", "max_error"});
  const double T = c.real("horizon");
  for (auto n : c.integers("n_list")) {
    const TimeGrid g(T, as_int(n, "n_list"));
    const auto x = riesz_test_path(g);
    double worst = 0.0;
    for (double frac : {0.0, 0.25, 0.5, 0.75, 1.0}) {
      const double t = frac * T;
      const double exact = std::cos(3.0 * t) + t * t;
      worst = std::max(worst, std::abs(inner_product(riesz_representer(t, g).rep, x) - exact));
    }
    csv.row(n, g.step(), worst);
  }
  csv.finish();
}

void run_diagonal(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const auto coeffs = coefficient_preset(c.text("coeff_preset"), T);
  const auto ctrl = control_preset(c.text("control_preset"));
  const auto levels = c.integers("n_list");
  std::int64_t finest = 0;
  for (auto n : levels) finest = std::max(finest, 2 * n);
  auto os = open_csv(out, "diagonal.csv");
  CsvWriter csv(os, {"n_t", "h", "rms_error", "n_paths", "seed"});
  for (auto n64 : levels) {
    if (finest % (2 * n64) != 0) throw ConfigError("parameter 'n_list' entries must divide each other");
    const int n = as_int(n64, "n_list");
    const TimeGrid coarse(T, n), fine(T, 2 * n);
    LiftedOptions lo;
    lo.store_sheets = false;
    lo.substeps = static_cast<int>(finest / n);
    DirectOptions dopt;
    dopt.substeps = static_cast<int>(finest / (2 * n));
    const auto lifted = simulate_lifted(coeffs, ctrl, SobolevPath::constant(coarse, c.real("x0")), coarse,
                                        paths(c), c.seed(), lo);
    const auto direct = simulate_direct(coeffs, ctrl, c.real("x0"), fine, paths(c), c.seed(), dopt);
    std::vector<double> sq(paths(c));
    for (std::size_t p = 0; p < sq.size(); ++p) {
      const double d = lifted.x(p, n) - direct.x(p, 2 * n);
      sq[p] = d * d;
    }
    csv.row(n, coarse.step(), std::sqrt(estimate(sq).mean), paths(c), c.seed());
  }
  csv.finish();
}

void run_markov(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const TimeGrid space(T, as_int(c.integer("n_s"), "n_s"));
  ConvergenceSetup setup{separable_preset(c.text("coeff_preset"), T),
                         SobolevPath::constant(space, c.real("x0")),
                         as_int(c.integer("basis_size"), "basis_size"),
                         c.text("basis") == "cosine",
                         TimeGrid(T, as_int(c.integer("n_t"), "n_t")),
                         paths(c),
                         c.seed()};
  std::vector<int> ns;
  for (auto n : c.integers("n_list")) ns.push_back(as_int(n, "n_list"));
  const auto rows = convergence_study(ns, setup);
  auto os = open_csv(out, "markov.csv");
  CsvWriter csv(os, {"n", "err_sup", "err_sup_se", "err_xbar", "err_xbar_se", "tail_proxy", "ratio",
                     "n_paths", "seed"});
  for (const auto& r : rows) {
    csv.row(r.n, r.err_sup, r.err_sup_se, r.err_xbar, r.err_xbar_se, r.tail_proxy, r.ratio, paths(c), c.seed());
  }
  csv.finish();
}

void run_lq(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const int n = as_int(c.integer("n_grid"), "n_grid");
  const Kernel phi = kernel_preset(c.text("phi"));
  const TimeGrid grid(T, n), grid2(T, 2 * n);
  const auto field = solve_riccati(phi, grid);
  const auto field2 = solve_riccati(phi, grid2);
  const double x0 = c.real("x0");
  const std::vector<double> ones(static_cast<std::size_t>(n + 1), x0), ones2(static_cast<std::size_t>(2 * n + 1), x0);
  {
    auto os = open_csv(out, "riccati.csv");
    CsvWriter csv(os, {"t", "r", "s", "c"});
    for (int i = 0; i <= n; ++i) {
      for (int j = i; j <= n; ++j) {
        for (int k = j; k <= n; ++k) csv.row(grid.point(i), grid.point(j), grid.point(k), field.at(i, j, k));
      }
    }
    csv.finish();
  }
  auto os = open_csv(out, "lq_validation.csv");
  CsvWriter csv(os, {"policy", "mean", "std_err"});
  csv.row("riccati_value", value(field, 0, ones), 0.0);
  csv.row("riccati_value_2x", value(field2, 0, ones2), 0.0);
  const auto base = mc_rewards(phi, riccati_policy(field, phi, 1.0), x0, grid, paths(c), c.seed());
  const auto fb = estimate(base);
  csv.row("feedback", fb.mean, fb.std_err);
  const auto zero = estimate(mc_rewards(phi, ControlPath::constant(0.0), x0, grid, paths(c), c.seed()));
  csv.row("zero", zero.mean, zero.std_err);
  for (double g : c.reals("gains")) {
    const auto r = mc_rewards(phi, riccati_policy(field, phi, g), x0, grid, paths(c), c.seed());
    std::vector<double> diff(r.size());
    for (std::size_t p = 0; p < r.size(); ++p) diff[p] = r[p] - base[p];
    const auto e = estimate(r);
    const auto d = estimate(diff);
    csv.row("gain=" + format_number(g), e.mean, e.std_err);
    csv.row("gain=" + format_number(g) + "-feedback", d.mean, d.std_err);
  }
  csv.finish();
}

void run_starter(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const TimeGrid time(T, as_int(c.integer("n_t"), "n_t")), space(T, as_int(c.integer("n_s"), "n_s"));
  const auto r = starter_check(SobolevPath::constant(space, c.real("x0")), time, paths(c), c.seed());
  auto os = open_csv(out, "starter.csv");
  CsvWriter csv(os, {"n_paths", "n_t", "mc_mean", "std_err", "closed_form", "z"});
  csv.row(paths(c), c.integer("n_t"), r.mc_mean, r.std_err, r.closed_form, r.z);
  csv.finish();
  auto os2 = open_csv(out, "starter_residual.csv");
  CsvWriter csv2(os2, {"n_s", "h", "max_residual"});
  for (auto n : c.integers("residual_n")) {
    const TimeGrid g(T, as_int(n, "residual_n"));
    const auto x = SobolevPath::from_function(
        g, [](double s) { return std::cos(s); }, [](double s) { return -std::sin(s); });
    csv2.row(n, g.step(), starter_pde_residual(x));
  }
  csv2.finish();
}

void run_bsde(const ExperimentConfig& c, const fs::path& out, std::ostream& err) {
  const double T = c.real("horizon");
  const TimeGrid time(T, as_int(c.integer("n_t"), "n_t")), space(T, as_int(c.integer("n_s"), "n_s"));
  const int nc = as_int(c.integer("n_controls"), "n_controls");
  const auto prob = bsde_preset(c.text("preset"), space, c.real("sigma0"), nc);
  BsdeOptions opts;
  opts.degree = as_int(c.integer("reg_degree"), "reg_degree");
  const auto sol = solve_bsde(prob.spec, prob.dyn, prob.G, time, paths(c), c.seed(), opts);
  if (sol.rank_deficient_steps > 0) {
    err << "warning: rank-deficient regression at " << sol.rank_deficient_steps
        << " step(s); the pseudo-inverse solution was used\n";
  }
  const std::size_t ne = paths(c, "eval_paths");
  auto os = open_csv(out, "bsde_report.csv");
  CsvWriter csv(os, {"quantity", "step", "value"});
  csv.row("y0", 0, sol.y0);
  csv.row("y0_se", 0, sol.y0_se);
  csv.row("n_features", 0, static_cast<double>(sol.n_features));
  csv.row("rank_deficient_steps", 0, static_cast<double>(sol.rank_deficient_steps));
  for (std::size_t k = 0; k < prob.spec.a_grid.size(); ++k) {
    const auto f = fixed_control_value(prob.spec, prob.spec.a_grid[k], prob.dyn, prob.G, time, ne,
                                       derive_seed(c.seed(), 1));
    csv.row("a", k, prob.spec.a_grid[k]);
    csv.row("fixed_mean", k, f.mean);
    csv.row("fixed_se", k, f.std_err);
  }
  // Degenerate grid: one control value.
  auto single = prob.spec;
  const double a1 = prob.spec.a_grid[prob.spec.a_grid.size() * 3 / 4];
  single.a_grid = {a1};
  const auto s1 = solve_bsde(single, prob.dyn, prob.G, time, paths(c), c.seed(), opts);
  const auto f1 = fixed_control_value(single, a1, prob.dyn, prob.G, time, ne, derive_seed(c.seed(), 1));
  csv.row("single_a", 0, a1);
  csv.row("single_y0", 0, s1.y0);
  csv.row("single_y0_se", 0, s1.y0_se);
  csv.row("single_fixed_mean", 0, f1.mean);
  csv.row("single_fixed_se", 0, f1.std_err);
  const auto g = greedy_value(prob.spec, sol, prob.dyn, prob.G, time, ne, derive_seed(c.seed(), 2));
  csv.row("greedy_mean", 0, g.mean);
  csv.row("greedy_se", 0, g.std_err);
  for (int i = 0; i < time.intervals(); ++i) {
    csv.row("y_residual", i, sol.y_residual[static_cast<std::size_t>(i)]);
    csv.row("z_residual", i, sol.z_residual[static_cast<std::size_t>(i)]);
  }
  csv.finish();
}

DiscountSpec discount(const ExperimentConfig& c) {
  DiscountSpec s{c.reals("betas"), c.reals("rhos")};
  try {
    s.validate();
  } catch (const DomainError& e) {
    throw ConfigError(std::string("parameters 'betas'/'rhos': ") + e.what());
  }
  return s;
}

void run_contract_span(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const auto spec = discount(c);
  const auto cost = clamped_quadratic_cost(c.real("amax"));
  const double z0 = c.real("zeta");
  const auto zeta = [z0](double) { return z0; };
  const auto adm = admissible_control(spec, cost, zeta, 0.0, T);
  const TimeGrid time(T, as_int(c.integer("n_t"), "n_t"));
  auto os = open_csv(out, "contract_span.csv");
  CsvWriter csv(os, {"case", "n_s", "residual"});
  for (auto n : c.integers("n_s_list")) {
    const TimeGrid space(T, as_int(n, "n_s_list"));
    // In-span assembly from the reduced coordinates.
    const auto red = simulate_reduced(spec, adm.rule, cost, adm.y0, time, paths(c), c.seed());
    std::vector<SobolevPath> assembled;
    for (std::size_t p = 0; p < red.n_paths; ++p) {
      for (int i = 0; i < time.size(); ++i) assembled.push_back(assemble(spec, space, red.at(p, i)));
    }
    csv.row("assembled", n, span_residual(assembled, spec));
    const auto y0 = assemble(spec, space, adm.y0);
    const auto ens = simulate_lifted(reduced_lifted_coefficients(spec, cost, zeta, T, 0.0),
                                     ControlPath::constant(0.0), y0, time, paths(c), c.seed());
    csv.row("admissible_samples", n, span_residual(ens, spec, false));
    csv.row("admissible_analytic", n, span_residual(ens, spec, true));
    const auto orth = simulate_lifted(reduced_lifted_coefficients(spec, cost, zeta, T, c.real("eps")),
                                      ControlPath::constant(0.0), y0, time, paths(c), c.seed());
    csv.row("orthogonal", n, span_residual(orth, spec, false));
    csv.row("margin", n, c.real("margin"));
  }
  csv.finish();
}

void run_contract_target(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const auto spec = discount(c);
  const auto cost = clamped_quadratic_cost(c.real("amax"));
  const double z0 = c.real("zeta");
  const auto adm = admissible_control(spec, cost, [z0](double) { return z0; }, c.real("lambda0"), T);
  const auto line = target_line(spec, T);
  auto os = open_csv(out, "contract_target.csv");
  CsvWriter csv(os, {"n_t", "dt", "mean_distance", "max_distance"});
  for (auto n : c.integers("n_t_list")) {
    const TimeGrid time(T, as_int(n, "n_t_list"));
    const auto ens = simulate_reduced(spec, adm.rule, cost, adm.y0, time, paths(c), c.seed());
    const auto d = target_distance(ens, line);
    csv.row(n, time.step(), estimate(d).mean, *std::max_element(d.begin(), d.end()));
  }
  csv.finish();
}

void run_gram(const ExperimentConfig& c, const fs::path& out) {
  const double T = c.real("horizon");
  const TimeGrid g(T, as_int(c.integer("n_s"), "n_s"));
  const int m = as_int(c.integer("n_probes"), "n_probes");
  std::vector<double> ts;
  for (int k = 0; k <= m; ++k) ts.push_back(k == m ? T : T * k / m);
  auto os = open_csv(out, "gram.csv");
  CsvWriter csv(os, {"t", "det"});
  for (const auto& r : gram_impossibility(ts, g)) csv.row(r.t, r.det);
  csv.finish();
}

std::string utc_now() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

int run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, std::ostream& err) {
  try {
    validate(cfg);
    const fs::path out(out_dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out_dir + "': " + ec.message());
    const std::string started = utc_now();
    const auto t0 = std::chrono::steady_clock::now();
    const std::string& e = cfg.experiment;
    if (e == "embed") run_embed(cfg, out);
    else if (e == "riesz") run_riesz(cfg, out);
    else if (e == "diagonal") run_diagonal(cfg, out);
    else if (e == "markov") run_markov(cfg, out);
    else if (e == "lq") run_lq(cfg, out);
    else if (e == "starter") run_starter(cfg, out);
    else if (e == "bsde") run_bsde(cfg, out, err);
    else if (e == "contract-span") run_contract_span(cfg, out);
    else if (e == "contract-target") run_contract_target(cfg, out);
    else if (e == "gram") run_gram(cfg, out);
    else throw ConfigError("unknown experiment '" + e + "'");
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    nlohmann::ordered_json m;
    m["experiment"] = e;
    m["config"] = nlohmann::ordered_json::parse(to_json(cfg));
    m["seed"] = cfg.seed();
    m["version"] = version();
    m["started_at"] = started;
    m["wall_seconds"] = wall;
    std::ofstream mf(out / "manifest.json");
    mf << m.dump(2) << "\n";
    if (!mf) throw ConfigError("cannot write manifest.json");
    return exit_ok;
  } catch (const NumericalError& ex) {
    err << "numerical failure at path " << ex.path() << ", step " << ex.step() << ": " << ex.what() << "\n";
    return exit_numerical;
  } catch (const SolverError& ex) {
    err << "solver failure at step " << ex.step() << ": " << ex.what() << "\n";
    return exit_numerical;
  } catch (const std::invalid_argument& ex) {
    err << "invalid configuration: " << ex.what() << "\n";
    return exit_validation;
  }
}

}  // namespace vlab
