// Acceptance suite: one PASS/FAIL line per criterion. Runs the experiments
// exactly as the CLI does (default configurations) and checks their CSVs.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cstdio>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "support.hpp"
#include "vlab/config.hpp"
#include "vlab/experiments.hpp"
#include "vlab/parallel.hpp"
#include "vlab/sobolev.hpp"

using namespace vlab;
namespace fs = std::filesystem;

namespace {

fs::path root;
int failures = 0;

void report(int id, bool ok, const std::string& what) {
  std::printf("%s criterion %d: %s\n", ok ? "PASS" : "FAIL", id, what.c_str());
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(double x) {
  std::ostringstream ss;
  ss.precision(4);
  ss << x;
  return ss.str();
}

// Runs an experiment; returns wall seconds, or -1 on a nonzero exit code.
double run(const ExperimentConfig& cfg, const fs::path& out) {
  const auto t0 = std::chrono::steady_clock::now();
  const int rc = run_experiment(cfg, out.string(), std::cerr);
  if (rc != 0) return -1.0;
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

ExperimentConfig with(const std::string& exp, const std::vector<std::pair<std::string, std::string>>& kv) {
  auto c = default_config(exp);
  for (const auto& [k, v] : kv) override_value(c, k, v);
  return c;
}

void guard(int id, const std::function<void()>& body) {
  try {
    body();
  } catch (const std::exception& e) {
    report(id, false, std::string("exception: ") + e.what());
  }
}

void embedding() {
  const auto out = root / "embed";
  const double wall = run(default_config("embed"), out);
  const auto t = vtest::read_csv(out / "embedding.csv");
  std::size_t bad = 0;
  for (const auto& r : t.rows) bad += r[t.col("constant_ok")] != "true";
  report(1, wall >= 0 && bad == 0 && t.rows.size() == 3000 && wall < 5.0,
         std::to_string(bad) + " violations in " + std::to_string(t.rows.size()) + " paths, " + fmt(wall) + " s");
}

void reproducing() {
  const auto t0 = std::chrono::steady_clock::now();
  const auto out = root / "riesz";
  const double wall = run(default_config("riesz"), out);
  const auto t = vtest::read_csv(out / "riesz.csv");
  const double slope = vtest::loglog_slope(t.column("h"), t.column("max_error"));
  // brute-force representer: (W + h D'D) r = e_j with forward differences
  const TimeGrid g(1.0, 1024);
  const int n = g.intervals();
  const double h = g.step();
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n + 1, n + 1);
  for (int i = 0; i <= n; ++i) M(i, i) += (i == 0 || i == n) ? h / 2 : h;
  for (int i = 0; i < n; ++i) {
    M(i, i) += 1 / h;
    M(i + 1, i + 1) += 1 / h;
    M(i, i + 1) -= 1 / h;
    M(i + 1, i) -= 1 / h;
  }
  const Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  double worst = 0.0;
  for (int j : {0, 128, 256, 512, 768, 1024}) {
    Eigen::VectorXd e = Eigen::VectorXd::Zero(n + 1);
    e(j) = 1.0;
    const Eigen::VectorXd r = ldlt.solve(e);
    const auto rep = riesz_representer(g.point(j), g).rep;
    for (int i = 0; i <= n; ++i) worst = std::max(worst, std::abs(r(i) - rep.value(i)));
  }
  const double total = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  report(2, wall >= 0 && std::abs(slope - 2.0) <= 0.2 && worst <= 1e-4 && total < 30.0,
         "slope " + fmt(slope) + ", dense-solve sup diff " + fmt(worst) + ", " + fmt(total) + " s");
}

void diagonal_equivalence() {
  const auto out = root / "diagonal";
  const double wall = run(default_config("diagonal"), out);
  const auto t = vtest::read_csv(out / "diagonal.csv");
  const double slope = vtest::loglog_slope(t.column("h"), t.column("rms_error"));
  const bool paths = t.num(0, "n_paths") == 10000;
  report(3, wall >= 0 && t.rows.size() == 4 && paths && std::abs(slope - 0.5) <= 0.2 && wall < 120.0,
         "slope " + fmt(slope) + " over " + std::to_string(t.rows.size()) + " levels, " + fmt(wall) + " s");
}

void starter() {
  const auto out = root / "starter";
  const double wall = run(default_config("starter"), out);
  const auto t = vtest::read_csv(out / "starter.csv");
  const auto r = vtest::read_csv(out / "starter_residual.csv");
  const double z = t.num(0, "z");
  const double slope = vtest::loglog_slope(r.column("h"), r.column("max_residual"));
  report(4, wall >= 0 && std::abs(z) <= 3.0 && slope >= 1.8 && wall < 60.0,
         "MC " + fmt(t.num(0, "mc_mean")) + " vs " + fmt(t.num(0, "closed_form")) + " (z = " + fmt(z) +
             "), residual slope " + fmt(slope) + ", " + fmt(wall) + " s");
}

void markov() {
  double total = 0.0;
  bool monotone = true, ok_run = true;
  std::vector<double> consts;
  for (int seed : {11, 12, 13}) {
    const auto out = root / ("markov" + std::to_string(seed));
    const double wall = run(with("markov", {{"seed", std::to_string(seed)}}), out);
    ok_run = ok_run && wall >= 0;
    total += wall;
    const auto t = vtest::read_csv(out / "markov.csv");
    const auto err = t.column("err_sup"), se = t.column("err_sup_se"), ratio = t.column("ratio");
    for (std::size_t i = 1; i < err.size(); ++i) monotone = monotone && err[i] <= err[i - 1] + 2.0 * (se[i] + se[i - 1]);
    consts.push_back(*std::max_element(ratio.begin(), ratio.end()));
  }
  const double mean = (consts[0] + consts[1] + consts[2]) / 3.0;
  bool stable = true;
  for (double c : consts) stable = stable && std::abs(c - mean) <= 0.5 * mean;
  report(5, ok_run && monotone && stable && total < 180.0,
         std::string("err ") + (monotone ? "nonincreasing" : "NOT monotone") + ", Gronwall constants " + fmt(consts[0]) +
             " / " + fmt(consts[1]) + " / " + fmt(consts[2]) + ", " + fmt(total) + " s");
}

void lq() {
  const auto out = root / "lq";
  const double wall = run(default_config("lq"), out);
  const auto t = vtest::read_csv(out / "lq_validation.csv");
  const double v = t.num(t.find("policy", "riccati_value"), "mean");
  const double v2 = t.num(t.find("policy", "riccati_value_2x"), "mean");
  const auto fb = t.find("policy", "feedback");
  const double mc = t.num(fb, "mean"), se = t.num(fb, "std_err");
  const bool match = std::abs(v - mc) <= std::max(0.01 * std::abs(v), 3.0 * se);
  int beaten = 0, probes = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const auto& name = t.rows[r][t.col("policy")];
    if (name.rfind("gain=", 0) == 0 && name.size() > 9 && name.substr(name.size() - 9) == "-feedback") {
      ++probes;
      beaten += t.num(r, "mean") > 2.0 * t.num(r, "std_err");
    }
  }
  const double drift = std::abs(v2 - v) / std::abs(v);
  report(6, wall >= 0 && match && probes == 9 && beaten == 0 && drift <= 0.01 && wall < 300.0,
         "value " + fmt(v) + " vs MC " + fmt(mc) + " +- " + fmt(se) + ", " + std::to_string(beaten) + "/" +
             std::to_string(probes) + " perturbations beat feedback, grid doubling " + fmt(100 * drift) + "%, " +
             fmt(wall) + " s");
}

void bsde() {
  const auto out = root / "bsde";
  const double wall = run(default_config("bsde"), out);
  const auto t = vtest::read_csv(out / "bsde_report.csv");
  auto get = [&](const std::string& q, int step = 0) {
    for (std::size_t r = 0; r < t.rows.size(); ++r) {
      if (t.rows[r][0] == q && std::stoi(t.rows[r][1]) == step) return t.num(r, "value");
    }
    throw std::runtime_error("missing " + q);
  };
  const double y0 = get("y0"), y0se = get("y0_se");
  int dominated = 0, grid = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    if (t.rows[r][0] != "fixed_mean") continue;
    const int k = std::stoi(t.rows[r][1]);
    ++grid;
    dominated += y0 >= get("fixed_mean", k) - 3.0 * get("fixed_se", k);
  }
  const double sgap = std::abs(get("single_y0") - get("single_fixed_mean"));
  const double sband = 3.0 * std::hypot(get("single_y0_se"), get("single_fixed_se"));
  const double ggap = std::abs(get("greedy_mean") - y0);
  const double gband = 3.0 * std::hypot(get("greedy_se"), y0se) + 0.02 * std::abs(y0);
  report(7, wall >= 0 && grid == 11 && dominated == 11 && sgap <= sband && ggap <= gband && wall < 300.0,
         "y0 " + fmt(y0) + " dominates " + std::to_string(dominated) + "/" + std::to_string(grid) +
             " fixed controls, single-point gap " + fmt(sgap) + " (band " + fmt(sband) + "), greedy gap " + fmt(ggap) +
             " (band " + fmt(gband) + "), " + fmt(wall) + " s");
}

void contract() {
  const auto so = root / "span", to = root / "target";
  const double w1 = run(default_config("contract-span"), so);
  const double w2 = run(default_config("contract-target"), to);
  const auto s = vtest::read_csv(so / "contract_span.csv");
  double in_span = 0.0, orth = 1e300, margin = 0.0;
  for (std::size_t r = 0; r < s.rows.size(); ++r) {
    const auto& c = s.rows[r][0];
    const double v = s.num(r, "residual");
    if (c == "assembled" || c == "admissible_samples") in_span = std::max(in_span, v);
    if (c == "orthogonal") orth = std::min(orth, v);
    if (c == "margin") margin = v;
  }
  const auto t = vtest::read_csv(to / "contract_target.csv");
  const double slope = vtest::loglog_slope(t.column("dt"), t.column("mean_distance"));
  report(8, w1 >= 0 && w2 >= 0 && in_span <= 1e-10 && orth > margin && std::abs(slope - 1.0) <= 0.2 && t.rows.size() == 3 &&
                w1 + w2 < 120.0,
         "in-span residual " + fmt(in_span) + ", orthogonal " + fmt(orth) + " > margin " + fmt(margin) +
             ", target distance slope " + fmt(slope) + ", " + fmt(w1 + w2) + " s");
}

void gram() {
  const auto out = root / "gram";
  const double wall = run(default_config("gram"), out);
  const auto t = vtest::read_csv(out / "gram.csv");
  bool zero = false;
  int positive = 0, probes = 0;
  for (std::size_t r = 0; r < t.rows.size(); ++r) {
    const double tt = t.num(r, "t"), d = t.num(r, "det");
    if (tt == 0.0) {
      zero = std::abs(d) <= 1e-12;
    } else {
      ++probes;
      positive += d > 0.0;
    }
  }
  report(9, wall >= 0 && zero && probes == 20 && positive == 20 && wall < 5.0,
         "det(0) zero: " + std::string(zero ? "yes" : "no") + ", " + std::to_string(positive) + "/" + std::to_string(probes) +
             " probes positive, " + fmt(wall) + " s");
}

std::map<std::string, std::string> csv_bytes(const fs::path& dir) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.path().extension() == ".csv") out[e.path().filename().string()] = vtest::slurp(e.path());
  }
  return out;
}

void determinism() {
  const std::vector<ExperimentConfig> small = {
      with("embed", {{"n_paths", "50"}}),
      with("riesz", {{"n_list", "[64, 128]"}}),
      with("diagonal", {{"n_list", "[8, 16]"}, {"n_paths", "300"}}),
      with("markov", {{"n_list", "[1, 2, 4]"}, {"n_paths", "200"}}),
      with("lq", {{"n_grid", "20"}, {"n_paths", "2000"}}),
      with("starter", {{"n_t", "64"}, {"n_paths", "5000"}}),
      with("bsde", {{"n_t", "10"}, {"n_s", "16"}, {"n_paths", "1000"}, {"eval_paths", "1000"}}),
      with("contract-span", {{"n_s_list", "[16, 32]"}, {"n_t", "16"}, {"n_paths", "10"}}),
      with("contract-target", {{"n_t_list", "[10, 20]"}, {"n_paths", "100"}}),
      with("gram", {{"n_s", "128"}}),
  };
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int max_workers = std::max(3, hw);
  const int saved = worker_count();
  int mismatches = 0, files = 0;
  std::string first_bad;
  for (const auto& cfg : small) {
    std::map<std::string, std::string> ref;
    for (int w = 1; w <= max_workers; ++w) {
      set_worker_count(w);
      for (int rep = 0; rep < (w == 1 ? 2 : 1); ++rep) {
        const auto out = root / "det" / (cfg.experiment + "-" + std::to_string(w) + "-" + std::to_string(rep));
        if (run(cfg, out) < 0) {
          ++mismatches;
          first_bad = cfg.experiment + " failed to run";
          continue;
        }
        const auto bytes = csv_bytes(out);
        if (ref.empty()) {
          ref = bytes;
          files += static_cast<int>(bytes.size());
        } else if (bytes != ref) {
          ++mismatches;
          if (first_bad.empty()) first_bad = cfg.experiment + " at " + std::to_string(w) + " workers";
        }
      }
    }
  }
  set_worker_count(saved);
  report(10, mismatches == 0,
         std::to_string(files) + " CSVs from 10 experiments byte-identical across reruns and 1.." +
             std::to_string(max_workers) + " workers" + (first_bad.empty() ? "" : " (first mismatch: " + first_bad + ")"));
}

}  // namespace

int main() {
  root = vtest::temp_dir("acceptance");
  apply_thread_env();
  guard(1, embedding);
  guard(2, reproducing);
  guard(3, diagonal_equivalence);
  guard(4, starter);
  guard(5, markov);
  guard(6, lq);
  guard(7, bsde);
  guard(8, contract);
  guard(9, gram);
  guard(10, determinism);
  fs::remove_all(root);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
