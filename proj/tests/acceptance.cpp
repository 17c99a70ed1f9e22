// Acceptance suite: one PASS/FAIL line per criterion.
// Usage: acceptance [N ...]   (no arguments: all ten)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "hjs/action.hpp"
#include "hjs/catalog.hpp"
#include "hjs/cli.hpp"
#include "hjs/mpass.hpp"
#include "hjs/operators.hpp"
#include "hjs/scfun.hpp"
#include "hjs/singular.hpp"

using namespace hjs;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

Vector vec(std::initializer_list<double> values) {
  Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

std::string fmt(const char* pattern, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, pattern, a);
  return buf;
}

// --- 1: quadratic kernel ------------------------------------------------------------------
Outcome quadratic_kernel() {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> box(-1.0, 1.0), time(0.05, 1.0);
  const Matrix identity = Matrix::Identity(2, 2);
  Matrix anisotropic = Matrix::Zero(2, 2);
  anisotropic.diagonal() << 2.0, 1.0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const Matrix& A = (k % 2 == 0) ? identity : anisotropic;
    const Vector x = vec({box(rng), box(rng)});
    const Vector y = vec({box(rng), box(rng)});
    const double t = time(rng);
    ActionOptions opt;
    opt.seed = static_cast<std::uint64_t>(k);
    const double numeric = minimize_action(LagrangianModel::quadratic(A), x, y, t, opt).value;
    const Vector d = y - x;
    const double exact = d.dot(A * d) / (2.0 * t);
    worst = std::max(worst, std::abs(numeric - exact) / (1e-6 * (1.0 + std::abs(exact))));
  }
  return {worst <= 1.0, fmt("worst |A - closed form| / (1e-6 (1+|A|)) = %.3g", worst)};
}

// --- 2: derivative formulas ---------------------------------------------------------------
Outcome derivative_formulas_check() {
  std::mt19937_64 rng(22);
  std::uniform_real_distribution<double> box(-1.0, 1.0), time(0.1, 1.0);
  Matrix anisotropic = Matrix::Zero(2, 2);
  anisotropic.diagonal() << 2.0, 1.0;
  const std::vector<LagrangianModel> models{
      LagrangianModel::quadratic(Matrix::Identity(2, 2)),
      LagrangianModel::quadratic(anisotropic),
      LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1)),
      LagrangianModel::mechanical(Matrix::Identity(1, 1), "-0.5*x1^2 + 0.1*x1^4", Vector::Zero(1)),
      LagrangianModel::mechanical(2.0 * Matrix::Identity(1, 1), "cos(x1)", vec({0.3})),
  };
  double worst_fd = 0.0, worst_energy = 0.0;
  int failures = 0;
  for (int k = 0; k < 50; ++k) {
    const LagrangianModel& model = models[k % models.size()];
    const int n = model.dim();
    Vector x(n), y(n);
    for (int i = 0; i < n; ++i) {
      x(i) = box(rng);
      y(i) = box(rng);
    }
    const double t = time(rng);
    ActionOptions opt;
    opt.seed = static_cast<std::uint64_t>(k);
    try {
      const ActionResult r = minimize_action(model, x, y, t, opt);
      const DerivativeCheck c = action_derivatives(model, r, opt);
      worst_fd = std::max(worst_fd, c.max_relative_error);
      worst_energy = std::max(worst_energy, r.energy_stddev / (1.0 + std::abs(r.energy)));
      if (!c.pass) ++failures;
    } catch (const Error& e) {
      ++failures;
    }
  }
  const bool pass = failures == 0 && worst_fd <= 1e-4 && worst_energy <= 1e-5;
  return {pass, "failures=" + std::to_string(failures) + fmt(", worst fd rel err=%.3g", worst_fd) +
                    fmt(", worst energy stddev/(1+|E|)=%.3g", worst_energy)};
}

// --- 3: kernel convexity ------------------------------------------------------------------
Outcome kernel_convexity() {
  double worst_q = std::numeric_limits<double>::infinity();
  double worst_ratio = 0.0;
  std::ostringstream note;
  for (const CatalogEntry& entry : catalog()) {
    const ActionKernel kernel(build_model(entry.model));
    const double t0 = determine_t0(kernel, entry.anchor, 400, 0);
    const ConvexityReport at_t0 = verify_convexity(kernel, entry.anchor, t0, 200, 1);
    const ConvexityReport below = verify_convexity(kernel, entry.anchor, 0.5 * t0, 200, 2);
    worst_q = std::min({worst_q, at_t0.min_q, below.min_q});
    // curvature in y scales like C2/t
    std::vector<double> scaled;
    for (double t : {0.1, 0.2, 0.4}) scaled.push_back(verify_convexity(kernel, entry.anchor, t, 60, 3).curvature_hat * t);
    const auto [lo, hi] = std::minmax_element(scaled.begin(), scaled.end());
    const double ratio = *lo > 0.0 ? *hi / *lo : std::numeric_limits<double>::infinity();
    worst_ratio = std::max(worst_ratio, ratio);
    note << " " << entry.name << ":t0=" << t0;
  }
  const bool pass = worst_q >= -1e-8 && worst_ratio <= 2.0;
  return {pass, fmt("min second difference=%.3g", worst_q) + fmt(", worst C2*t spread=%.3g", worst_ratio) + note.str()};
}

// --- 4: mechanical model against a space-time dynamic programme ---------------------------
// Bellman recursion on a uniform grid; the Lagrangian is evaluated at segment midpoints.
double bellman_action(double y_target, double t) {
  const double dx = 1e-4;
  const double half_width = 0.35;
  const int steps = 30;
  const double dt = t / steps;
  const int nodes = static_cast<int>(std::lround(2.0 * half_width / dx)) + 1;
  const int band = static_cast<int>(std::lround(2.5 * dt / dx));  // admissible |velocity| <= 2.5
  auto position = [&](int i) { return -half_width + i * dx; };
  auto lagrangian = [](double x, double v) { return 0.5 * v * v - 0.5 * x * x; };
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> value(nodes, inf), next(nodes);
  const int origin = static_cast<int>(std::lround(half_width / dx));
  // first step leaves exactly from the origin
  for (int i = std::max(0, origin - band); i <= std::min(nodes - 1, origin + band); ++i) {
    const double v = (position(i) - 0.0) / dt;
    value[i] = dt * lagrangian(0.5 * position(i), v);
  }
  for (int s = 1; s < steps; ++s) {
    std::fill(next.begin(), next.end(), inf);
    for (int i = 0; i < nodes; ++i) {
      const int lo = std::max(0, i - band), hi = std::min(nodes - 1, i + band);
      double best = inf;
      for (int j = lo; j <= hi; ++j) {
        if (value[j] == inf) continue;
        const double v = (position(i) - position(j)) / dt;
        best = std::min(best, value[j] + dt * lagrangian(0.5 * (position(i) + position(j)), v));
      }
      next[i] = best;
    }
    value.swap(next);
  }
  const double idx = (y_target + half_width) / dx;
  const int i0 = static_cast<int>(std::floor(idx));
  const double w = idx - i0;
  return (1.0 - w) * value[i0] + w * value[i0 + 1];
}

Outcome mechanical_bellman() {
  const auto model = LagrangianModel::mechanical(Matrix::Identity(1, 1), "0.5*x1^2", Vector::Zero(1));
  const double t = 0.3;
  double worst = 0.0, worst_closed = 0.0;
  for (double y : {-0.2, -0.1, 0.0, 0.1, 0.2}) {
    const double numeric = minimize_action(model, vec({0.0}), vec({y}), t).value;
    const double oracle = bellman_action(y, t);
    const double closed = y * y * std::cos(t) / (2.0 * std::sin(t));
    worst = std::max(worst, std::abs(numeric - oracle));
    worst_closed = std::max(worst_closed, std::abs(oracle - closed));
  }
  return {worst <= 1e-3,
          fmt("max |A - dynamic programme| = %.3g", worst) + fmt(" (programme vs closed form %.3g)", worst_closed)};
}

// --- 5: monotonicity of the sup-convolution in t ------------------------------------------
Outcome monotone_in_time() {
  const ActionKernel kernel(LagrangianModel::mechanical(Matrix::Identity(1, 1), "1", Vector::Zero(1)));
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  const std::vector<double> times{0.05, 0.1, 0.2, 0.4};
  std::mt19937_64 rng(55);
  std::uniform_real_distribution<double> box(-1.0, 1.0);
  int non_monotone = 0, gap_failures = 0;
  double worst_gap = 0.0;
  for (int k = 0; k < 20; ++k) {
    const Vector x = vec({box(rng)});
    ConvolveOptions opt;
    opt.seed = static_cast<std::uint64_t>(k);
    const P3Report r = verify_P3(u, kernel, x, times, opt);
    if (r.skipped || !r.monotone) ++non_monotone;
    worst_gap = std::max(worst_gap, r.gap);
    if (r.gap > 0.06) ++gap_failures;
  }
  return {non_monotone == 0 && gap_failures == 0,
          "non-monotone points=" + std::to_string(non_monotone) + ", points with gap > 0.06: " +
              std::to_string(gap_failures) + "/20" + fmt(", worst |T u - u| at t=0.05: %.4g", worst_gap)};
}

// --- 6: gradient limit and minimal-energy covector ----------------------------------------
Outcome gradient_limit() {
  const ActionKernel kernel(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  const auto r1 = sup_convolve(u, kernel, vec({0.0}), 0.02);
  const double g1 = r1.gradient ? r1.gradient->norm() : std::numeric_limits<double>::infinity();

  const ActionKernel kernel2(LagrangianModel::quadratic(Matrix::Identity(2, 2)));
  const Vector a = vec({1.0, 0.5}), b = vec({-0.5, 1.0});
  const auto planes = SemiconcaveFn::min_of_planes({a, b}, {0.0, 0.0});
  // projection of the origin onto the segment [a, b]
  const Vector d = a - b;
  const double lambda = std::clamp(-b.dot(d) / d.squaredNorm(), 0.0, 1.0);
  const Vector projection = b + lambda * d;
  const P4Report r2 = gradient_limit_p0(planes, kernel2, vec({0.0, 0.0}), {0.2, 0.1, 0.05, 0.02});
  const double limit_gap = (r2.limit - projection).norm();
  const double smallest_gap = (r2.gradients.back() - projection).norm();
  const double energy_gap = (r2.p0 - projection).norm();
  const bool pass = g1 <= 0.05 && limit_gap <= 1e-2 && smallest_gap <= 1e-2 && energy_gap <= 1e-2;
  return {pass, fmt("|DTu(0)| at t=0.02: %.3g", g1) + fmt(", planes limit gap %.3g", limit_gap) +
                    fmt(", t=0.02 gap %.3g", smallest_gap) + fmt(", minimal-energy gap %.3g", energy_gap)};
}

// --- 7: critical point preservation -------------------------------------------------------
Outcome critical_points() {
  const auto u = SemiconcaveFn::expression(1, "-x1^2", 2.0);
  const Box region{vec({-1.0}), vec({1.0})};
  const P5Report r = verify_P5(u, Matrix::Identity(1, 1), 2.0, 0.5, region, 4, 0, {vec({0.0})});
  // independent: sup_y -y^2 - (y-x)^2/(2t) = -x^2/(1+2t), critical point 0 with value 0
  bool found = false;
  double value_gap = std::numeric_limits<double>::infinity(), point_gap = value_gap;
  for (const auto& c : r.critical_points)
    if (std::abs(c.point(0)) <= 1e-6) {
      found = true;
      value_gap = std::abs(c.convolved_value - 0.0);
      point_gap = std::abs(c.extremizer(0));
    }
  const bool pass = r.guaranteed && r.pass && found && value_gap <= 1e-6 && point_gap <= 1e-6;
  return {pass, std::string("guaranteed=") + (r.guaranteed ? "yes" : "no") + fmt(", value gap %.3g", value_gap) +
                    fmt(", extremizer offset %.3g", point_gap) +
                    ", converse failures=" + std::to_string(r.converse_failures)};
}

// --- 8: generalized characteristic --------------------------------------------------------
Outcome characteristic() {
  const auto model = LagrangianModel::mechanical(Matrix::Identity(2, 2), "0", vec({0.0, 1.0}));
  const ActionKernel kernel(model);
  const HamiltonianView hv(model);
  const auto u = SemiconcaveFn::neg_abs(Vector::Zero(2), {0});
  const CharacteristicTrace tr = propagate_singularity(u, kernel, Vector::Zero(2), 0.2, 32);
  double max_y1 = 0.0, max_defect = 0.0;
  bool all_singular = true;
  for (std::size_t i = 0; i < tr.points.size(); ++i) {
    max_y1 = std::max(max_y1, std::abs(tr.points[i](0)));
    max_defect = std::max(max_defect, tr.defects[i]);
    all_singular = all_singular && tr.singular[i];
  }
  const double speed = (tr.points.back()(1) - tr.points.front()(1)) / (tr.times.back() - tr.times.front());
  const auto iv = initial_velocity_check(tr, hv, estimate_superdifferential(u, Vector::Zero(2)));
  const double iv_gap = (iv.estimate - vec({0.0, 1.0})).norm();
  const bool pass = max_y1 <= 1e-3 && all_singular && std::abs(speed - 1.0) <= 0.05 && max_defect <= 1e-2 &&
                    iv_gap <= 0.05 && tr.points.size() == 33;
  return {pass, fmt("max|y1|=%.3g", max_y1) + std::string(", all singular=") + (all_singular ? "yes" : "no") +
                    fmt(", speed=%.6g", speed) + fmt(", max inclusion defect=%.3g", max_defect) +
                    fmt(", initial velocity gap=%.3g", iv_gap)};
}

// --- 9: mountain pass ---------------------------------------------------------------------
Outcome mountain_pass_kink() {
  const ActionKernel kernel(LagrangianModel::quadratic(Matrix::Identity(1, 1)));
  const auto u = SemiconcaveFn::neg_abs(vec({0.0}));
  bool pass = true;
  std::ostringstream note;
  for (double t : {0.5, 1.0}) {
    const BarrierProblem problem = make_barrier_problem(u, kernel, vec({0.0}), t);
    const auto mins = global_minimizers(problem);
    if (mins.size() != 2) {
      pass = false;
      note << " t=" << t << ": " << mins.size() << " minimizers";
      continue;
    }
    std::vector<double> feet{mins[0].point(0), mins[1].point(0)};
    std::sort(feet.begin(), feet.end());
    const double feet_gap = std::max(std::abs(feet[0] + t), std::abs(feet[1] - t));
    const MountainPassResult r = mountain_pass(problem, mins, 0, 1);
    const Classification c = classify_dichotomy(r, problem);
    const double crit = r.critical_point.norm();
    const bool ok = feet_gap <= 1e-3 && std::abs(r.b) <= 1e-3 && crit <= 1e-3 && r.certificate <= 1e-3 &&
                    c.kind == "singular";
    pass = pass && ok;
    note << " t=" << t << fmt(": feet gap %.2g", feet_gap) << fmt(", b=%.2g", r.b) << fmt(", |x_t|=%.2g", crit)
         << fmt(", certificate %.2g", r.certificate) << ", " << c.kind << ";";
  }
  return {pass, note.str()};
}

// --- 10: determinism ----------------------------------------------------------------------
std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("hjs_determinism_" + std::to_string(::getpid()));
  fs::create_directories(root);
  const fs::path scenario = root / "verify.json";
  {
    std::ofstream out(scenario);
    out << R"({"task": {"verify": {"entries": "all"}}, "seed": 0})";
  }
  std::vector<std::string> reports, manifests;
  std::vector<int> codes;
  for (int run_index = 0; run_index < 2; ++run_index) {
    RunOptions opt;
    opt.task = "verify";
    opt.scenario = scenario;
    opt.seed = 0;
    opt.jobs = run_index + 1;  // different worker counts, same bytes
    opt.out = root / ("run" + std::to_string(run_index));
    const RunOutcome o = run(opt);
    codes.push_back(o.exit_code);
    reports.push_back(slurp(*opt.out / "report.json"));
    Json m = Json::parse(slurp(*opt.out / "manifest.json"));
    m.erase("started_at");
    m.erase("finished_at");
    manifests.push_back(m.dump());
  }
  fs::remove_all(root);
  const bool same = !reports[0].empty() && reports[0] == reports[1] && manifests[0] == manifests[1];
  return {same && codes[0] == 0 && codes[1] == 0,
          std::string("report bytes identical=") + (reports[0] == reports[1] ? "yes" : "no") +
              ", manifests identical=" + (manifests[0] == manifests[1] ? "yes" : "no") + ", exit codes " +
              std::to_string(codes[0]) + "/" + std::to_string(codes[1])};
}

struct Criterion {
  int id;
  const char* title;
  double budget_seconds;
  std::function<Outcome()> body;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {1, "quadratic kernel vs closed form", 10, quadratic_kernel},
      {2, "derivative formulas vs finite differences", 30, derivative_formulas_check},
      {3, "kernel convexity below t0", 60, kernel_convexity},
      {4, "mechanical kernel vs dynamic programme", 120, mechanical_bellman},
      {5, "sup-convolution monotone in t", 30, monotone_in_time},
      {6, "gradient limit equals minimal-energy covector", 30, gradient_limit},
      {7, "critical points preserved", 5, critical_points},
      {8, "generalized characteristic of the drift model", 60, characteristic},
      {9, "mountain pass on the 1D kink", 60, mountain_pass_kink},
      {10, "verify output deterministic", 405, determinism},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.id) == selected.end()) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = seconds <= c.budget_seconds;
    const bool pass = o.pass && in_time;
    if (!pass) ++failed;
    std::printf("[%s] %2d %s: %s; %.2fs (budget %.0fs)%s\n", pass ? "PASS" : "FAIL", c.id, c.title, o.detail.c_str(),
                seconds, c.budget_seconds, in_time ? "" : " OVER BUDGET");
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
