#include "hjs/model.hpp"

#include <algorithm>
#include <cmath>

#include "hjs/sampling.hpp"

namespace hjs {

namespace {

Matrix checked_spd(Matrix A, int dim, const char* what) {
  if (A.rows() != dim || A.cols() != dim) {
    throw ValidationError(std::string(what) + ": matrix must be " + std::to_string(dim) + "x" + std::to_string(dim));
  }
  A = 0.5 * (A + A.transpose());
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  if (es.eigenvalues().minCoeff() <= 0.0) {
    throw ValidationError(std::string(what) + ": matrix must be positive definite");
  }
  return A;
}

void check_dim(int dim) {
  if (dim < 1 || dim > 3) throw ValidationError("model dimension must be 1, 2 or 3");
}

double smallest_eigenvalue(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  return es.eigenvalues().minCoeff();
}

double largest_eigenvalue(const Matrix& A) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(A);
  return es.eigenvalues().maxCoeff();
}

std::vector<double> to_args(const Vector& a) { return {a.data(), a.data() + a.size()}; }

std::vector<double> to_args(const Vector& a, const Vector& b) {
  std::vector<double> args(a.data(), a.data() + a.size());
  args.insert(args.end(), b.data(), b.data() + b.size());
  return args;
}

}  // namespace

LagrangianModel::LagrangianModel(int dim, Form form) : dim_(dim), form_(std::move(form)) {}

LagrangianModel LagrangianModel::quadratic(Matrix A) {
  const int dim = static_cast<int>(A.rows());
  check_dim(dim);
  LagrangianModel m(dim, QuadraticKinetic{checked_spd(std::move(A), dim, "quadratic kinetic matrix")});
  m.position_independent_ = true;
  return m;
}

LagrangianModel LagrangianModel::mechanical(Matrix A, const std::string& potential, Vector drift) {
  const int dim = static_cast<int>(A.rows());
  check_dim(dim);
  if (drift.size() == 0) drift = Vector::Zero(dim);
  require_dim(drift, dim, "mechanical drift");
  Mechanical mech{checked_spd(std::move(A), dim, "mechanical kinetic matrix"),
                  Expression::parse(potential, position_variable_names(dim)), std::move(drift)};
  bool uses_x = false;
  for (int i = 0; i < dim; ++i) uses_x = uses_x || mech.potential.uses(i);
  LagrangianModel m(dim, std::move(mech));
  m.position_independent_ = !uses_x;
  return m;
}

LagrangianModel LagrangianModel::custom(int dim, const std::string& lagrangian) {
  check_dim(dim);
  Custom c{Expression::parse(lagrangian, state_variable_names(dim))};
  bool uses_x = false;
  for (int i = 0; i < dim; ++i) uses_x = uses_x || c.lagrangian.uses(i);
  LagrangianModel m(dim, std::move(c));
  m.position_independent_ = !uses_x;
  return m;
}

std::string LagrangianModel::form_name() const {
  if (std::holds_alternative<QuadraticKinetic>(form_)) return "quadratic";
  if (std::holds_alternative<Mechanical>(form_)) return "mechanical";
  return "custom";
}

double LagrangianModel::eval(const Vector& x, const Vector& v) const {
  require_dim(x, dim_, "lagrangian position");
  require_dim(v, dim_, "lagrangian velocity");
  if (const auto* q = std::get_if<QuadraticKinetic>(&form_)) return 0.5 * v.dot(q->A * v);
  if (const auto* m = std::get_if<Mechanical>(&form_)) {
    const Vector w = v - m->drift;
    const auto args = to_args(x);
    return 0.5 * w.dot(m->A * w) - m->potential.eval(args);
  }
  const auto& c = std::get<Custom>(form_);
  const auto args = to_args(x, v);
  return c.lagrangian.eval(args);
}

Vector LagrangianModel::L_v(const Vector& x, const Vector& v) const {
  require_dim(x, dim_, "lagrangian position");
  require_dim(v, dim_, "lagrangian velocity");
  if (const auto* q = std::get_if<QuadraticKinetic>(&form_)) return q->A * v;
  if (const auto* m = std::get_if<Mechanical>(&form_)) return m->A * (v - m->drift);
  return jet(x, v).Lv;
}

LagrangianJet LagrangianModel::potential_jet(const Vector& x) const {
  const auto* m = std::get_if<Mechanical>(&form_);
  LagrangianJet j;
  j.Lx = Vector::Zero(dim_);
  j.Lxx = Matrix::Zero(dim_, dim_);
  if (!m) return j;
  const auto args = to_args(x);
  const Jet pj = m->potential.eval_jet(args);
  j.value = pj.val;
  for (int i = 0; i < dim_; ++i) {
    j.Lx(i) = pj.grad[i];
    for (int k = 0; k < dim_; ++k) j.Lxx(i, k) = pj.h(i, k);
  }
  return j;
}

LagrangianJet LagrangianModel::jet(const Vector& x, const Vector& v) const {
  require_dim(x, dim_, "lagrangian position");
  require_dim(v, dim_, "lagrangian velocity");
  const int n = dim_;
  LagrangianJet j;
  j.Lxv = Matrix::Zero(n, n);
  if (const auto* q = std::get_if<QuadraticKinetic>(&form_)) {
    j.Lv = q->A * v;
    j.value = 0.5 * v.dot(j.Lv);
    j.Lx = Vector::Zero(n);
    j.Lxx = Matrix::Zero(n, n);
    j.Lvv = q->A;
    return j;
  }
  if (const auto* m = std::get_if<Mechanical>(&form_)) {
    const Vector w = v - m->drift;
    const LagrangianJet pot = potential_jet(x);
    j.Lv = m->A * w;
    j.value = 0.5 * w.dot(j.Lv) - pot.value;
    j.Lx = -pot.Lx;
    j.Lxx = -pot.Lxx;
    j.Lvv = m->A;
    return j;
  }
  const auto& c = std::get<Custom>(form_);
  const auto args = to_args(x, v);
  const Jet lj = c.lagrangian.eval_jet(args);
  j.value = lj.val;
  j.Lx.resize(n);
  j.Lv.resize(n);
  j.Lxx.resize(n, n);
  j.Lvv.resize(n, n);
  for (int i = 0; i < n; ++i) {
    j.Lx(i) = lj.grad[i];
    j.Lv(i) = lj.grad[n + i];
    for (int k = 0; k < n; ++k) {
      j.Lxx(i, k) = lj.h(i, k);
      j.Lxv(i, k) = lj.h(i, n + k);
      j.Lvv(i, k) = lj.h(n + i, n + k);
    }
  }
  return j;
}

std::optional<Matrix> LagrangianModel::kinetic_matrix() const {
  if (const auto* q = std::get_if<QuadraticKinetic>(&form_)) return q->A;
  if (const auto* m = std::get_if<Mechanical>(&form_)) return m->A;
  return std::nullopt;
}

Vector LagrangianModel::drift() const {
  if (const auto* m = std::get_if<Mechanical>(&form_)) return m->drift;
  return Vector::Zero(dim_);
}

std::optional<double> LagrangianModel::theta(double r) const {
  if (witness_.theta) {
    const double args[] = {r};
    return witness_.theta->eval(args);
  }
  if (const auto A = kinetic_matrix()) {
    const double kappa = smallest_eigenvalue(*A);
    if (std::holds_alternative<QuadraticKinetic>(form_)) return 0.25 * kappa * r * r + 1.0;
    return 0.125 * kappa * r * r + 1.0;
  }
  return std::nullopt;
}

std::optional<double> LagrangianModel::c0(const Vector& x, double R) const {
  if (witness_.c0) return *witness_.c0;
  if (std::holds_alternative<QuadraticKinetic>(form_)) return 1.0;
  if (const auto* m = std::get_if<Mechanical>(&form_)) {
    double vmax = -std::numeric_limits<double>::infinity();
    for (const Vector& z : dyadic_ball_points(x, R)) {
      const auto args = to_args(z);
      vmax = std::max(vmax, m->potential.eval(args));
    }
    const double kappa = smallest_eigenvalue(m->A);
    return 1.0 + 0.5 * kappa * m->drift.squaredNorm() + vmax + 0.1 * std::abs(vmax);
  }
  return std::nullopt;
}

std::optional<double> LagrangianModel::c1(const Vector& x, double R) const {
  if (witness_.c1) {
    std::vector<double> args(x.data(), x.data() + x.size());
    args.push_back(R);
    return witness_.c1->eval(args);
  }
  if (const auto* q = std::get_if<QuadraticKinetic>(&form_)) {
    return largest_eigenvalue(q->A) / std::sqrt(smallest_eigenvalue(q->A));
  }
  if (const auto* m = std::get_if<Mechanical>(&form_)) {
    double gmax = 0.0;
    for (const Vector& z : dyadic_ball_points(x, R)) gmax = std::max(gmax, potential_jet(z).Lx.norm());
    const double kappa = smallest_eigenvalue(m->A);
    const double anorm = largest_eigenvalue(m->A);
    return anorm * (std::sqrt(2.0 / kappa) + m->drift.norm()) + 1.1 * gmax;
  }
  return std::nullopt;
}

HamiltonianView::HamiltonianView(LagrangianModel model, double tol, int max_iter)
    : model_(std::move(model)), tol_(tol), max_iter_(max_iter) {}

LegendreResult HamiltonianView::legendre(const Vector& x, const Vector& p) const {
  return hjs::legendre(model_, x, p, tol_, max_iter_);
}

Vector HamiltonianView::H_x(const Vector& x, const Vector& p) const {
  const LegendreResult lr = legendre(x, p);
  return -model_.jet(x, lr.v_star).Lx;
}

Matrix HamiltonianView::H_pp(const Vector& x, const Vector& p) const {
  if (const auto A = model_.kinetic_matrix()) return A->inverse();
  const LegendreResult lr = legendre(x, p);
  return model_.jet(x, lr.v_star).Lvv.inverse();
}

LegendreResult legendre(const LagrangianModel& model, const Vector& x, const Vector& p, double tol,
                        int max_iter) {
  require_dim(x, model.dim(), "legendre position");
  require_dim(p, model.dim(), "legendre covector");
  if (const auto A = model.kinetic_matrix()) {
    const Vector b = model.drift();
    Vector v = b + A->ldlt().solve(p);
    return {p.dot(v) - model.eval(x, v), std::move(v)};
  }
  // Minimize F(v) = L(x,v) − ⟨p,v⟩, strictly convex when L_vv > 0.
  const int n = model.dim();
  Vector v = p;
  auto F = [&](const Vector& w) { return model.eval(x, w) - p.dot(w); };
  double f = F(v);
  for (int it = 0; it < max_iter; ++it) {
    const LagrangianJet j = model.jet(x, v);
    const Vector g = j.Lv - p;
    if (g.norm() <= tol * (1.0 + p.norm())) return {p.dot(v) - j.value, v};
    Matrix Hs = j.Lvv;
    Eigen::LDLT<Matrix> ldlt(Hs);
    double shift = 0.0;
    while (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
           ldlt.vectorD().minCoeff() <= 1e-14 * (1.0 + Hs.norm())) {
      shift = shift == 0.0 ? 1e-8 * (1.0 + Hs.norm()) : 10.0 * shift;
      ldlt.compute(Hs + shift * Matrix::Identity(n, n));
      if (shift > 1e12) break;
    }
    const Vector step = -ldlt.solve(g);
    double alpha = 1.0;
    Vector trial = v + step;
    double ft = F(trial);
    while (!(ft <= f + 1e-4 * alpha * g.dot(step)) && alpha > 1e-12) {
      alpha *= 0.5;
      trial = v + alpha * step;
      ft = F(trial);
    }
    if (alpha <= 1e-12) {
      // No descent progress: accept if the residual is already at roundoff level.
      if (g.norm() <= 1e-9 * (1.0 + p.norm())) return {p.dot(v) - j.value, v};
      throw NumericalError("legendre: Newton line search stalled (is L strictly convex in v?)");
    }
    v = trial;
    f = ft;
  }
  const LagrangianJet j = model.jet(x, v);
  if ((j.Lv - p).norm() <= 1e-8 * (1.0 + p.norm())) return {p.dot(v) - j.value, v};
  throw NumericalError("legendre: Newton did not converge");
}

TonelliReport check_tonelli(const LagrangianModel& model, const Box& region, int nsamples, std::uint64_t seed,
                            double max_speed) {
  if (region.dim() != model.dim()) throw ValidationError("check_tonelli: region dimension mismatch");
  if ((region.upper.array() < region.lower.array()).any()) throw ValidationError("check_tonelli: empty region");
  TonelliReport rep;
  rep.samples = nsamples;
  rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
  rep.worst_growth_gap = -std::numeric_limits<double>::infinity();
  rep.worst_derivative_gap = -std::numeric_limits<double>::infinity();

  auto record = [&](const std::string& cond, const Vector& x, const Vector& v, double amount) {
    rep.pass = false;
    ++rep.violation_count;
    if (rep.violations.size() < 20) rep.violations.push_back({cond, x, v, amount});
  };

  const Vector center = region.center();
  const double half_diag = 0.5 * (region.upper - region.lower).norm();
  const int n = model.dim();

  // θ nondecreasing on a uniform radius grid.
  if (model.theta(0.0)) {
    double prev = *model.theta(0.0);
    for (int k = 1; k <= 200; ++k) {
      const double r = max_speed * k / 200.0;
      const double th = *model.theta(r);
      if (th < prev - 1e-12 * (1.0 + std::abs(prev))) {
        record("theta-monotone", center, Vector::Constant(n, r), prev - th);
      }
      prev = th;
    }
  }

  const auto c0 = model.c0(center, half_diag);
  rep.growth_checked = c0.has_value() && model.theta(0.0).has_value();
  const auto c1 = model.has_declared_c1() ? model.c1(center, half_diag) : std::nullopt;
  rep.derivative_checked = c1.has_value() && model.theta(0.0).has_value();

  Rng rng(seed);
  for (int s = 0; s < nsamples; ++s) {
    const Vector x = random_in_box(region, rng);
    const Vector v = random_in_ball(Vector::Zero(n), max_speed, rng);
    const LagrangianJet j = model.jet(x, v);
    const double lam = smallest_eigenvalue(j.Lvv);
    rep.min_hessian_eigenvalue = std::min(rep.min_hessian_eigenvalue, lam);
    if (!(lam > 0.0)) record("convexity", x, v, -lam);
    if (rep.growth_checked) {
      const double gap = *model.theta(v.norm()) - *c0 - j.value;
      rep.worst_growth_gap = std::max(rep.worst_growth_gap, gap);
      if (gap > 1e-12 * (1.0 + std::abs(j.value))) record("growth", x, v, gap);
    }
    if (rep.derivative_checked) {
      const double gap = j.Lx.norm() + j.Lv.norm() - *c1 * *model.theta(v.norm());
      rep.worst_derivative_gap = std::max(rep.worst_derivative_gap, gap);
      if (gap > 1e-12 * (1.0 + j.Lv.norm())) record("derivative-growth", x, v, gap);
    }
  }
  return rep;
}

}  // namespace hjs
