#include "hjs/scfun.hpp"

#include <algorithm>
#include <cmath>

#include "hjs/hull.hpp"
#include "hjs/sampling.hpp"

namespace hjs {

SemiconcaveFn::SemiconcaveFn(int dim, std::string kind, Evaluator value, std::optional<Gradient> gradient,
                             double constant)
    : dim_(dim), kind_(std::move(kind)), value_(std::move(value)), gradient_(std::move(gradient)),
      constant_(constant) {
  if (dim < 1 || dim > 3) throw ValidationError("semiconcave function: dimension must be 1, 2 or 3");
  if (!(constant >= 0.0)) throw ValidationError("semiconcave function: constant must be >= 0");
}

SemiconcaveFn SemiconcaveFn::neg_abs(Vector center, std::vector<int> axes, double weight) {
  const int n = static_cast<int>(center.size());
  if (axes.empty())
    for (int i = 0; i < n; ++i) axes.push_back(i);
  Vector mask = Vector::Zero(n);
  for (int a : axes) {
    if (a < 0 || a >= n) throw ValidationError("neg_abs: axis out of range");
    mask(a) = 1.0;
  }
  auto value = [center, mask, weight](const Vector& x) {
    return -weight * (x - center).cwiseProduct(mask).norm();
  };
  auto grad = [center, mask, weight](const Vector& x) -> Vector {
    const Vector d = (x - center).cwiseProduct(mask);
    const double r = d.norm();
    if (r == 0.0) {
      // one selection at the apex: the first masked axis
      Vector g = Vector::Zero(x.size());
      for (Eigen::Index i = 0; i < x.size(); ++i)
        if (mask(i) != 0.0) {
          g(i) = -weight;
          break;
        }
      return g;
    }
    return -weight * d / r;
  };
  return SemiconcaveFn(n, "neg_abs", value, grad, 0.0);
}

SemiconcaveFn SemiconcaveFn::min_of_planes(std::vector<Vector> normals, std::vector<double> offsets) {
  if (normals.empty()) throw ValidationError("min_of_planes: need at least one plane");
  if (offsets.empty()) offsets.assign(normals.size(), 0.0);
  if (offsets.size() != normals.size()) throw ValidationError("min_of_planes: one offset per normal");
  const auto n = normals.front().size();
  for (const Vector& a : normals) require_dim(a, n, "min_of_planes normal");
  auto active = [normals, offsets](const Vector& x) {
    std::size_t best = 0;
    double value = normals[0].dot(x) + offsets[0];
    for (std::size_t i = 1; i < normals.size(); ++i) {
      const double v = normals[i].dot(x) + offsets[i];
      if (v < value) {
        value = v;
        best = i;
      }
    }
    return std::make_pair(best, value);
  };
  auto value = [active](const Vector& x) { return active(x).second; };
  auto grad = [active, normals](const Vector& x) -> Vector { return normals[active(x).first]; };
  return SemiconcaveFn(static_cast<int>(n), "min_of_planes", value, grad, 0.0);
}

SemiconcaveFn SemiconcaveFn::neg_distance_to_set(std::vector<Vector> points) {
  if (points.empty()) throw ValidationError("neg_distance_to_set: need at least one point");
  const auto n = points.front().size();
  for (const Vector& s : points) require_dim(s, n, "neg_distance_to_set point");
  auto nearest = [points](const Vector& x) {
    std::size_t best = 0;
    double d = (x - points[0]).norm();
    for (std::size_t i = 1; i < points.size(); ++i) {
      const double di = (x - points[i]).norm();
      if (di < d) {
        d = di;
        best = i;
      }
    }
    return std::make_pair(best, d);
  };
  auto value = [nearest](const Vector& x) { return -nearest(x).second; };
  auto grad = [nearest, points](const Vector& x) -> Vector {
    const auto [i, d] = nearest(x);
    if (d == 0.0) {
      Vector g = Vector::Zero(x.size());
      g(0) = -1.0;
      return g;
    }
    return -(x - points[i]) / d;
  };
  return SemiconcaveFn(static_cast<int>(n), "neg_distance_to_set", value, grad, 0.0);
}

SemiconcaveFn SemiconcaveFn::expression(int dim, const std::string& text, double constant) {
  const Expression e = Expression::parse(text, position_variable_names(dim));
  auto value = [e](const Vector& x) { return e.eval(std::span<const double>(x.data(), x.size())); };
  auto grad = [e](const Vector& x) -> Vector {
    const Jet j = e.eval_jet(std::span<const double>(x.data(), x.size()));
    Vector g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) g(i) = j.grad[i];
    return g;
  };
  return SemiconcaveFn(dim, "expression", value, grad, constant);
}

SemiconcaveFn SemiconcaveFn::callable(int dim, Evaluator value, std::optional<Gradient> gradient, double constant,
                                      std::string name) {
  return SemiconcaveFn(dim, std::move(name), std::move(value), std::move(gradient), constant);
}

double SemiconcaveFn::operator()(const Vector& x) const {
  require_dim(x, dim_, "semiconcave function argument");
  return value_(x);
}

Vector SemiconcaveFn::gradient(const Vector& x, double max_step) const {
  require_dim(x, dim_, "semiconcave function argument");
  if (gradient_) return (*gradient_)(x);
  const double h = std::min(1e-5 * (1.0 + x.norm()), max_step);
  Vector g(dim_);
  for (int i = 0; i < dim_; ++i) {
    Vector p = x, m = x;
    p(i) += h;
    m(i) -= h;
    g(i) = (value_(p) - value_(m)) / (2.0 * h);
  }
  return g;
}

std::vector<int> complete_linkage(const std::vector<Vector>& points, double tol) {
  const std::size_t n = points.size();
  std::vector<std::vector<std::size_t>> clusters(n);
  for (std::size_t i = 0; i < n; ++i) clusters[i] = {i};
  Matrix dist(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) dist(i, j) = (points[i] - points[j]).norm();
  auto linkage = [&](const std::vector<std::size_t>& a, const std::vector<std::size_t>& b) {
    double worst = 0.0;
    for (std::size_t i : a)
      for (std::size_t j : b) worst = std::max(worst, dist(i, j));
    return worst;
  };
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::size_t ba = 0, bb = 0;
    for (std::size_t a = 0; a < clusters.size(); ++a)
      for (std::size_t b = a + 1; b < clusters.size(); ++b) {
        const double l = linkage(clusters[a], clusters[b]);
        if (l < best) {
          best = l;
          ba = a;
          bb = b;
        }
      }
    if (best > tol) break;
    clusters[ba].insert(clusters[ba].end(), clusters[bb].begin(), clusters[bb].end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(bb));
  }
  // Label clusters in order of their smallest member for determinism.
  std::sort(clusters.begin(), clusters.end(),
            [](const auto& a, const auto& b) { return *std::min_element(a.begin(), a.end()) < *std::min_element(b.begin(), b.end()); });
  std::vector<int> labels(n, 0);
  for (std::size_t c = 0; c < clusters.size(); ++c)
    for (std::size_t i : clusters[c]) labels[i] = static_cast<int>(c);
  return labels;
}

Superdifferential estimate_superdifferential(const SemiconcaveFn& u, const Vector& x, const SuperdiffOptions& options) {
  require_dim(x, u.dim(), "estimate_superdifferential");
  if (!(options.radius > 0.0)) throw ValidationError("estimate_superdifferential: radius must be positive");
  if (options.nsamples < 1) throw ValidationError("estimate_superdifferential: nsamples must be positive");
  Rng rng(options.seed);
  std::vector<Vector> directions = fixed_directions(x.size());
  for (int k = 0; k < options.nsamples; ++k) directions.push_back(random_unit(x.size(), rng));

  constexpr int kRadii = 7;
  std::vector<std::vector<Vector>> grads(kRadii);
  double lipschitz = 0.0;
  double r = options.radius;
  for (int k = 0; k < kRadii; ++k, r *= 0.5) {
    for (const Vector& d : directions) {
      const Vector g = u.gradient(x + r * d, 0.25 * r);
      if (!g.allFinite()) throw NumericalError("estimate_superdifferential: non-finite gradient sample");
      lipschitz = std::max(lipschitz, g.norm());
      grads[k].push_back(g);
    }
  }
  Superdifferential sd;
  sd.x = x;
  sd.lipschitz = lipschitz;
  sd.cluster_tol = options.cluster_tol > 0.0 ? options.cluster_tol : 1e-3 * (1.0 + lipschitz);
  std::vector<int> last_labels;
  for (int k = 0; k < kRadii; ++k) {
    last_labels = complete_linkage(grads[k], sd.cluster_tol);
    sd.cluster_counts.push_back(*std::max_element(last_labels.begin(), last_labels.end()) + 1);
  }
  const int clusters = sd.cluster_counts.back();
  sd.stable = sd.cluster_counts[kRadii - 1] == sd.cluster_counts[kRadii - 2] &&
              sd.cluster_counts[kRadii - 2] == sd.cluster_counts[kRadii - 3];
  std::vector<Vector> centers(clusters, Vector::Zero(x.size()));
  std::vector<int> sizes(clusters, 0);
  for (std::size_t i = 0; i < last_labels.size(); ++i) {
    centers[last_labels[i]] += grads[kRadii - 1][i];
    ++sizes[last_labels[i]];
  }
  for (int c = 0; c < clusters; ++c) centers[c] /= sizes[c];
  sd.limiting = centers;
  sd.hull_vertices = extreme_points(centers, sd.cluster_tol);
  sd.diameter = diameter(sd.hull_vertices);
  return sd;
}

double default_sing_tol(const Superdifferential& sd) { return 1e-2 * (1.0 + sd.lipschitz); }

bool is_singular(const SemiconcaveFn& u, const Vector& x, double sing_tol, const SuperdiffOptions& options) {
  const Superdifferential sd = estimate_superdifferential(u, x, options);
  const double tol = sing_tol > 0.0 ? sing_tol : default_sing_tol(sd);
  return sd.diameter > tol;
}

SemiconcavityReport semiconcavity_check(const SemiconcaveFn& u, const Box& region, double C, int ntriples,
                                        std::uint64_t seed) {
  if (region.dim() != u.dim()) throw ValidationError("semiconcavity_check: region dimension mismatch");
  Rng rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  SemiconcavityReport rep;
  double scale = 0.0;
  rep.worst_midpoint = -std::numeric_limits<double>::infinity();
  rep.worst_proximal = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < ntriples; ++k) {
    const Vector x = random_in_box(region, rng);
    const Vector y = random_in_box(region, rng);
    const double lambda = unit(rng);
    const double ux = u(x), uy = u(y);
    scale = std::max({scale, std::abs(ux), std::abs(uy)});
    const double d2 = (x - y).squaredNorm();
    const double mid = lambda * ux + (1.0 - lambda) * uy - u(lambda * x + (1.0 - lambda) * y);
    rep.worst_midpoint = std::max(rep.worst_midpoint, mid - 0.5 * C * lambda * (1.0 - lambda) * d2);
    rep.worst_proximal = std::max(rep.worst_proximal, uy - ux - u.gradient(x).dot(y - x) - 0.5 * C * d2);
    if (k < 20) {
      // Estimated vertices sit within radius·(C+1) of true ones.
      SuperdiffOptions so;
      so.seed = seed + static_cast<std::uint64_t>(k);
      so.nsamples = 8;
      const double slack = so.radius * (1.0 + C) * std::sqrt(d2);
      for (const Vector& p : estimate_superdifferential(u, x, so).hull_vertices)
        rep.worst_proximal = std::max(rep.worst_proximal, uy - ux - p.dot(y - x) - 0.5 * C * d2 - slack);
    }
    ++rep.triples;
  }
  rep.tolerance = 1e-9 * (1.0 + scale);
  rep.pass = rep.worst_midpoint <= rep.tolerance && rep.worst_proximal <= rep.tolerance;
  return rep;
}

namespace {

Vector combine(const std::vector<Vector>& pts, const std::vector<double>& w) {
  Vector p = Vector::Zero(pts.front().size());
  for (std::size_t i = 0; i < pts.size(); ++i) p += w[i] * pts[i];
  return p;
}

MinimalEnergy minimize_energy_from(const HamiltonianView& hv, const Vector& x, const std::vector<Vector>& pts,
                                   std::vector<double> w) {
  Vector p = combine(pts, w);
  double energy = hv.H(x, p);
  for (int it = 0; it < 200; ++it) {
    const Vector g = hv.H_p(x, p);
    const Matrix G = hv.H_pp(x, p);
    Eigen::LLT<Matrix> llt(G);
    if (llt.info() != Eigen::Success) throw NumericalError("minimal_energy_covector: H_pp not positive definite");
    const Matrix U = llt.matrixU();
    std::vector<Vector> mapped;
    for (const Vector& q : pts) mapped.push_back(U * q);
    const Vector target = U * p - llt.matrixL().solve(g);
    const HullProjection proj = nearest_point_in_hull(mapped, target);
    const Vector q = combine(pts, proj.weights);
    const Vector d = q - p;
    if (d.norm() <= 1e-15 * (1.0 + p.norm())) break;
    const double slope = g.dot(d);
    double alpha = 1.0;
    double trial = hv.H(x, p + d);
    while (trial > energy + 1e-4 * alpha * slope && alpha > 1e-12) {
      alpha *= 0.5;
      trial = hv.H(x, p + alpha * d);
    }
    if (trial > energy) break;
    for (std::size_t i = 0; i < w.size(); ++i) w[i] = (1.0 - alpha) * w[i] + alpha * proj.weights[i];
    const double step = alpha * d.norm();
    p = combine(pts, w);
    energy = trial;
    if (step <= 1e-14 * (1.0 + p.norm())) break;
  }
  return MinimalEnergy{p, hv.H(x, p), w};
}

}  // namespace

MinimalEnergy minimal_energy_covector(const HamiltonianView& hamiltonian, const Superdifferential& sd) {
  const auto& pts = sd.hull_vertices;
  if (pts.empty()) throw ValidationError("minimal_energy_covector: empty superdifferential");
  require_dim(sd.x, hamiltonian.model().dim(), "minimal_energy_covector");
  if (pts.size() == 1) return MinimalEnergy{pts[0], hamiltonian.H(sd.x, pts[0]), {1.0}};
  std::vector<double> vertex(pts.size(), 0.0);
  vertex[0] = 1.0;
  std::vector<double> barycenter(pts.size(), 1.0 / static_cast<double>(pts.size()));
  const MinimalEnergy a = minimize_energy_from(hamiltonian, sd.x, pts, vertex);
  const MinimalEnergy b = minimize_energy_from(hamiltonian, sd.x, pts, barycenter);
  if ((a.p0 - b.p0).norm() > 1e-8)
    throw NumericalError("minimal_energy_covector: independent starts disagree");
  return a.energy <= b.energy ? a : b;
}

namespace {

// True when u has a convex kink at x: one-sided slopes match the support
// function of the hull from above.
bool convex_kink(const SemiconcaveFn& u, const Vector& x, const Superdifferential& sd) {
  const double r = 1e-6 * (1.0 + x.norm());
  const double tol = 1e-3 * (1.0 + sd.lipschitz);
  const double ux = u(x);
  for (const Vector& d : fixed_directions(x.size())) {
    const double slope = (u(x + r * d) - ux) / r;
    double upper = -std::numeric_limits<double>::infinity();
    for (const Vector& p : sd.hull_vertices) upper = std::max(upper, p.dot(d));
    if (std::abs(slope - upper) > tol) return false;
  }
  return true;
}

}  // namespace

ViscosityReport viscosity_check(const SemiconcaveFn& u, const HamiltonianView& hamiltonian, const Box& region,
                                int nsamples, double level, std::uint64_t seed,
                                const std::vector<Vector>& extra_points, double tolerance) {
  if (region.dim() != u.dim()) throw ValidationError("viscosity_check: region dimension mismatch");
  Rng rng(seed);
  std::vector<Vector> points;
  for (int k = 0; k < nsamples; ++k) points.push_back(random_in_box(region, rng));
  points.insert(points.end(), extra_points.begin(), extra_points.end());
  ViscosityReport rep;
  rep.tolerance = tolerance;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const Vector& x = points[k];
    SuperdiffOptions so;
    so.seed = seed + k;
    so.nsamples = 8;
    const Superdifferential sd = estimate_superdifferential(u, x, so);
    for (const Vector& p : sd.hull_vertices) {
      const double defect = hamiltonian.H(x, p) - level;
      if (defect > rep.subsolution_defect) {
        rep.subsolution_defect = defect;
        rep.worst_sub_point = x;
      }
    }
    // Subdifferential: {Du} at a differentiable point, the hull at a convex
    // kink, empty at a concave one.
    std::optional<double> lowest;
    if (sd.diameter <= default_sing_tol(sd)) {
      lowest = hamiltonian.H(x, u.gradient(x));
    } else if (convex_kink(u, x, sd)) {
      lowest = minimal_energy_covector(hamiltonian, sd).energy;
    }
    if (lowest && level - *lowest > rep.supersolution_defect) {
      rep.supersolution_defect = level - *lowest;
      rep.worst_super_point = x;
    }
    ++rep.samples;
  }
  rep.pass = rep.subsolution_defect <= tolerance && rep.supersolution_defect <= tolerance;
  return rep;
}

}  // namespace hjs
