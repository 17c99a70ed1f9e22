#include "hjs/hull.hpp"

#include <algorithm>
#include <cmath>

#include "hjs/sampling.hpp"

namespace hjs {

namespace {

// Minimum-norm point of the affine hull of the columns of S.
Vector affine_min_norm_weights(const Matrix& S) {
  const auto k = S.cols();
  Matrix K(k + 1, k + 1);
  K.topLeftCorner(k, k) = S.transpose() * S;
  K.topRightCorner(k, 1).setOnes();
  K.bottomLeftCorner(1, k).setOnes();
  K(k, k) = 0.0;
  Vector rhs = Vector::Zero(k + 1);
  rhs(k) = 1.0;
  Eigen::CompleteOrthogonalDecomposition<Matrix> cod(K);
  const Vector sol = cod.solve(rhs);
  return sol.head(k);
}

}  // namespace

HullProjection nearest_point_in_hull(std::span<const Vector> points, const Vector& target) {
  if (points.empty()) throw ValidationError("nearest_point_in_hull: empty point set");
  const auto n = target.size();
  const auto m = points.size();
  std::vector<Vector> P;
  P.reserve(m);
  double scale = 0.0;
  for (const Vector& p : points) {
    require_dim(p, n, "hull point");
    P.push_back(p - target);
    scale = std::max(scale, P.back().squaredNorm());
  }
  const double eps = 1e-14 * std::max(scale, 1e-300);

  std::size_t first = 0;
  for (std::size_t i = 1; i < m; ++i) {
    if (P[i].squaredNorm() < P[first].squaredNorm()) first = i;
  }
  std::vector<std::size_t> active{first};
  std::vector<double> lambda{1.0};
  Vector x = P[first];

  for (int outer = 0; outer < 100 + 10 * static_cast<int>(m); ++outer) {
    std::size_t j = 0;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < m; ++i) {
      const double d = x.dot(P[i]);
      if (d < best) {
        best = d;
        j = i;
      }
    }
    if (x.squaredNorm() - best <= eps || std::find(active.begin(), active.end(), j) != active.end()) break;
    active.push_back(j);
    lambda.push_back(0.0);

    for (int inner = 0; inner < 100; ++inner) {
      Matrix S(n, static_cast<Eigen::Index>(active.size()));
      for (std::size_t c = 0; c < active.size(); ++c) S.col(static_cast<Eigen::Index>(c)) = P[active[c]];
      const Vector alpha = affine_min_norm_weights(S);
      if ((alpha.array() > 1e-15).all()) {
        for (std::size_t c = 0; c < active.size(); ++c) lambda[c] = alpha(static_cast<Eigen::Index>(c));
        x = S * alpha;
        break;
      }
      double theta = 1.0;
      for (std::size_t c = 0; c < active.size(); ++c) {
        const double a = alpha(static_cast<Eigen::Index>(c));
        if (a <= 1e-15 && lambda[c] - a > 0.0) theta = std::min(theta, lambda[c] / (lambda[c] - a));
      }
      for (std::size_t c = 0; c < active.size(); ++c) {
        lambda[c] = lambda[c] + theta * (alpha(static_cast<Eigen::Index>(c)) - lambda[c]);
      }
      std::vector<std::size_t> keep_idx;
      std::vector<double> keep_lam;
      for (std::size_t c = 0; c < active.size(); ++c) {
        if (lambda[c] > 1e-15) {
          keep_idx.push_back(active[c]);
          keep_lam.push_back(lambda[c]);
        }
      }
      if (keep_idx.empty()) {
        keep_idx.push_back(active.back());
        keep_lam.push_back(1.0);
      }
      active = std::move(keep_idx);
      lambda = std::move(keep_lam);
      double total = 0.0;
      for (double l : lambda) total += l;
      x = Vector::Zero(n);
      for (std::size_t c = 0; c < active.size(); ++c) {
        lambda[c] /= total;
        x += lambda[c] * P[active[c]];
      }
    }
  }

  HullProjection out;
  out.weights.assign(m, 0.0);
  for (std::size_t c = 0; c < active.size(); ++c) out.weights[active[c]] += lambda[c];
  out.point = x + target;
  out.distance = x.norm();
  return out;
}

std::vector<Vector> extreme_points(std::span<const Vector> points, double tol) {
  std::vector<Vector> uniq;
  for (const Vector& p : points) {
    const bool dup = std::any_of(uniq.begin(), uniq.end(), [&](const Vector& q) { return (p - q).norm() <= tol; });
    if (!dup) uniq.push_back(p);
  }
  if (uniq.size() <= 2) return uniq;
  std::vector<Vector> ext;
  for (std::size_t i = 0; i < uniq.size(); ++i) {
    std::vector<Vector> others;
    for (std::size_t k = 0; k < uniq.size(); ++k) {
      if (k != i) others.push_back(uniq[k]);
    }
    if (distance_to_hull(others, uniq[i]) > 1e-3 * tol) ext.push_back(uniq[i]);
  }
  return ext;
}

double diameter(std::span<const Vector> points) {
  double d = 0.0;
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = i + 1; k < points.size(); ++k) d = std::max(d, (points[i] - points[k]).norm());
  }
  return d;
}

bool on_hull_boundary(std::span<const Vector> points, const Vector& p, double eps) {
  for (const Vector& d : fixed_directions(p.size())) {
    if (distance_to_hull(points, p + eps * d) >= 0.25 * eps) return true;
  }
  return false;
}

}  // namespace hjs
