#pragma once

#include <span>
#include <vector>

#include "hjs/types.hpp"

namespace hjs {

struct HullProjection {
  Vector point;                 // nearest point of co(points) to the target
  std::vector<double> weights;  // barycentric weights, one per input point
  double distance = 0.0;
};

/// Nearest point of the convex hull of `points` to `target` (Wolfe's
/// minimum-norm-point algorithm on the shifted point set).
HullProjection nearest_point_in_hull(std::span<const Vector> points, const Vector& target);

inline double distance_to_hull(std::span<const Vector> points, const Vector& target) {
  return nearest_point_in_hull(points, target).distance;
}

/// Extreme points of co(points); near-duplicates (within tol) are merged.
std::vector<Vector> extreme_points(std::span<const Vector> points, double tol);

/// Max pairwise distance.
double diameter(std::span<const Vector> points);

/// True if p lies on the topological boundary of co(points), up to `eps`.
bool on_hull_boundary(std::span<const Vector> points, const Vector& p, double eps);

}  // namespace hjs
