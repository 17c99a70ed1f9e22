#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "hjs/types.hpp"

namespace hjs {

using Rng = std::mt19937_64;

inline Vector random_unit(Eigen::Index n, Rng& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  Vector w(n);
  do {
    for (Eigen::Index i = 0; i < n; ++i) w(i) = g(rng);
  } while (w.norm() < 1e-12);
  return w / w.norm();
}

inline Vector random_in_ball(const Vector& center, double radius, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto n = center.size();
  const double r = radius * std::pow(u(rng), 1.0 / static_cast<double>(n));
  return center + r * random_unit(n, rng);
}

inline Vector random_in_box(const Box& box, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Vector x(box.dim());
  for (Eigen::Index i = 0; i < box.dim(); ++i) x(i) = box.lower(i) + u(rng) * (box.upper(i) - box.lower(i));
  return x;
}

/// Fixed direction set: ±e_i in 1D, 16 angles in 2D, the 26 cube directions in 3D.
inline std::vector<Vector> fixed_directions(Eigen::Index n) {
  std::vector<Vector> dirs;
  if (n == 1) {
    dirs.push_back(Vector::Constant(1, 1.0));
    dirs.push_back(Vector::Constant(1, -1.0));
  } else if (n == 2) {
    for (int k = 0; k < 16; ++k) {
      const double a = 2.0 * M_PI * k / 16.0;
      Vector d(2);
      d << std::cos(a), std::sin(a);
      dirs.push_back(d);
    }
  } else {
    for (int i = -1; i <= 1; ++i) {
      for (int j = -1; j <= 1; ++j) {
        for (int k = -1; k <= 1; ++k) {
          if (i == 0 && j == 0 && k == 0) continue;
          Vector d(3);
          d << i, j, k;
          dirs.push_back(d.normalized());
        }
      }
    }
  }
  return dirs;
}

/// Points of B̄(center, radius) on dyadic shells radius·2^-k, k = 0..6, plus the
/// center. Doubling the radius yields a superset of the scaled-down shells.
inline std::vector<Vector> dyadic_ball_points(const Vector& center, double radius) {
  std::vector<Vector> pts{center};
  for (const Vector& d : fixed_directions(center.size())) {
    double r = radius;
    for (int k = 0; k <= 6; ++k, r *= 0.5) pts.push_back(center + r * d);
  }
  return pts;
}

}  // namespace hjs
