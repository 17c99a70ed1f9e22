#pragma once

#include <initializer_list>

#include "hjs/types.hpp"

inline hjs::Vector vec(std::initializer_list<double> values) {
  hjs::Vector v(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double x : values) v(i++) = x;
  return v;
}

inline hjs::Box cube(int dim, double half) {
  return hjs::Box{hjs::Vector::Constant(dim, -half), hjs::Vector::Constant(dim, half)};
}
