#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "fedres/errors.hpp"

namespace fedres {

/// Flat dense model vector. Length is fixed for a run and equal across the
/// server and all workers.
using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

inline Vec& axpy(Vec& y, double alpha, const Vec& x) {
  for (std::size_t i = 0; i < y.size(); ++i) y[i] += alpha * x[i];
  return y;
}

inline Vec scaled(const Vec& x, double alpha) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
  return y;
}

inline Vec sub(const Vec& a, const Vec& b) {
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] - b[i];
  return y;
}

inline Vec add(const Vec& a, const Vec& b) {
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = a[i] + b[i];
  return y;
}

/// (1-t)*a + t*b
inline Vec lerp(const Vec& a, const Vec& b, double t) {
  Vec y(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) y[i] = (1.0 - t) * a[i] + t * b[i];
  return y;
}

inline bool all_finite(const Vec& a) {
  for (double x : a)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void require_finite(const Vec& a, const char* what) {
  if (!all_finite(a)) throw ProtocolError(std::string("non-finite values in ") + what);
}

}  // namespace fedres
