#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace stlearn {

/// Unit-norm embedding of one frame or one tracklet. Storage on disk is f32;
/// all in-memory math runs in f64.
using FeatureVector = std::vector<double>;

/// Below this pre-normalization norm a vector is treated as degenerate and
/// normalization falls back to the first basis vector.
inline constexpr double kDegenerateNorm = 1e-12;

inline double dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("dot: dimension mismatch");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

inline double squared_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return s;
}

inline double l2_norm(std::span<const double> v) { return std::sqrt(squared_norm(v)); }

/// Scales v to unit L2 norm in place. Returns false when the input norm is
/// below kDegenerateNorm; v is then set to the first basis vector.
inline bool normalize_unit(FeatureVector& v) {
  if (v.empty()) throw std::invalid_argument("normalize_unit: empty vector");
  const double n = l2_norm(v);
  if (n < kDegenerateNorm) {
    for (double& x : v) x = 0.0;
    v[0] = 1.0;
    return false;
  }
  for (double& x : v) x /= n;
  return true;
}

inline FeatureVector normalized(FeatureVector v) {
  normalize_unit(v);
  return v;
}

/// acc += s * v
inline void add_scaled(std::vector<double>& acc, std::span<const double> v, double s) {
  if (acc.size() != v.size()) {
    throw std::invalid_argument("add_scaled: dimension mismatch");
  }
  for (std::size_t i = 0; i < v.size(); ++i) acc[i] += s * v[i];
}

inline bool all_finite(std::span<const double> v) {
  for (double x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

inline bool all_finite(std::span<const float> v) {
  for (float x : v) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

}  // namespace stlearn
