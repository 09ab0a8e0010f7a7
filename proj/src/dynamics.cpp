#include "dynsc/dynamics.hpp"

#include <algorithm>

#include "dynsc/error.hpp"

namespace dynsc {

namespace {

template <typename T>
std::vector<T> moving_average_impl(const std::vector<T>& xs, int window) {
  if (window < 1 || window % 2 == 0)
    throw Error(ErrorKind::usage_error, "smoothing window must be odd");
  const int n = static_cast<int>(xs.size());
  const int half = window / 2;
  std::vector<T> out(xs.size());
  for (int i = 0; i < n; ++i) {
    int lo = std::max(0, i - half);
    int hi = std::min(n - 1, i + half);
    T sum{};
    for (int k = lo; k <= hi; ++k) sum += xs[k];
    out[i] = sum / static_cast<double>(hi - lo + 1);
  }
  return out;
}

}  // namespace

std::vector<double> moving_average(const std::vector<double>& xs, int window) {
  return moving_average_impl(xs, window);
}

std::vector<Vec3> moving_average(const std::vector<Vec3>& xs, int window) {
  return moving_average_impl(xs, window);
}

DerivedDynamics derive_dynamics(const std::vector<Vec3>& positions, double dt,
                                int window) {
  if (positions.size() < 2)
    throw Error(ErrorKind::usage_error, "need at least two frames");
  const size_t n = positions.size();
  std::vector<Vec3> v(n), a(n);
  for (size_t t = 1; t < n; ++t) v[t] = (positions[t] - positions[t - 1]) / dt;
  v[0] = v[1];
  for (size_t t = 1; t < n; ++t) a[t] = (v[t] - v[t - 1]) / dt;
  a[0] = a[1];
  return {moving_average(v, window), moving_average(a, window)};
}

}  // namespace dynsc
