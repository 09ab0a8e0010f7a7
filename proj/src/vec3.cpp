#include "dynsc/vec3.hpp"

#include <cmath>

namespace dynsc {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

Rotation::Rotation(double w, double x, double y, double z) {
  double n = std::sqrt(w * w + x * x + y * y + z * z);
  if (!(std::isfinite(n)) || std::abs(n - 1.0) > 1e-9)
    throw std::domain_error("quaternion must be unit norm");
  if (w < 0) { w = -w; x = -x; y = -y; z = -z; }
  // Stored verbatim (within the 1e-9 slack) so construction is idempotent
  // and serialized rotations round-trip bit-exactly.
  w_ = w; x_ = x; y_ = y; z_ = z;
}

Rotation Rotation::from_yaw(double yaw) {
  double h = 0.5 * wrap_angle(yaw);
  double w = std::cos(h), z = std::sin(h);
  if (w < 0) { w = -w; z = -z; }
  Rotation r;
  r.w_ = w; r.x_ = 0; r.y_ = 0; r.z_ = z;
  return r;
}

double Rotation::yaw() const {
  return std::atan2(2.0 * (w_ * z_ + x_ * y_), 1.0 - 2.0 * (y_ * y_ + z_ * z_));
}

double Rotation::pitch() const {
  double s = 2.0 * (w_ * y_ - z_ * x_);
  if (s > 1.0) s = 1.0;
  if (s < -1.0) s = -1.0;
  return std::asin(s);
}

double Rotation::roll() const {
  return std::atan2(2.0 * (w_ * x_ + y_ * z_), 1.0 - 2.0 * (x_ * x_ + y_ * y_));
}

Vec3 Rotation::rotate(const Vec3& v) const {
  // q v q*, expanded.
  Vec3 u{x_, y_, z_};
  Vec3 t = 2.0 * u.cross(v);
  return v + w_ * t + u.cross(t);
}

double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

}  // namespace dynsc
