#pragma once

#include <cmath>
#include <stdexcept>

namespace dynsc {

struct Vec3 {
  double x = 0.0, y = 0.0, z = 0.0;

  Vec3() = default;
  Vec3(double x_, double y_, double z_) : x(x_), y(y_), z(z_) {}

  Vec3 operator+(const Vec3& o) const { return {x + o.x, y + o.y, z + o.z}; }
  Vec3 operator-(const Vec3& o) const { return {x - o.x, y - o.y, z - o.z}; }
  Vec3 operator*(double s) const { return {x * s, y * s, z * s}; }
  Vec3 operator/(double s) const { return {x / s, y / s, z / s}; }
  Vec3 operator-() const { return {-x, -y, -z}; }
  Vec3& operator+=(const Vec3& o) { x += o.x; y += o.y; z += o.z; return *this; }
  Vec3& operator-=(const Vec3& o) { x -= o.x; y -= o.y; z -= o.z; return *this; }

  double dot(const Vec3& o) const { return x * o.x + y * o.y + z * o.z; }
  Vec3 cross(const Vec3& o) const {
    return {y * o.z - z * o.y, z * o.x - x * o.z, x * o.y - y * o.x};
  }
  double norm() const { return std::sqrt(dot(*this)); }
  double norm_horizontal() const { return std::sqrt(x * x + y * y); }

  Vec3 normalized() const {
    double n = norm();
    if (n == 0.0) throw std::domain_error("cannot normalize zero vector");
    return *this / n;
  }

  bool finite() const {
    return std::isfinite(x) && std::isfinite(y) && std::isfinite(z);
  }
};

inline Vec3 operator*(double s, const Vec3& v) { return v * s; }

// Unit quaternion (w, x, y, z), canonicalized to w >= 0 so that q and -q
// compare equal.
class Rotation {
 public:
  Rotation() : w_(1), x_(0), y_(0), z_(0) {}
  Rotation(double w, double x, double y, double z);

  static Rotation from_yaw(double yaw);

  double w() const { return w_; }
  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }

  double yaw() const;
  double pitch() const;
  double roll() const;

  Vec3 rotate(const Vec3& v) const;
  // Unit vector the body +x axis points along (the heading).
  Vec3 heading() const { return rotate({1, 0, 0}); }

  bool operator==(const Rotation& o) const {
    return w_ == o.w_ && x_ == o.x_ && y_ == o.y_ && z_ == o.z_;
  }

 private:
  double w_, x_, y_, z_;
};

// Wrap an angle to (-pi, pi].
double wrap_angle(double a);

}  // namespace dynsc
