#include "dynsc/scene.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "dynsc/error.hpp"

namespace dynsc {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::invalid_spec: return "invalid-spec";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::simulation_diverged: return "simulation-diverged";
    case ErrorKind::generation_failure: return "generation-failure";
    case ErrorKind::template_error: return "template-error";
    case ErrorKind::parse_error: return "parse-error";
    case ErrorKind::type_error: return "type-error";
    case ErrorKind::unique_violation: return "unique-violation";
    case ErrorKind::unanswerable: return "unanswerable";
    case ErrorKind::tracking_error: return "tracking-error";
    case ErrorKind::io_error: return "io-error";
    case ErrorKind::usage_error: return "usage-error";
  }
  return "unknown";
}

const std::vector<Color>& all_colors() {
  static const std::vector<Color> colors = {
      Color::gray, Color::red,  Color::brown, Color::yellow,
      Color::green, Color::cyan, Color::blue, Color::purple};
  return colors;
}

std::string to_string(Color c) {
  switch (c) {
    case Color::gray: return "gray";
    case Color::red: return "red";
    case Color::brown: return "brown";
    case Color::yellow: return "yellow";
    case Color::green: return "green";
    case Color::cyan: return "cyan";
    case Color::blue: return "blue";
    case Color::purple: return "purple";
  }
  throw Error(ErrorKind::domain_error, "bad color");
}

Color color_from_string(const std::string& s) {
  for (Color c : all_colors())
    if (to_string(c) == s) return c;
  throw Error(ErrorKind::domain_error, "unknown color: " + s);
}

std::string to_string(VehicleClass c) {
  switch (c) {
    case VehicleClass::car: return "car";
    case VehicleClass::plane: return "plane";
    case VehicleClass::bicycle: return "bicycle";
    case VehicleClass::motorbike: return "motorbike";
    case VehicleClass::bus: return "bus";
  }
  throw Error(ErrorKind::domain_error, "bad class");
}

std::string to_string(VelocityState v) {
  switch (v) {
    case VelocityState::static_: return "static";
    case VelocityState::slow: return "slow";
    case VelocityState::fast: return "fast";
  }
  throw Error(ErrorKind::domain_error, "bad velocity state");
}

VelocityState velocity_state_from_string(const std::string& s) {
  if (s == "static") return VelocityState::static_;
  if (s == "slow") return VelocityState::slow;
  if (s == "fast") return VelocityState::fast;
  throw Error(ErrorKind::domain_error, "unknown velocity state: " + s);
}

std::string to_string(Direction d) {
  switch (d) {
    case Direction::left: return "left";
    case Direction::right: return "right";
    case Direction::up: return "up";
    case Direction::down: return "down";
    case Direction::front: return "front";
    case Direction::back: return "back";
  }
  throw Error(ErrorKind::domain_error, "bad direction");
}

const std::vector<SubtypeInfo>& subtype_registry() {
  using VC = VehicleClass;
  static const std::vector<SubtypeInfo> registry = {
      // planes
      {"airliner", VC::plane, {3.0, 2.6, 0.9}},
      {"biplane", VC::plane, {1.5, 1.6, 0.7}},
      {"fighter aircraft", VC::plane, {2.2, 1.5, 0.6}},
      {"jet", VC::plane, {2.4, 1.8, 0.7}},
      // cars
      {"minivan", VC::car, {1.2, 0.5, 0.55}},
      {"sedan", VC::car, {1.1, 0.45, 0.4}},
      {"suv", VC::car, {1.15, 0.5, 0.55}},
      {"truck", VC::car, {1.6, 0.6, 0.8}},
      {"wagon", VC::car, {1.2, 0.48, 0.45}},
      // buses
      {"articulated bus", VC::bus, {2.8, 0.65, 0.9}},
      {"double bus", VC::bus, {1.7, 0.65, 1.3}},
      {"regular bus", VC::bus, {1.8, 0.65, 0.9}},
      {"school bus", VC::bus, {1.9, 0.65, 0.95}},
      // bicycles
      {"mountain bike", VC::bicycle, {0.55, 0.15, 0.45}},
      {"road bike", VC::bicycle, {0.55, 0.12, 0.42}},
      {"tandem bike", VC::bicycle, {0.8, 0.15, 0.45}},
      {"utility bike", VC::bicycle, {0.55, 0.15, 0.44}},
      // motorbikes
      {"chopper motorcycle", VC::motorbike, {0.7, 0.2, 0.45}},
      {"cruiser", VC::motorbike, {0.65, 0.2, 0.4}},
      {"dirtbike", VC::motorbike, {0.6, 0.18, 0.42}},
      {"scooter", VC::motorbike, {0.55, 0.18, 0.4}},
  };
  return registry;
}

const SubtypeInfo& subtype_info(const std::string& name) {
  for (const auto& s : subtype_registry())
    if (s.name == name) return s;
  throw Error(ErrorKind::invalid_spec, "unknown subtype: " + name);
}

ShapeCategory shape_from_subtype(const std::string& name) {
  const auto& info = subtype_info(name);
  return {info.klass, info.name};
}

const std::vector<std::string>& answer_vocabulary() {
  static const std::vector<std::string> vocab = [] {
    std::vector<std::string> v;
    for (const auto& s : subtype_registry()) v.push_back(s.name);
    for (Color c : all_colors()) v.push_back(to_string(c));
    for (Direction d : {Direction::left, Direction::right, Direction::up,
                        Direction::down, Direction::front, Direction::back})
      v.push_back(to_string(d));
    v.push_back("true");
    v.push_back("false");
    std::sort(v.begin(), v.end());
    return v;
  }();
  return vocab;
}

bool in_answer_vocabulary(const std::string& token) {
  const auto& v = answer_vocabulary();
  return std::binary_search(v.begin(), v.end(), token);
}

std::string ObjectSpec::descriptor() const {
  return to_string(color) + " " + shape.subtype;
}

double mass_of(const ObjectSpec& spec) {
  double v = spec.volume();
  if (!(v > 0.0))
    throw Error(ErrorKind::invalid_spec, "object volume must be positive");
  return kDensity * v;
}

VelocityState velocity_state_of(double speed) {
  if (!(speed >= 0.0) || !std::isfinite(speed))
    throw Error(ErrorKind::domain_error, "speed must be finite and >= 0");
  if (speed == 0.0) return VelocityState::static_;
  if (speed <= kSlowFastBoundary) return VelocityState::slow;
  return VelocityState::fast;
}

void Camera::basis(Vec3& right, Vec3& up, Vec3& forward) const {
  forward = (look_at - position).normalized();
  Vec3 world_up{0, 0, 1};
  Vec3 r = forward.cross(world_up);
  if (r.norm() < 1e-12) r = Vec3{1, 0, 0};  // looking straight down
  right = r.normalized();
  up = right.cross(forward);
}

bool Camera::project(const Vec3& p, double& u, double& v) const {
  Vec3 right, up, forward;
  basis(right, up, forward);
  Vec3 d = p - position;
  double zc = d.dot(forward);
  if (zc <= 1e-9) return false;
  double xc = d.dot(right), yc = d.dot(up);
  double f = (image_width / 2.0) /
             std::tan(fov_deg * 3.14159265358979323846 / 360.0);
  u = image_width / 2.0 + f * xc / zc;
  v = image_height / 2.0 - f * yc / zc;
  return true;
}

Direction direction_of(const Vec3& velocity, const Camera& camera) {
  if (!velocity.finite())
    throw Error(ErrorKind::domain_error, "velocity must be finite");
  if (velocity.norm() <= kEpsilonMotion)
    throw Error(ErrorKind::unanswerable, "object is not moving");
  Vec3 right, up, forward;
  camera.basis(right, up, forward);
  double cx = velocity.dot(right);
  double cy = velocity.dot(up);
  double cz = velocity.dot(forward);
  double ax = std::abs(cx), ay = std::abs(cy), az = std::abs(cz);
  // Axis priority x > y > z on ties.
  if (ax >= ay && ax >= az) return cx >= 0 ? Direction::right : Direction::left;
  if (ay >= az) return cy >= 0 ? Direction::up : Direction::down;
  return cz >= 0 ? Direction::back : Direction::front;
}

const SceneObject& SceneAnnotation::object_by_id(int id) const {
  for (const auto& o : objects)
    if (o.spec.id == id) return o;
  throw Error(ErrorKind::domain_error, "unknown object id");
}

const Trajectory& SceneAnnotation::trajectory_by_id(int id) const {
  for (size_t i = 0; i < objects.size(); ++i)
    if (objects[i].spec.id == id) return trajectories[i];
  throw Error(ErrorKind::domain_error, "unknown object id");
}

}  // namespace dynsc
