#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "dynsc/vec3.hpp"

namespace dynsc {

// ---------------------------------------------------------------------------
// Attribute taxonomy

enum class Color { gray, red, brown, yellow, green, cyan, blue, purple };
enum class VehicleClass { car, plane, bicycle, motorbike, bus };
enum class VelocityState { static_, slow, fast };
enum class Direction { left, right, up, down, front, back };

const std::vector<Color>& all_colors();
std::string to_string(Color c);
Color color_from_string(const std::string& s);
std::string to_string(VehicleClass c);
std::string to_string(VelocityState v);
VelocityState velocity_state_from_string(const std::string& s);
std::string to_string(Direction d);

struct ShapeCategory {
  VehicleClass klass;
  std::string subtype;
};

struct SubtypeInfo {
  std::string name;
  VehicleClass klass;
  Vec3 half_extents;  // collision box proxy, meters
};

// The 21 registered subtypes. Proxy extents are an implementation convention.
const std::vector<SubtypeInfo>& subtype_registry();
const SubtypeInfo& subtype_info(const std::string& name);
ShapeCategory shape_from_subtype(const std::string& name);

// Closed answer-token set: 21 subtypes + 8 colors + 6 directions + true/false.
const std::vector<std::string>& answer_vocabulary();
bool in_answer_vocabulary(const std::string& token);

// ---------------------------------------------------------------------------
// Physical constants and classification thresholds

inline constexpr double kDensity = 2.7;             // kg per m^3 of proxy volume
inline constexpr double kEpsilonMotion = 0.1;       // m/s, "is moving" cutoff
inline constexpr double kAccelThreshold = 0.5;      // m/s^2, forward accel cutoff
inline constexpr double kFloatHeightThreshold = 0.5;  // m
inline constexpr double kSlowFastBoundary = 3.0;    // m/s, 3 itself is slow

// ---------------------------------------------------------------------------
// Objects and per-frame state

struct ObjectSpec {
  int id = 0;
  ShapeCategory shape;
  Color color = Color::gray;
  Vec3 proxy_extents;  // half extents, m

  double volume() const {  // 8 * hx * hy * hz
    return 8.0 * proxy_extents.x * proxy_extents.y * proxy_extents.z;
  }
  std::string descriptor() const;  // "red mountain bike"
};

// volume must be positive; mass is density * volume.
double mass_of(const ObjectSpec& spec);

struct ForceProfile {
  double engine_accel = 0.0;             // {0, 1} m/s^2 along heading
  double floating_force_per_mass = 0.0;  // {0, 10} m/s^2 upward; planes only
};

struct DynamicState {
  Vec3 position;
  Rotation rotation;
  Vec3 velocity;
  Vec3 acceleration;

  bool finite() const {
    return position.finite() && velocity.finite() && acceleration.finite();
  }
};

struct Trajectory {
  std::vector<DynamicState> states;  // indexed by frame
};

using FrameId = int;

struct CollisionEvent {
  FrameId frame = 0;
  int a = 0, b = 0;  // canonical a < b
  std::optional<Vec3> contact_point;
  std::optional<double> impulse_magnitude;

  bool same_pair(int x, int y) const {
    return (a == x && b == y) || (a == y && b == x);
  }
  bool operator==(const CollisionEvent& o) const {
    return frame == o.frame && a == o.a && b == o.b;
  }
};

// ---------------------------------------------------------------------------
// Camera

struct Camera {
  Vec3 position{0, -14, 5};
  Vec3 look_at{0, 0, 0};
  double fov_deg = 60.0;
  int image_width = 640;
  int image_height = 480;

  // Orthonormal basis: right, up, forward (toward the scene).
  void basis(Vec3& right, Vec3& up, Vec3& forward) const;
  // Projects a world point; returns false when behind the camera.
  bool project(const Vec3& p, double& u, double& v) const;
};

// Label of the dominant camera-frame component of a (moving) velocity.
// Ties broken with axis priority x > y > z.
Direction direction_of(const Vec3& velocity, const Camera& camera);

// 0 -> static; (0, 3] -> slow; (3, inf) -> fast.
VelocityState velocity_state_of(double speed);

// ---------------------------------------------------------------------------
// Scene configuration and annotation

struct SceneConfig {
  double gravity = 10.0;  // m/s^2 downward
  double dt = 1.0 / 60.0;
  int n_frames = 120;
  double friction_object = 0.2;
  double friction_floor = 0.4;
  double restitution = 0.5;
  double arena_radius = 10.0;  // floor plane z = 0
  std::uint64_t seed = 0;
  Camera camera;
  int debounce_frames = 10;  // separation between events of the same pair
};

struct SceneObject {
  ObjectSpec spec;
  ForceProfile force;
};

struct CounterfactualRecord {
  int object_id = 0;
  std::string property;  // velocity_state | accelerating | floating
  std::string value;     // new value: static/slow/fast or true/false
  std::vector<CollisionEvent> events;
};

struct SceneAnnotation {
  std::string scene_id;
  std::vector<SceneObject> objects;
  std::vector<Trajectory> trajectories;  // parallel to objects
  std::vector<CollisionEvent> collisions;
  std::vector<CounterfactualRecord> counterfactuals;
  SceneConfig config;

  const SceneObject& object_by_id(int id) const;
  const Trajectory& trajectory_by_id(int id) const;
};

}  // namespace dynsc
