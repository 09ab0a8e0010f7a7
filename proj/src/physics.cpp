#include "dynsc/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dynsc/error.hpp"

namespace dynsc {

namespace {

constexpr double kSlop = 0.005;            // allowed penetration, m
constexpr double kCorrectionFactor = 0.8;  // positional projection share
constexpr double kGroundTol = 1e-6;        // box bottom at/below the floor
constexpr double kFloorBounceThreshold = 0.4;  // m/s; below this, rest

Vec3 box_center(const Body& b) {
  return b.state.position + Vec3{0, 0, b.spec.proxy_extents.z};
}

// Per-body acceleration from gravity, engine, floating force and friction.
Vec3 body_acceleration(const Body& b, const SceneConfig& cfg) {
  Vec3 a{0, 0, -cfg.gravity};
  a += b.force.floating_force_per_mass * Vec3{0, 0, 1};

  bool grounded = b.state.position.z <= kGroundTol;
  Vec3 heading = b.state.rotation.heading();
  if (b.force.engine_accel != 0.0) {
    a += b.force.engine_accel * heading;
  } else if (grounded) {
    // Friction-only deceleration when coasting on the floor.
    double vh = b.state.velocity.norm_horizontal();
    if (vh > 0.0) {
      double mu = cfg.friction_object * cfg.friction_floor;
      double decel = std::min(mu * cfg.gravity, vh / cfg.dt);
      Vec3 dir = Vec3{b.state.velocity.x, b.state.velocity.y, 0} / vh;
      a -= decel * dir;
    }
  }
  // Floor support: a resting body is held by the normal force.
  if (grounded && b.state.velocity.z <= 0.0 && a.z < 0.0) a.z = 0.0;
  return a;
}

}  // namespace

Body& WorldState::body_by_id(int id) {
  for (auto& b : bodies)
    if (b.spec.id == id) return b;
  throw Error(ErrorKind::domain_error, "unknown body id");
}

const Body& WorldState::body_by_id(int id) const {
  for (const auto& b : bodies)
    if (b.spec.id == id) return b;
  throw Error(ErrorKind::domain_error, "unknown body id");
}

bool WorldState::finite() const {
  for (const auto& b : bodies)
    if (!b.state.finite()) return false;
  return true;
}

std::optional<ContactManifold> obb_contact(const Vec3& pos_a,
                                           const Rotation& rot_a,
                                           const Vec3& ext_a,
                                           const Vec3& pos_b,
                                           const Rotation& rot_b,
                                           const Vec3& ext_b) {
  const Vec3 ca = pos_a + Vec3{0, 0, ext_a.z};
  const Vec3 cb = pos_b + Vec3{0, 0, ext_b.z};
  const Vec3 d = cb - ca;

  Vec3 axes_a[3] = {rot_a.rotate({1, 0, 0}), rot_a.rotate({0, 1, 0}),
                    rot_a.rotate({0, 0, 1})};
  Vec3 axes_b[3] = {rot_b.rotate({1, 0, 0}), rot_b.rotate({0, 1, 0}),
                    rot_b.rotate({0, 0, 1})};
  const double ea[3] = {ext_a.x, ext_a.y, ext_a.z};
  const double eb[3] = {ext_b.x, ext_b.y, ext_b.z};

  auto radius = [&](const Vec3& axis, const Vec3* boxes, const double* e) {
    return e[0] * std::abs(axis.dot(boxes[0])) +
           e[1] * std::abs(axis.dot(boxes[1])) +
           e[2] * std::abs(axis.dot(boxes[2]));
  };

  double best_overlap = std::numeric_limits<double>::infinity();
  Vec3 best_axis;

  auto test_axis = [&](Vec3 axis) -> bool {
    double len = axis.norm();
    if (len < 1e-9) return true;  // degenerate cross product, skip
    axis = axis / len;
    double overlap =
        radius(axis, axes_a, ea) + radius(axis, axes_b, eb) - std::abs(d.dot(axis));
    if (overlap <= 0.0) return false;  // separated (zero gap is no contact)
    if (overlap < best_overlap) {
      best_overlap = overlap;
      best_axis = axis;
    }
    return true;
  };

  for (const auto& ax : axes_a)
    if (!test_axis(ax)) return std::nullopt;
  for (const auto& ax : axes_b)
    if (!test_axis(ax)) return std::nullopt;
  for (const auto& aa : axes_a)
    for (const auto& ab : axes_b)
      if (!test_axis(aa.cross(ab))) return std::nullopt;

  ContactManifold m;
  m.normal = d.dot(best_axis) >= 0 ? best_axis : -best_axis;
  m.depth = best_overlap;

  // Approximate contact point: midpoint of each center clamped into the
  // other box.
  auto clamp_into = [&](const Vec3& p, const Vec3& c, const Vec3* axes,
                        const double* e) {
    Vec3 rel = p - c;
    Vec3 out = c;
    for (int i = 0; i < 3; ++i) {
      double t = std::clamp(rel.dot(axes[i]), -e[i], e[i]);
      out += t * axes[i];
    }
    return out;
  };
  m.point = 0.5 * (clamp_into(cb, ca, axes_a, ea) + clamp_into(ca, cb, axes_b, eb));
  return m;
}

std::vector<ContactManifold> detect_collisions(const WorldState& world) {
  std::vector<ContactManifold> out;
  for (size_t i = 0; i < world.bodies.size(); ++i) {
    for (size_t j = i + 1; j < world.bodies.size(); ++j) {
      const Body& a = world.bodies[i];
      const Body& b = world.bodies[j];
      auto m = obb_contact(a.state.position, a.state.rotation, a.spec.proxy_extents,
                           b.state.position, b.state.rotation, b.spec.proxy_extents);
      if (m) {
        m->a = a.spec.id;
        m->b = b.spec.id;
        out.push_back(*m);
      }
    }
  }
  return out;
}

double resolve_collision(Vec3& v1, double inv_mass1, Vec3& v2, double inv_mass2,
                         const Vec3& normal, double restitution) {
  double rel = (v2 - v1).dot(normal);
  if (rel >= 0.0) return 0.0;  // separating contact: no-op
  double j = -(1.0 + restitution) * rel / (inv_mass1 + inv_mass2);
  v1 -= j * inv_mass1 * normal;
  v2 += j * inv_mass2 * normal;
  return j;
}

StepResult step(WorldState& world, const SceneConfig& config) {
  // Forces, then semi-implicit integration.
  std::vector<Vec3> accels(world.bodies.size());
  for (size_t i = 0; i < world.bodies.size(); ++i)
    accels[i] = body_acceleration(world.bodies[i], config);

  for (size_t i = 0; i < world.bodies.size(); ++i) {
    Body& b = world.bodies[i];
    b.state.velocity += accels[i] * config.dt;
    b.state.position += b.state.velocity * config.dt;
    b.state.acceleration = accels[i];
    double vh = b.state.velocity.norm_horizontal();
    if (vh > kEpsilonMotion)
      b.state.rotation =
          Rotation::from_yaw(std::atan2(b.state.velocity.y, b.state.velocity.x));
  }

  // Floor response (box bottom below z = 0).
  for (auto& b : world.bodies) {
    double depth = -b.state.position.z;
    if (depth <= 0.0) continue;
    if (b.state.velocity.z < 0.0) {
      double e = -b.state.velocity.z > kFloorBounceThreshold ? config.restitution
                                                             : 0.0;
      Vec3 floor_v{0, 0, 0};
      resolve_collision(floor_v, 0.0, b.state.velocity, 1.0 / mass_of(b.spec),
                        Vec3{0, 0, 1}, e);
    }
    double corr = kCorrectionFactor * std::max(depth - kSlop, 0.0);
    b.state.position.z = std::min(b.state.position.z + corr, 0.0);
  }

  // Pairwise contacts: impulses plus positional projection.
  StepResult result;
  result.contacts = detect_collisions(world);
  for (const auto& m : result.contacts) {
    Body& a = world.body_by_id(m.a);
    Body& b = world.body_by_id(m.b);
    double inv_a = 1.0 / mass_of(a.spec);
    double inv_b = 1.0 / mass_of(b.spec);
    double j = resolve_collision(a.state.velocity, inv_a, b.state.velocity,
                                 inv_b, m.normal, config.restitution);
    result.impulses.push_back(j);
    double corr = kCorrectionFactor * std::max(m.depth - kSlop, 0.0);
    double wsum = inv_a + inv_b;
    a.state.position -= m.normal * (corr * inv_a / wsum);
    b.state.position += m.normal * (corr * inv_b / wsum);
  }

  for (const auto& b : world.bodies) {
    if (!b.state.finite())
      throw Error(ErrorKind::simulation_diverged,
                  "object " + std::to_string(b.spec.id) +
                      " diverged during integration");
  }
  return result;
}

Simulator::Simulator(WorldState initial, SceneConfig config, int start_frame)
    : world_(std::move(initial)), config_(std::move(config)), frame_(start_frame) {
  if (!world_.finite())
    throw Error(ErrorKind::simulation_diverged, "non-finite initial state");
}

void Simulator::seed_contact(int a, int b, int last_contact_frame) {
  if (a > b) std::swap(a, b);
  last_contact_[{a, b}] = last_contact_frame;
}

std::vector<CollisionEvent> Simulator::advance() {
  ++frame_;
  StepResult r;
  try {
    r = step(world_, config_);
  } catch (const Error& e) {
    throw Error(ErrorKind::simulation_diverged,
                "frame " + std::to_string(frame_) + ": " + e.what());
  }
  std::vector<CollisionEvent> events;
  for (size_t i = 0; i < r.contacts.size(); ++i) {
    const auto& m = r.contacts[i];
    std::pair<int, int> key{std::min(m.a, m.b), std::max(m.a, m.b)};
    auto it = last_contact_.find(key);
    bool fresh = it == last_contact_.end() ||
                 frame_ - it->second > config_.debounce_frames;
    last_contact_[key] = frame_;
    if (fresh) {
      CollisionEvent ev;
      ev.frame = frame_;
      ev.a = key.first;
      ev.b = key.second;
      ev.contact_point = m.point;
      ev.impulse_magnitude = r.impulses[i];
      events.push_back(ev);
    }
  }
  return events;
}

SimResult simulate(const WorldState& initial, const SceneConfig& config) {
  Simulator sim(initial, config);
  SimResult out;
  out.trajectories.resize(initial.bodies.size());

  // Frame 0 carries the initial state with its instantaneous acceleration.
  {
    WorldState w0 = initial;
    for (auto& b : w0.bodies) b.state.acceleration = body_acceleration(b, config);
    for (size_t i = 0; i < w0.bodies.size(); ++i)
      out.trajectories[i].states.push_back(w0.bodies[i].state);
  }

  for (int f = 1; f < config.n_frames; ++f) {
    auto events = sim.advance();
    out.collisions.insert(out.collisions.end(), events.begin(), events.end());
    for (size_t i = 0; i < sim.world().bodies.size(); ++i)
      out.trajectories[i].states.push_back(sim.world().bodies[i].state);
  }
  return out;
}

}  // namespace dynsc
