#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "dynsc/scene.hpp"

namespace dynsc {

struct ContactManifold {
  int a = 0, b = 0;   // object ids, normal points from a to b
  Vec3 normal;        // unit
  double depth = 0;   // > 0, strict overlap
  Vec3 point;
};

struct Body {
  ObjectSpec spec;
  ForceProfile force;
  DynamicState state;
};

struct WorldState {
  std::vector<Body> bodies;

  Body& body_by_id(int id);
  const Body& body_by_id(int id) const;
  bool finite() const;
};

// Oriented-box overlap via separating axes. Boxes are centered at
// position + (0,0,hz) so a grounded body sits at position.z = 0.
// Touching at exactly zero gap is not a contact.
std::optional<ContactManifold> obb_contact(const Vec3& pos_a,
                                           const Rotation& rot_a,
                                           const Vec3& ext_a,
                                           const Vec3& pos_b,
                                           const Rotation& rot_b,
                                           const Vec3& ext_b);

std::vector<ContactManifold> detect_collisions(const WorldState& world);

// Impulse along the contact normal; e = restitution. inv_mass of 0 models an
// immovable body (the floor). Returns the impulse magnitude (0 when the
// contact is already separating).
double resolve_collision(Vec3& v1, double inv_mass1, Vec3& v2, double inv_mass2,
                         const Vec3& normal, double restitution);

struct StepResult {
  std::vector<ContactManifold> contacts;
  // impulse applied per contact, parallel to contacts
  std::vector<double> impulses;
};

// One semi-implicit Euler step, in place. Forces: gravity, engine accel along
// heading, floating force, floor friction (engine off only); then floor and
// pairwise collision response with positional correction.
StepResult step(WorldState& world, const SceneConfig& config);

// Stateful stepping with per-pair collision-event debouncing, shared by the
// dataset simulator and the estimator's prediction stage.
class Simulator {
 public:
  Simulator(WorldState initial, SceneConfig config, int start_frame = 0);

  // Advances one frame; newly opened contact episodes become events.
  std::vector<CollisionEvent> advance();

  const WorldState& world() const { return world_; }
  WorldState& world() { return world_; }
  int frame() const { return frame_; }
  const SceneConfig& config() const { return config_; }

  // Seed the per-pair last-contact bookkeeping (used when resuming a run
  // mid-way so episodes straddling the resume point are not double counted).
  void seed_contact(int a, int b, int last_contact_frame);

 private:
  WorldState world_;
  SceneConfig config_;
  int frame_;
  std::map<std::pair<int, int>, int> last_contact_;
};

struct SimResult {
  std::vector<Trajectory> trajectories;  // parallel to world bodies
  std::vector<CollisionEvent> collisions;
};

// Runs config.n_frames frames; trajectories[i].states[0] is the initial state.
SimResult simulate(const WorldState& initial, const SceneConfig& config);

}  // namespace dynsc
