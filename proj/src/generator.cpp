#include "dynsc/generator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <set>
#include <string>

#include "dynsc/error.hpp"
#include "dynsc/json_io.hpp"
#include "dynsc/rng.hpp"

namespace dynsc {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kPlacementMargin = 0.05;  // extra clearance at frame 0

VelocityState initial_velocity_state(const Body& b) {
  double s = b.state.velocity.norm();
  if (s <= kEpsilonMotion) return VelocityState::static_;
  return s <= kSlowFastBoundary ? VelocityState::slow : VelocityState::fast;
}

bool placement_overlaps(const WorldState& world) {
  for (size_t i = 0; i < world.bodies.size(); ++i) {
    for (size_t j = i + 1; j < world.bodies.size(); ++j) {
      const Body& a = world.bodies[i];
      const Body& b = world.bodies[j];
      Vec3 ea = a.spec.proxy_extents + Vec3{kPlacementMargin, kPlacementMargin,
                                            kPlacementMargin};
      Vec3 eb = b.spec.proxy_extents + Vec3{kPlacementMargin, kPlacementMargin,
                                            kPlacementMargin};
      if (obb_contact(a.state.position, a.state.rotation, ea,
                      b.state.position, b.state.rotation, eb))
        return true;
    }
  }
  return false;
}

// A scene only makes a usable benchmark instance when its interactions are
// decisive relative to the observation noise the estimator faces: weak
// grazing impulses, events at the clip boundary, rapid same-pair re-contacts
// and razor-thin near misses are all unresolvable and get rejected here.
constexpr double kMinImpulse = 3.0;
constexpr int kEventFrameMargin = 20;
constexpr int kMinRepeatGap = 20;
constexpr double kMinClearance = 0.5;

bool decisive_dynamics(const SceneConfig& config, const SimResult& sim,
                       const WorldState& world) {
  if (sim.collisions.empty()) return false;  // every scene has dynamics
  std::map<std::pair<int, int>, std::vector<int>> by_pair;
  for (const auto& e : sim.collisions) {
    if (e.impulse_magnitude < kMinImpulse) return false;
    if (e.frame < kEventFrameMargin ||
        e.frame > config.n_frames - kEventFrameMargin)
      return false;
    by_pair[std::minmax(e.a, e.b)].push_back(e.frame);
  }
  for (const auto& [pair, frames] : by_pair)
    for (size_t k = 1; k < frames.size(); ++k)
      if (frames[k] - frames[k - 1] < kMinRepeatGap) return false;

  const size_t n = world.bodies.size();
  const Vec3 pad{kMinClearance / 2, kMinClearance / 2, kMinClearance / 2};
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = i + 1; j < n; ++j) {
      std::pair<int, int> key = std::minmax(world.bodies[i].spec.id,
                                            world.bodies[j].spec.id);
      if (by_pair.count(key)) continue;  // colliding pairs may come close
      Vec3 ea = world.bodies[i].spec.proxy_extents + pad;
      Vec3 eb = world.bodies[j].spec.proxy_extents + pad;
      for (int t = 0; t < config.n_frames; ++t) {
        const DynamicState& sa = sim.trajectories[i].states[t];
        const DynamicState& sb = sim.trajectories[j].states[t];
        if (obb_contact(sa.position, sa.rotation, ea, sb.position,
                        sb.rotation, eb))
          return false;
      }
    }
  }
  return true;
}

}  // namespace

GeneratedScene sample_scene(const GeneratorConfig& gen, std::uint64_t seed) {
  Rng rng(seed);
  const auto& registry = subtype_registry();
  const auto& colors = all_colors();

  for (int attempt = 0; attempt < gen.max_attempts; ++attempt) {
    int n = gen.min_objects +
            static_cast<int>(rng.below(gen.max_objects - gen.min_objects + 1));

    // Unique (shape, color) pairs.
    std::set<std::pair<size_t, size_t>> used;
    std::vector<std::pair<size_t, size_t>> picks;
    bool ok = true;
    for (int i = 0; i < n; ++i) {
      std::pair<size_t, size_t> p;
      int tries = 0;
      do {
        p = {rng.below(registry.size()), rng.below(colors.size())};
      } while (used.count(p) && ++tries < 64);
      if (used.count(p)) { ok = false; break; }
      used.insert(p);
      picks.push_back(p);
    }
    if (!ok) continue;

    // Velocity-state coverage: the first three slots get one of each state.
    std::vector<int> state_of(n);
    for (int i = 0; i < n; ++i)
      state_of[i] = i < 3 ? i : static_cast<int>(rng.below(3));
    for (int i = n - 1; i > 0; --i)
      std::swap(state_of[i], state_of[rng.below(i + 1)]);

    WorldState world;
    for (int i = 0; i < n; ++i) {
      Body b;
      b.spec.id = i;
      const SubtypeInfo& info = registry[picks[i].first];
      b.spec.shape = {info.klass, info.name};
      b.spec.color = colors[picks[i].second];
      b.spec.proxy_extents = info.half_extents;

      double x = -gen.arena_half + 2.0 * gen.arena_half * rng.beta22();
      double y = -gen.arena_half + 2.0 * gen.arena_half * rng.beta22();
      double z = 0.0;

      if (info.klass == VehicleClass::plane && rng.below(2) == 1) {
        b.force.floating_force_per_mass = 10.0;
        z = rng.uniform(gen.plane_z_min, gen.plane_z_max);
      }
      b.force.engine_accel = rng.below(2) == 1 ? 1.0 : 0.0;

      double yaw = std::atan2(-y, -x) +
                   rng.gaussian(0.0, gen.orientation_noise_deg * kPi / 180.0);
      b.state.position = {x, y, z};
      b.state.rotation = Rotation::from_yaw(yaw);
      double speed = gen.initial_speeds[state_of[i]];
      b.state.velocity = speed * b.state.rotation.heading();
      world.bodies.push_back(std::move(b));
    }

    // speed * heading() can land an ulp past the slow/fast boundary, so the
    // coverage guarantee is re-checked on the realized velocities.
    bool seen[3] = {false, false, false};
    for (const auto& b : world.bodies)
      seen[static_cast<int>(
          velocity_state_of(b.state.velocity.norm()))] = true;
    if (!(seen[0] && seen[1] && seen[2])) continue;

    if (placement_overlaps(world)) continue;

    SceneConfig config;
    config.seed = seed;
    if (!decisive_dynamics(config, simulate(world, config), world)) continue;
    return {std::move(world), std::move(config)};
  }
  throw Error(ErrorKind::generation_failure,
              "rejection sampling failed after max attempts (seed " +
                  std::to_string(seed) + ")");
}

WorldState apply_modification(const WorldState& initial, int object_id,
                              const std::string& property,
                              const std::string& value) {
  WorldState world = initial;
  Body& b = world.body_by_id(object_id);
  if (property == "velocity_state") {
    double speed = 0.0;
    switch (velocity_state_from_string(value)) {
      case VelocityState::static_: speed = 0.0; break;
      case VelocityState::slow: speed = 3.0; break;
      case VelocityState::fast: speed = 6.0; break;
    }
    b.state.velocity = speed * b.state.rotation.heading();
  } else if (property == "accelerating") {
    b.force.engine_accel = value == "true" ? 1.0 : 0.0;
  } else if (property == "floating") {
    if (b.spec.shape.klass != VehicleClass::plane)
      throw Error(ErrorKind::usage_error, "floating applies to planes only");
    b.force.floating_force_per_mass = value == "true" ? 10.0 : 0.0;
  } else {
    throw Error(ErrorKind::usage_error, "unknown modification: " + property);
  }
  return world;
}

CounterfactualRecord make_counterfactual(const SceneAnnotation& annotation,
                                         std::uint64_t seed) {
  if (annotation.objects.empty())
    throw Error(ErrorKind::usage_error, "annotation has no objects");
  Rng rng(seed);
  WorldState initial = initial_world(annotation);
  const Body& target =
      initial.bodies[rng.below(initial.bodies.size())];

  std::vector<std::string> properties = {"velocity_state", "accelerating"};
  if (target.spec.shape.klass == VehicleClass::plane)
    properties.push_back("floating");
  const std::string property = properties[rng.below(properties.size())];

  CounterfactualRecord rec;
  rec.object_id = target.spec.id;
  rec.property = property;
  if (property == "velocity_state") {
    VelocityState current = initial_velocity_state(target);
    std::vector<std::string> alternatives;
    for (VelocityState s :
         {VelocityState::static_, VelocityState::slow, VelocityState::fast})
      if (s != current) alternatives.push_back(to_string(s));
    rec.value = alternatives[rng.below(alternatives.size())];
  } else if (property == "accelerating") {
    rec.value = target.force.engine_accel != 0.0 ? "false" : "true";
  } else {
    rec.value = target.force.floating_force_per_mass != 0.0 ? "false" : "true";
  }

  WorldState modified =
      apply_modification(initial, rec.object_id, property, rec.value);
  rec.events = simulate(modified, annotation.config).collisions;
  return rec;
}

SceneAnnotation generate_annotation(const GeneratorConfig& gen,
                                    const std::string& scene_id,
                                    std::uint64_t seed,
                                    int n_counterfactuals) {
  GeneratedScene scene = sample_scene(gen, seed);
  SimResult sim = simulate(scene.world, scene.config);

  SceneAnnotation a;
  a.scene_id = scene_id;
  a.config = scene.config;
  for (const auto& b : scene.world.bodies)
    a.objects.push_back({b.spec, b.force});
  a.trajectories = std::move(sim.trajectories);
  a.collisions = std::move(sim.collisions);
  for (int k = 0; k < n_counterfactuals; ++k)
    a.counterfactuals.push_back(
        make_counterfactual(a, Rng::derive(seed, 0xc0cf + k)));
  return a;
}

}  // namespace dynsc
