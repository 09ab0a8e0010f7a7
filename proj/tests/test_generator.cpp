#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "dynsc/generator.hpp"
#include "dynsc/json_io.hpp"

using namespace dynsc;

TEST_CASE("sampled scenes satisfy the placement and identity invariants") {
  GeneratorConfig gen;
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    GeneratedScene s = sample_scene(gen, seed);
    int n = (int)s.world.bodies.size();
    CHECK(n >= gen.min_objects);
    CHECK(n <= gen.max_objects);

    std::set<std::pair<std::string, std::string>> identities;
    bool has_static = false, has_slow = false, has_fast = false;
    for (const auto& b : s.world.bodies) {
      identities.insert({b.spec.shape.subtype, to_string(b.spec.color)});
      double speed = b.state.velocity.norm();
      VelocityState vs = velocity_state_of(speed);
      has_static |= vs == VelocityState::static_;
      has_slow |= vs == VelocityState::slow;
      has_fast |= vs == VelocityState::fast;
      CHECK(std::abs(b.state.position.x) <= gen.arena_half);
      CHECK(std::abs(b.state.position.y) <= gen.arena_half);
      bool is_plane = b.spec.shape.klass == VehicleClass::plane;
      if (!is_plane) CHECK(b.state.position.z == 0.0);
    }
    CHECK(identities.size() == (size_t)n);  // unique (shape, color) pairs
    CHECK(has_static);
    CHECK(has_slow);
    CHECK(has_fast);
    CHECK(detect_collisions(s.world).empty());  // no initial interpenetration
  }
}

TEST_CASE("sample_scene is deterministic in the seed") {
  GeneratorConfig gen;
  GeneratedScene a = sample_scene(gen, 42);
  GeneratedScene b = sample_scene(gen, 42);
  REQUIRE(a.world.bodies.size() == b.world.bodies.size());
  for (size_t i = 0; i < a.world.bodies.size(); ++i) {
    CHECK(a.world.bodies[i].state.position.x ==
          b.world.bodies[i].state.position.x);
    CHECK(a.world.bodies[i].state.velocity.y ==
          b.world.bodies[i].state.velocity.y);
    CHECK(a.world.bodies[i].spec.shape.subtype ==
          b.world.bodies[i].spec.shape.subtype);
  }
  GeneratedScene c = sample_scene(gen, 43);
  bool differs = a.world.bodies.size() != c.world.bodies.size();
  for (size_t i = 0; !differs && i < a.world.bodies.size(); ++i)
    differs = a.world.bodies[i].state.position.x !=
              c.world.bodies[i].state.position.x;
  CHECK(differs);
}

TEST_CASE("annotations carry full trajectories and decisive events") {
  GeneratorConfig gen;
  int scenes_with_events = 0;
  for (std::uint64_t seed : {1ull, 9ull, 23ull}) {
    SceneAnnotation a = generate_annotation(gen, "scene-x", seed);
    REQUIRE(!a.objects.empty());
    REQUIRE(a.trajectories.size() == a.objects.size());
    for (const auto& t : a.trajectories)
      CHECK((int)t.states.size() == a.config.n_frames);

    if (!a.collisions.empty()) ++scenes_with_events;
    for (const auto& e : a.collisions) {
      CHECK(e.a < e.b);
      // events land well inside the observed window, away from both ends
      CHECK(e.frame >= 20);
      CHECK(e.frame <= a.config.n_frames - 20);
      REQUIRE(e.impulse_magnitude.has_value());
      CHECK(*e.impulse_magnitude >= 3.0);
    }
  }
  CHECK(scenes_with_events >= 2);
}

TEST_CASE("annotation JSON round-trips losslessly") {
  SceneAnnotation a = generate_annotation(GeneratorConfig{}, "scene-rt", 7);
  json j = to_json(a);
  SceneAnnotation b = annotation_from_json(j);
  CHECK(to_json(b) == j);
  CHECK(b.scene_id == "scene-rt");
  CHECK(b.collisions.size() == a.collisions.size());
  CHECK(b.counterfactuals.size() == a.counterfactuals.size());
}

TEST_CASE("recorded counterfactuals replay to the same event list") {
  GeneratorConfig gen;
  SceneAnnotation a = generate_annotation(gen, "scene-cf", 11, 3);
  REQUIRE(a.counterfactuals.size() == 3);
  WorldState initial = initial_world(a);
  for (const auto& cf : a.counterfactuals) {
    WorldState mod =
        apply_modification(initial, cf.object_id, cf.property, cf.value);
    SimResult sim = simulate(mod, a.config);
    CHECK(sim.collisions == cf.events);
    // the modification must actually change the named property
    const Body& before = initial.body_by_id(cf.object_id);
    const Body& after = mod.body_by_id(cf.object_id);
    if (cf.property == "velocity_state") {
      CHECK(to_string(velocity_state_of(after.state.velocity.norm())) ==
            cf.value);
      CHECK(velocity_state_of(after.state.velocity.norm()) !=
            velocity_state_of(before.state.velocity.norm()));
    } else if (cf.property == "accelerating") {
      CHECK((after.force.engine_accel > 0) == (cf.value == "true"));
    } else if (cf.property == "floating") {
      CHECK((after.force.floating_force_per_mass > 0) == (cf.value == "true"));
    }
  }
}

TEST_CASE("apply_modification rejects unknown properties and values") {
  SceneAnnotation a = generate_annotation(GeneratorConfig{}, "scene-bad", 3);
  WorldState w = initial_world(a);
  int id = a.objects[0].spec.id;
  CHECK_THROWS(apply_modification(w, id, "mass", "heavy"));
  CHECK_THROWS(apply_modification(w, id, "velocity_state", "warp"));
  CHECK_THROWS(apply_modification(w, 999, "velocity_state", "fast"));
}

TEST_CASE("initial_world reconstructs frame zero exactly") {
  SceneAnnotation a = generate_annotation(GeneratorConfig{}, "scene-iw", 19);
  WorldState w = initial_world(a);
  SimResult sim = simulate(w, a.config);
  REQUIRE(sim.trajectories.size() == a.trajectories.size());
  for (size_t i = 0; i < a.trajectories.size(); ++i) {
    for (int t = 0; t < a.config.n_frames; ++t) {
      CHECK(sim.trajectories[i].states[t].position.x ==
            a.trajectories[i].states[t].position.x);
      CHECK(sim.trajectories[i].states[t].velocity.z ==
            a.trajectories[i].states[t].velocity.z);
    }
  }
  CHECK(sim.collisions == a.collisions);
}
