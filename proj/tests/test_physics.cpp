#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynsc/physics.hpp"

using namespace dynsc;

namespace {

Body make_body(int id, const Vec3& pos, const Vec3& vel,
               const Vec3& half_extents = {0.5, 0.5, 0.5}) {
  Body b;
  b.spec.id = id;
  b.spec.shape = shape_from_subtype("suv");
  b.spec.color = Color::red;
  b.spec.proxy_extents = half_extents;
  b.state.position = pos;
  b.state.velocity = vel;
  return b;
}

SceneConfig no_external_forces() {
  SceneConfig c;
  c.gravity = 0.0;
  c.friction_object = 0.0;
  c.friction_floor = 0.0;
  return c;
}

}  // namespace

TEST_CASE("two-body momentum is conserved with external forces off") {
  WorldState w;
  w.bodies.push_back(make_body(0, {-3, 0, 0}, {4, 0, 0}));
  w.bodies.push_back(make_body(1, {3, 0, 0}, {-2, 0, 0}));
  SceneConfig cfg = no_external_forces();
  cfg.n_frames = 120;

  double m0 = mass_of(w.bodies[0].spec);
  double m1 = mass_of(w.bodies[1].spec);
  Vec3 p0 = w.bodies[0].state.velocity * m0 + w.bodies[1].state.velocity * m1;

  SimResult sim = simulate(w, cfg);
  REQUIRE(sim.collisions.size() >= 1);
  for (int t = 0; t < cfg.n_frames; ++t) {
    Vec3 p = sim.trajectories[0].states[t].velocity * m0 +
             sim.trajectories[1].states[t].velocity * m1;
    CHECK(std::abs(p.x - p0.x) <= 1e-9 * std::max(1.0, std::abs(p0.x)));
    CHECK(std::abs(p.y - p0.y) <= 1e-9);
    CHECK(std::abs(p.z - p0.z) <= 1e-9);
  }
}

TEST_CASE("head-on equal-mass impact at restitution 0.5 maps +-3 to -+1.5") {
  Vec3 v1{3, 0, 0}, v2{-3, 0, 0};
  double inv_m = 1.0 / 5.0;
  double impulse = resolve_collision(v1, inv_m, v2, inv_m, {1, 0, 0}, 0.5);
  CHECK(impulse > 0.0);
  CHECK(std::abs(v1.x - (-1.5)) <= 1e-9);
  CHECK(std::abs(v2.x - 1.5) <= 1e-9);
  CHECK(v1.y == 0.0);
  CHECK(v2.y == 0.0);
}

TEST_CASE("separating contacts produce zero impulse") {
  Vec3 v1{-1, 0, 0}, v2{1, 0, 0};
  double impulse = resolve_collision(v1, 1.0, v2, 1.0, {1, 0, 0}, 0.5);
  CHECK(impulse == 0.0);
  CHECK(v1.x == -1.0);
  CHECK(v2.x == 1.0);
}

TEST_CASE("free fall matches the semi-implicit Euler closed form") {
  SceneConfig cfg;  // gravity 10, dt 1/60
  cfg.n_frames = 61;
  WorldState w;
  w.bodies.push_back(make_body(0, {0, 0, 10}, {0, 0, 0}, {0.2, 0.2, 0.2}));
  SimResult sim = simulate(w, cfg);

  int N = 60;
  double expected =
      10.0 - cfg.gravity * cfg.dt * cfg.dt * (double(N) * (N + 1) / 2.0);
  // drop = 10 * (1/3600) * 60*61/2 = 61/12 = 5.083333...
  CHECK(std::abs((10.0 - expected) - 61.0 / 12.0) <= 1e-12);
  CHECK(std::abs(sim.trajectories[0].states[N].position.z - expected) <= 1e-9);
}

TEST_CASE("a floating plane holds its height to 1e-9 over 120 frames") {
  SceneConfig cfg;
  cfg.n_frames = 120;
  Body plane = make_body(0, {0, 0, 3.0}, {1, 0, 0});
  plane.spec.shape = shape_from_subtype("airliner");
  plane.spec.proxy_extents = subtype_info("airliner").half_extents;
  plane.force.floating_force_per_mass = cfg.gravity;
  WorldState w;
  w.bodies.push_back(plane);

  SimResult sim = simulate(w, cfg);
  for (int t = 0; t < cfg.n_frames; ++t)
    CHECK(std::abs(sim.trajectories[0].states[t].position.z - 3.0) <= 1e-9);
}

TEST_CASE("obb_contact is a strict-overlap test") {
  Vec3 ext{1, 1, 1};
  Rotation r;
  // clear overlap
  auto hit = obb_contact({0, 0, 0}, r, ext, {1.5, 0, 0}, r, ext);
  REQUIRE(hit.has_value());
  CHECK(hit->depth > 0.0);
  CHECK(std::abs(hit->normal.norm() - 1.0) <= 1e-12);
  // touching at zero gap is not a contact
  CHECK(!obb_contact({0, 0, 0}, r, ext, {2.0, 0, 0}, r, ext).has_value());
  // separated
  CHECK(!obb_contact({0, 0, 0}, r, ext, {2.5, 0, 0}, r, ext).has_value());
  // rotated by 45 degrees the diagonal reaches past the gap
  CHECK(obb_contact({0, 0, 0}, Rotation::from_yaw(M_PI / 4), ext, {2.2, 0, 0},
                    r, ext)
            .has_value());
}

TEST_CASE("boxes sit on the floor: grounded body is centered hz above z=0") {
  Rotation r;
  // positions are floor anchor points; the box spans [z, z + 2*hz]
  auto hit = obb_contact({0, 0, 0}, r, {1, 1, 0.5}, {0, 0, 0.9}, r, {1, 1, 0.5});
  CHECK(hit.has_value());
  CHECK(!obb_contact({0, 0, 0}, r, {1, 1, 0.5}, {0, 0, 1.1}, r, {1, 1, 0.5})
             .has_value());
}

TEST_CASE("simulate emits n_frames states starting from the initial state") {
  SceneConfig cfg;
  cfg.n_frames = 37;
  WorldState w;
  w.bodies.push_back(make_body(0, {1, 2, 0}, {0.5, 0, 0}));
  SimResult sim = simulate(w, cfg);
  REQUIRE(sim.trajectories.size() == 1);
  CHECK((int)sim.trajectories[0].states.size() == cfg.n_frames);
  CHECK(sim.trajectories[0].states[0].position.x == 1.0);
  CHECK(sim.trajectories[0].states[0].velocity.x == 0.5);
}

TEST_CASE("collision events are debounced per pair and canonically ordered") {
  WorldState w;
  w.bodies.push_back(make_body(1, {-2, 0, 0}, {3, 0, 0}));
  w.bodies.push_back(make_body(0, {2, 0, 0}, {-3, 0, 0}));
  SceneConfig cfg = no_external_forces();
  cfg.n_frames = 120;
  SimResult sim = simulate(w, cfg);
  REQUIRE(!sim.collisions.empty());
  for (size_t i = 0; i < sim.collisions.size(); ++i) {
    CHECK(sim.collisions[i].a < sim.collisions[i].b);
    if (i > 0) {
      CHECK(sim.collisions[i].frame - sim.collisions[i - 1].frame >=
            cfg.debounce_frames);
    }
  }
  // a persistent resting contact opens exactly one episode
  WorldState rest;
  rest.bodies.push_back(make_body(0, {0, 0, 0}, {0.4, 0, 0}));
  rest.bodies.push_back(make_body(2, {1.2, 0, 0}, {0, 0, 0}));
  SceneConfig slow = no_external_forces();
  slow.restitution = 0.0;
  slow.n_frames = 120;
  SimResult rsim = simulate(rest, slow);
  int pair_events = 0;
  for (const auto& e : rsim.collisions)
    if (e.same_pair(0, 2)) ++pair_events;
  CHECK(pair_events == 1);
}

TEST_CASE("engine acceleration integrates along the heading") {
  SceneConfig cfg;
  cfg.n_frames = 61;
  Body b = make_body(0, {0, 0, 0}, {2, 0, 0});
  b.force.engine_accel = 1.0;
  WorldState w;
  w.bodies.push_back(b);
  SimResult sim = simulate(w, cfg);
  // v_N = v_0 + a * dt * N along +x, no losses while engine is on
  double v60 = sim.trajectories[0].states[60].velocity.x;
  CHECK(std::abs(v60 - 3.0) <= 1e-9);
}

TEST_CASE("Simulator resumes mid-run without double counting episodes") {
  WorldState w;
  w.bodies.push_back(make_body(0, {-2, 0, 0}, {3, 0, 0}));
  w.bodies.push_back(make_body(1, {2, 0, 0}, {-3, 0, 0}));
  SceneConfig cfg = no_external_forces();
  cfg.n_frames = 120;

  Simulator full(w, cfg);
  std::vector<CollisionEvent> all;
  WorldState mid;
  for (int t = 1; t < cfg.n_frames; ++t) {
    auto ev = full.advance();
    all.insert(all.end(), ev.begin(), ev.end());
    if (t == 60) mid = full.world();
  }
  REQUIRE(!all.empty());

  Simulator resumed(mid, cfg, 60);
  for (const auto& e : all)
    if (e.frame <= 60) resumed.seed_contact(e.a, e.b, e.frame);
  std::vector<CollisionEvent> tail;
  for (int t = 61; t < cfg.n_frames; ++t) {
    auto ev = resumed.advance();
    tail.insert(tail.end(), ev.begin(), ev.end());
  }
  std::vector<CollisionEvent> expected;
  for (const auto& e : all)
    if (e.frame > 60) expected.push_back(e);
  CHECK(tail == expected);
}
