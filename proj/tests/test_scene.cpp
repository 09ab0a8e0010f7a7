#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "dynsc/error.hpp"
#include "dynsc/scene.hpp"

using namespace dynsc;

TEST_CASE("subtype registry holds 21 unique subtypes across five classes") {
  const auto& reg = subtype_registry();
  CHECK(reg.size() == 21);
  std::set<std::string> names;
  std::set<VehicleClass> classes;
  for (const auto& s : reg) {
    names.insert(s.name);
    classes.insert(s.klass);
    CHECK(s.half_extents.x > 0);
    CHECK(s.half_extents.y > 0);
    CHECK(s.half_extents.z > 0);
  }
  CHECK(names.size() == 21);
  CHECK(classes.size() == 5);
  CHECK(subtype_info("suv").klass == VehicleClass::car);
  CHECK_THROWS_AS(subtype_info("hovercraft"), Error);
}

TEST_CASE("answer vocabulary is the closed token set") {
  const auto& vocab = answer_vocabulary();
  // 21 subtypes + 8 colors + 6 directions + true/false
  CHECK(vocab.size() == 37);
  std::set<std::string> uniq(vocab.begin(), vocab.end());
  CHECK(uniq.size() == vocab.size());
  CHECK(in_answer_vocabulary("true"));
  CHECK(in_answer_vocabulary("false"));
  CHECK(in_answer_vocabulary("cyan"));
  CHECK(in_answer_vocabulary("mountain bike"));
  CHECK(in_answer_vocabulary("left"));
  CHECK(!in_answer_vocabulary("42"));
  CHECK(!in_answer_vocabulary(""));
}

TEST_CASE("color names round-trip") {
  for (Color c : all_colors()) CHECK(color_from_string(to_string(c)) == c);
  CHECK_THROWS_AS(color_from_string("magenta"), Error);
}

TEST_CASE("mass is density times proxy volume") {
  ObjectSpec spec;
  spec.shape = shape_from_subtype("sedan");
  spec.proxy_extents = {1.1, 0.45, 0.4};
  double vol = 8.0 * 1.1 * 0.45 * 0.4;
  CHECK(std::abs(spec.volume() - vol) <= 1e-12);
  CHECK(std::abs(mass_of(spec) - kDensity * vol) <= 1e-12);
  spec.proxy_extents = {0, 1, 1};
  CHECK_THROWS_AS(mass_of(spec), Error);
}

TEST_CASE("descriptor is color followed by subtype") {
  ObjectSpec spec;
  spec.shape = shape_from_subtype("road bike");
  spec.color = Color::purple;
  CHECK(spec.descriptor() == "purple road bike");
}

TEST_CASE("velocity state boundaries: zero static, 3 m/s is still slow") {
  CHECK(velocity_state_of(0.0) == VelocityState::static_);
  CHECK(velocity_state_of(0.01) == VelocityState::slow);
  CHECK(velocity_state_of(kSlowFastBoundary) == VelocityState::slow);
  CHECK(velocity_state_of(kSlowFastBoundary + 1e-9) == VelocityState::fast);
  CHECK_THROWS_AS(velocity_state_of(-1.0), Error);
}

TEST_CASE("direction labels use the camera frame with x>y>z tie priority") {
  Camera cam;  // at (0,-14,5) looking at the origin
  CHECK(direction_of({1, 0, 0}, cam) == Direction::right);
  CHECK(direction_of({-1, 0, 0}, cam) == Direction::left);
  CHECK(direction_of({0, 0, 1}, cam) == Direction::up);
  CHECK(direction_of({0, 0, -1}, cam) == Direction::down);
  CHECK(direction_of({0, 1, 0}, cam) == Direction::back);
  CHECK(direction_of({0, -1, 0}, cam) == Direction::front);
  // below the motion epsilon the direction is unanswerable
  CHECK_THROWS_AS(direction_of({0.05, 0, 0}, cam), Error);
}

TEST_CASE("wrap_angle maps into (-pi, pi]") {
  CHECK(std::abs(wrap_angle(3 * M_PI) - M_PI) <= 1e-12);
  CHECK(std::abs(wrap_angle(-3 * M_PI) - M_PI) <= 1e-12);
  CHECK(std::abs(wrap_angle(0.25)) - 0.25 <= 1e-12);
  CHECK(wrap_angle(M_PI) == doctest::Approx(M_PI));
}

TEST_CASE("rotations canonicalize sign and recover yaw") {
  Rotation r = Rotation::from_yaw(2.0);
  CHECK(std::abs(r.yaw() - 2.0) <= 1e-12);
  Rotation neg(-r.w(), -r.x(), -r.y(), -r.z());
  CHECK(neg == r);
  Vec3 h = Rotation::from_yaw(M_PI / 2).heading();
  CHECK(std::abs(h.x) <= 1e-12);
  CHECK(std::abs(h.y - 1.0) <= 1e-12);
}
