#include "dynsc/json_io.hpp"

#include "dynsc/error.hpp"

namespace dynsc {

json to_json(const Vec3& v) { return json{{"x", v.x}, {"y", v.y}, {"z", v.z}}; }

Vec3 vec3_from_json(const json& j) {
  return {j.at("x").get<double>(), j.at("y").get<double>(),
          j.at("z").get<double>()};
}

json to_json(const Rotation& r) {
  return json::array({r.w(), r.x(), r.y(), r.z()});
}

Rotation rotation_from_json(const json& j) {
  return Rotation(j.at(0).get<double>(), j.at(1).get<double>(),
                  j.at(2).get<double>(), j.at(3).get<double>());
}

json to_json(const Camera& c) {
  return json{{"position", to_json(c.position)},
              {"look_at", to_json(c.look_at)},
              {"fov_deg", c.fov_deg},
              {"image_width", c.image_width},
              {"image_height", c.image_height}};
}

Camera camera_from_json(const json& j) {
  Camera c;
  c.position = vec3_from_json(j.at("position"));
  c.look_at = vec3_from_json(j.at("look_at"));
  c.fov_deg = j.at("fov_deg").get<double>();
  c.image_width = j.at("image_width").get<int>();
  c.image_height = j.at("image_height").get<int>();
  return c;
}

json to_json(const SceneConfig& c) {
  return json{{"gravity", c.gravity},
              {"dt", c.dt},
              {"n_frames", c.n_frames},
              {"friction_object", c.friction_object},
              {"friction_floor", c.friction_floor},
              {"restitution", c.restitution},
              {"arena_radius", c.arena_radius},
              {"seed", c.seed},
              {"debounce_frames", c.debounce_frames},
              {"camera", to_json(c.camera)}};
}

SceneConfig scene_config_from_json(const json& j) {
  SceneConfig c;
  c.gravity = j.at("gravity").get<double>();
  c.dt = j.at("dt").get<double>();
  c.n_frames = j.at("n_frames").get<int>();
  c.friction_object = j.at("friction_object").get<double>();
  c.friction_floor = j.at("friction_floor").get<double>();
  c.restitution = j.at("restitution").get<double>();
  c.arena_radius = j.at("arena_radius").get<double>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.debounce_frames = j.at("debounce_frames").get<int>();
  c.camera = camera_from_json(j.at("camera"));
  return c;
}

json to_json(const SceneObject& o) {
  return json{{"id", o.spec.id},
              {"shape",
               {{"class", to_string(o.spec.shape.klass)},
                {"subtype", o.spec.shape.subtype}}},
              {"color", to_string(o.spec.color)},
              {"proxy_extents", to_json(o.spec.proxy_extents)},
              {"volume", o.spec.volume()},
              {"mass", mass_of(o.spec)},
              {"engine_accel", o.force.engine_accel},
              {"floating_force_per_mass", o.force.floating_force_per_mass}};
}

SceneObject scene_object_from_json(const json& j) {
  SceneObject o;
  o.spec.id = j.at("id").get<int>();
  o.spec.shape = shape_from_subtype(j.at("shape").at("subtype").get<std::string>());
  o.spec.color = color_from_string(j.at("color").get<std::string>());
  o.spec.proxy_extents = vec3_from_json(j.at("proxy_extents"));
  o.force.engine_accel = j.at("engine_accel").get<double>();
  o.force.floating_force_per_mass =
      j.at("floating_force_per_mass").get<double>();
  return o;
}

json to_json(const DynamicState& s) {
  return json{{"position", to_json(s.position)},
              {"rotation", to_json(s.rotation)},
              {"velocity", to_json(s.velocity)},
              {"acceleration", to_json(s.acceleration)}};
}

DynamicState dynamic_state_from_json(const json& j) {
  DynamicState s;
  s.position = vec3_from_json(j.at("position"));
  s.rotation = rotation_from_json(j.at("rotation"));
  s.velocity = vec3_from_json(j.at("velocity"));
  s.acceleration = vec3_from_json(j.at("acceleration"));
  return s;
}

json to_json(const CollisionEvent& e) {
  json j{{"frame", e.frame}, {"pair", json::array({e.a, e.b})}};
  if (e.contact_point) j["contact_point"] = to_json(*e.contact_point);
  if (e.impulse_magnitude) j["impulse_magnitude"] = *e.impulse_magnitude;
  return j;
}

CollisionEvent collision_event_from_json(const json& j) {
  CollisionEvent e;
  e.frame = j.at("frame").get<int>();
  e.a = j.at("pair").at(0).get<int>();
  e.b = j.at("pair").at(1).get<int>();
  if (j.contains("contact_point"))
    e.contact_point = vec3_from_json(j.at("contact_point"));
  if (j.contains("impulse_magnitude"))
    e.impulse_magnitude = j.at("impulse_magnitude").get<double>();
  return e;
}

json to_json(const CounterfactualRecord& r) {
  json events = json::array();
  for (const auto& e : r.events) events.push_back(to_json(e));
  return json{{"object_id", r.object_id},
              {"property", r.property},
              {"value", r.value},
              {"events", events}};
}

CounterfactualRecord counterfactual_from_json(const json& j) {
  CounterfactualRecord r;
  r.object_id = j.at("object_id").get<int>();
  r.property = j.at("property").get<std::string>();
  r.value = j.at("value").get<std::string>();
  for (const auto& e : j.at("events")) r.events.push_back(collision_event_from_json(e));
  return r;
}

json to_json(const SceneAnnotation& a) {
  json objects = json::array();
  for (const auto& o : a.objects) objects.push_back(to_json(o));
  json trajectories = json::array();
  for (const auto& t : a.trajectories) {
    json states = json::array();
    for (const auto& s : t.states) states.push_back(to_json(s));
    trajectories.push_back(json{{"states", std::move(states)}});
  }
  json collisions = json::array();
  for (const auto& e : a.collisions) collisions.push_back(to_json(e));
  json counterfactuals = json::array();
  for (const auto& c : a.counterfactuals) counterfactuals.push_back(to_json(c));
  return json{{"scene_id", a.scene_id},
              {"objects", std::move(objects)},
              {"trajectories", std::move(trajectories)},
              {"collisions", std::move(collisions)},
              {"counterfactuals", std::move(counterfactuals)},
              {"config", to_json(a.config)}};
}

SceneAnnotation annotation_from_json(const json& j) {
  SceneAnnotation a;
  a.scene_id = j.at("scene_id").get<std::string>();
  for (const auto& o : j.at("objects")) a.objects.push_back(scene_object_from_json(o));
  for (const auto& t : j.at("trajectories")) {
    Trajectory traj;
    for (const auto& s : t.at("states"))
      traj.states.push_back(dynamic_state_from_json(s));
    a.trajectories.push_back(std::move(traj));
  }
  for (const auto& e : j.at("collisions"))
    a.collisions.push_back(collision_event_from_json(e));
  for (const auto& c : j.at("counterfactuals"))
    a.counterfactuals.push_back(counterfactual_from_json(c));
  a.config = scene_config_from_json(j.at("config"));
  return a;
}

WorldState initial_world(const SceneAnnotation& a) {
  if (a.trajectories.size() != a.objects.size())
    throw Error(ErrorKind::invalid_spec, "trajectories do not match objects");
  WorldState w;
  for (size_t i = 0; i < a.objects.size(); ++i) {
    if (a.trajectories[i].states.empty())
      throw Error(ErrorKind::invalid_spec, "empty trajectory");
    Body b;
    b.spec = a.objects[i].spec;
    b.force = a.objects[i].force;
    b.state = a.trajectories[i].states.front();
    w.bodies.push_back(std::move(b));
  }
  return w;
}

}  // namespace dynsc
