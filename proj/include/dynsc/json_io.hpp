#pragma once

#include <nlohmann/json.hpp>

#include "dynsc/physics.hpp"
#include "dynsc/scene.hpp"

namespace dynsc {

using json = nlohmann::ordered_json;

json to_json(const Vec3& v);
Vec3 vec3_from_json(const json& j);

json to_json(const Rotation& r);  // [w, x, y, z]
Rotation rotation_from_json(const json& j);

json to_json(const Camera& c);
Camera camera_from_json(const json& j);

json to_json(const SceneConfig& c);
SceneConfig scene_config_from_json(const json& j);

json to_json(const SceneObject& o);
SceneObject scene_object_from_json(const json& j);

json to_json(const DynamicState& s);
DynamicState dynamic_state_from_json(const json& j);

json to_json(const CollisionEvent& e);
CollisionEvent collision_event_from_json(const json& j);

json to_json(const CounterfactualRecord& r);
CounterfactualRecord counterfactual_from_json(const json& j);

json to_json(const SceneAnnotation& a);
SceneAnnotation annotation_from_json(const json& j);

// Initial world (frame 0) reconstructed from the annotation. Used by
// counterfactual replay and ground-truth resimulation.
WorldState initial_world(const SceneAnnotation& a);

}  // namespace dynsc
