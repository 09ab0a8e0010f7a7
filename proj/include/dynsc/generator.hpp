#pragma once

#include <cstdint>

#include "dynsc/physics.hpp"
#include "dynsc/scene.hpp"

namespace dynsc {

struct GeneratorConfig {
  int min_objects = 3;
  int max_objects = 6;
  double arena_half = 8.0;        // Beta(2,2) placement over [-half, half]^2
  double plane_z_min = 1.0;       // airborne plane height range
  double plane_z_max = 5.0;
  double orientation_noise_deg = 15.0;  // around the face-center heading
  double initial_speeds[3] = {0.0, 3.0, 6.0};
  int max_attempts = 200;  // rejection sampling budget per scene
};

struct GeneratedScene {
  WorldState world;
  SceneConfig config;
};

// Samples initial placements, attributes and dynamics. Guarantees: unique
// (shape, color) pairs, no initial overlap, and at least one object in each
// velocity state.
GeneratedScene sample_scene(const GeneratorConfig& gen, std::uint64_t seed);

// Picks one object and one initial property, assigns a different value and
// re-simulates; the record carries the resulting collision events.
CounterfactualRecord make_counterfactual(const SceneAnnotation& annotation,
                                         std::uint64_t seed);

// Initial world with one counterfactual modification applied.
WorldState apply_modification(const WorldState& initial, int object_id,
                              const std::string& property,
                              const std::string& value);

// Full annotation for one scene: simulate, then attach counterfactual records.
SceneAnnotation generate_annotation(const GeneratorConfig& gen,
                                    const std::string& scene_id,
                                    std::uint64_t seed,
                                    int n_counterfactuals = 2);

}  // namespace dynsc
