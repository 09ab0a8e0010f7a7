#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "dynsc/json_io.hpp"
#include "dynsc/scene.hpp"

namespace dynsc {

struct NoiseModel {
  double sigma_obs = 0.3;   // m, per axis
  double sigma_rot = 0.05;  // rad, yaw
  double p_drop = 0.2;      // per object-frame
  std::uint64_t seed = 0;
};

struct ObsEntry {
  int id = 0;
  bool visible = false;
  Vec3 position;     // meaningless when invisible
  double yaw = 0.0;
};

struct ObservationFrame {
  int frame = 0;
  std::vector<ObsEntry> observations;
};

// The synthetic stand-in for a detection front end: labeled per-frame poses.
struct ObservationSequence {
  std::string scene_id;
  SceneConfig config;
  std::vector<ObjectSpec> objects;  // declared identity labels
  std::vector<ObservationFrame> frames;
};

// GT pose + independent Gaussian noise; each object-frame dropped with
// probability p_drop, except frame 0 which stays fully visible so the filter
// can initialize.
ObservationSequence synthesize_observations(const SceneAnnotation& annotation,
                                            const NoiseModel& noise);

// One frame per line, preceded by a meta line.
std::string observations_to_jsonl(const ObservationSequence& seq);
ObservationSequence observations_from_jsonl(const std::string& text);

struct EstimatorConfig {
  double sigma_prior_sq = 3.0;   // m^2, isotropic position prior variance
  double sigma_obs_sq = 0.09;    // m^2 (0.3 m default test setting)
  double sigma_rot_sq = 0.0025;  // rad^2, yaw observation variance
  int window = 5;                // smoothing window, odd
  // Refit initial states + forces so the resimulated scene maximizes the
  // joint observation likelihood (trajectory-level MAP under the physics
  // prior); disabled for the observation-only baseline.
  bool physics_refine = true;
  std::uint64_t seed = 0;
};

// Closed-form maximizer of the product of two Gaussians.
double fuse_map(double prior_mean, double sigma_prior_sq, double obs,
                double sigma_obs_sq);

struct FusionDiagnostic {
  int frame = 0;
  int object_id = 0;
  Vec3 prior_mean;
  std::optional<Vec3> observation;
  Vec3 posterior;
};

struct EstimatedScene {
  // SceneAnnotation-compatible so the executor consumes GT and estimates
  // interchangeably; forces are left zero (not observable).
  SceneAnnotation annotation;
  std::vector<FusionDiagnostic> diagnostics;
};

// Sequential single-hypothesis filter: frame 0 = raw observation, then one
// physics-engine prediction step (with online-smoothed velocities) fused with
// the observation per object. Estimated collisions come from the prediction
// contacts, debounced like the simulator's.
EstimatedScene track_scene(const ObservationSequence& obs,
                           const EstimatorConfig& config);

// Identity labels pass through; a registered hook may override them.
using AttributeHook =
    std::function<std::vector<ObjectSpec>(const ObservationSequence&)>;
std::vector<ObjectSpec> classify_static_attributes(
    const ObservationSequence& obs, const AttributeHook& hook = nullptr);

struct TrackDiagnostics {
  double position_rmse = 0.0;
  double collision_precision = 0.0;
  double collision_recall = 0.0;
  double collision_f1 = 0.0;
};

// Pair + frame-within-±5 greedy event matching against ground truth.
TrackDiagnostics evaluate_track(const EstimatedScene& estimated,
                                const SceneAnnotation& ground_truth,
                                int frame_tolerance = 5);

}  // namespace dynsc
