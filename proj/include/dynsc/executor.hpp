#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "dynsc/physics.hpp"
#include "dynsc/program.hpp"
#include "dynsc/scene.hpp"

namespace dynsc {

// Classification thresholds used on smoothed dynamics.
struct ExecThresholds {
  double epsilon_motion = kEpsilonMotion;
  double accel_threshold = kAccelThreshold;
  double float_height = kFloatHeightThreshold;
  double float_vz = 0.25;
  double float_az = 1.0;
};

struct ExecAudit {
  int max_frame_read = -1;
  bool used_future_events = false;
};

struct ExecResult {
  std::string answer;
  ExecAudit audit;
};

// A scene representation (ground truth or estimated) plus everything the
// operation set needs: smoothed dynamics, the observed-horizon boundary and
// a deterministic resimulator for futureEvents and counterfactual ops.
class ExecContext {
 public:
  // Ground truth: resimulation restarts from the exact initial world.
  static ExecContext from_ground_truth(const SceneAnnotation& annotation,
                                       int horizon);
  // Estimated states: forces are inferred from the smoothed dynamics and
  // resimulation for futureEvents starts at the last observed frame.
  static ExecContext from_estimated(const SceneAnnotation& estimated,
                                    int horizon);

  const std::vector<SceneObject>& objects() const { return objects_; }
  int horizon() const { return horizon_; }
  const SceneConfig& config() const { return config_; }
  const ExecThresholds& thresholds() const { return thresholds_; }

  const SceneObject& object(int id) const;
  Vec3 position(int id, int frame, ExecAudit& audit) const;
  Rotation rotation(int id, int frame, ExecAudit& audit) const;
  Vec3 smoothed_velocity(int id, int frame, ExecAudit& audit) const;
  Vec3 smoothed_acceleration(int id, int frame, ExecAudit& audit) const;

  // Collision events with frame < horizon.
  std::vector<CollisionEvent> observed_events() const;
  // Resimulated events with frame >= horizon.
  std::vector<CollisionEvent> future_events() const;
  // Full event set of a run restarted from frame 0 with one modification.
  std::vector<CollisionEvent> counterfactual_events(
      int object_id, const std::string& property, const std::string& value) const;

  int frame_for_anchor(const nlohmann::ordered_json& frame_arg, int self_id,
                       ExecAudit& audit) const;

  // Throws domain_error outside [0, horizon).
  void check_frame(int frame) const;

 private:
  std::vector<SceneObject> objects_;
  std::vector<Trajectory> trajectories_;  // frames [0, horizon)
  std::vector<std::vector<Vec3>> smooth_vel_, smooth_acc_;
  std::vector<CollisionEvent> events_;  // all recorded events
  SceneConfig config_;
  Camera camera_;
  int horizon_ = 0;
  ExecThresholds thresholds_;

  WorldState initial_world_;        // frame-0 world for counterfactual runs
  WorldState horizon_world_;        // state at the last observed frame
  bool resim_from_initial_ = true;  // ground truth resimulates from frame 0

  mutable std::unique_ptr<std::mutex> cache_mutex_ =
      std::make_unique<std::mutex>();
  mutable std::map<std::string, std::vector<CollisionEvent>> resim_cache_;

  int index_of(int id) const;
};

// Answer serialization: Bool -> "true"/"false"; tokens verbatim.
ExecResult execute(const Program& program, const ExecContext& ctx);

}  // namespace dynsc
