#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dynsc/dynamics.hpp"
#include "dynsc/error.hpp"
#include "dynsc/estimator.hpp"
#include "dynsc/generator.hpp"
#include "dynsc/rng.hpp"

using namespace dynsc;

TEST_CASE("fuse_map solves the worked Gaussian-product example") {
  // prior N(1, 3), observation z = 4 with variance 1 -> posterior mean 3.25
  CHECK(std::abs(fuse_map(1.0, 3.0, 4.0, 1.0) - 3.25) <= 1e-12);
}

TEST_CASE("fuse_map is the precision-weighted convex combination") {
  Rng rng(77);
  for (int k = 0; k < 200; ++k) {
    double mu = rng.uniform(-10, 10);
    double sp = rng.uniform(0.05, 5.0);
    double z = rng.uniform(-10, 10);
    double so = rng.uniform(0.05, 5.0);
    double fused = fuse_map(mu, sp, z, so);
    double expected = (mu / sp + z / so) / (1.0 / sp + 1.0 / so);
    CHECK(std::abs(fused - expected) <= 1e-12);
    // always between the prior mean and the observation
    CHECK(fused >= std::min(mu, z) - 1e-12);
    CHECK(fused <= std::max(mu, z) + 1e-12);
  }
  // degenerate variances are rejected
  CHECK_THROWS_AS(fuse_map(0, 0, 0, 1), Error);
  CHECK_THROWS_AS(fuse_map(0, 1, 0, -1), Error);
}

TEST_CASE("moving_average is a centered window-5 box filter") {
  std::vector<double> impulse(11, 0.0);
  impulse[5] = 1.0;
  std::vector<double> out = moving_average(impulse, 5);
  REQUIRE(out.size() == impulse.size());
  for (int i = 0; i < 11; ++i) {
    double expected = (i >= 3 && i <= 7) ? 0.2 : 0.0;
    CHECK(std::abs(out[i] - expected) <= 1e-12);
  }
}

TEST_CASE("derive_dynamics recovers a constant acceleration") {
  double dt = 1.0 / 60.0, a0 = 2.5;
  std::vector<Vec3> pos;
  for (int k = 0; k <= 100; ++k) {
    double t = k * dt;
    pos.push_back({0.5 * a0 * t * t, 0.0, 0.0});
  }
  DerivedDynamics d = derive_dynamics(pos, dt);
  for (int k = 10; k <= 90; ++k)
    CHECK(std::abs(d.acceleration[k].x - a0) <= 1e-6);
}

TEST_CASE("noiseless observations track back to the ground truth") {
  SceneAnnotation gt = generate_annotation(GeneratorConfig{}, "scene-e0", 6);
  NoiseModel clean;
  clean.sigma_obs = 0.0;
  clean.sigma_rot = 0.0;
  clean.p_drop = 0.0;
  ObservationSequence obs = synthesize_observations(gt, clean);
  EstimatorConfig cfg;
  EstimatedScene est = track_scene(obs, cfg);

  REQUIRE(est.annotation.trajectories.size() == gt.trajectories.size());
  double max_err = 0.0;
  for (size_t i = 0; i < gt.trajectories.size(); ++i)
    for (int t = 0; t < gt.config.n_frames; ++t)
      max_err = std::max(max_err,
                         (est.annotation.trajectories[i].states[t].position -
                          gt.trajectories[i].states[t].position)
                             .norm());
  CHECK(max_err <= 0.1);  // pattern-search tolerance, not machine precision
  REQUIRE(est.annotation.collisions.size() == gt.collisions.size());
  for (size_t k = 0; k < gt.collisions.size(); ++k) {
    CHECK(est.annotation.collisions[k].same_pair(gt.collisions[k].a,
                                                 gt.collisions[k].b));
    CHECK(std::abs(est.annotation.collisions[k].frame -
                   gt.collisions[k].frame) <= 1);
  }
  TrackDiagnostics d = evaluate_track(est, gt);
  CHECK(d.collision_f1 == 1.0);
  CHECK(d.position_rmse <= 0.05);
}

TEST_CASE("frame zero stays fully visible under dropout") {
  SceneAnnotation gt = generate_annotation(GeneratorConfig{}, "scene-e1", 6);
  NoiseModel noisy;
  noisy.p_drop = 0.9;
  noisy.seed = 3;
  ObservationSequence obs = synthesize_observations(gt, noisy);
  REQUIRE(!obs.frames.empty());
  CHECK(obs.frames[0].frame == 0);
  for (const auto& e : obs.frames[0].observations) CHECK(e.visible);
  // later frames actually drop
  int dropped = 0, total = 0;
  for (size_t f = 1; f < obs.frames.size(); ++f)
    for (const auto& e : obs.frames[f].observations) {
      ++total;
      dropped += e.visible ? 0 : 1;
    }
  CHECK(dropped > total / 2);
}

TEST_CASE("observation JSONL round-trips") {
  SceneAnnotation gt = generate_annotation(GeneratorConfig{}, "scene-e2", 14);
  NoiseModel noise;
  noise.seed = 5;
  ObservationSequence obs = synthesize_observations(gt, noise);
  ObservationSequence rt = observations_from_jsonl(observations_to_jsonl(obs));
  CHECK(rt.scene_id == obs.scene_id);
  REQUIRE(rt.frames.size() == obs.frames.size());
  for (size_t f = 0; f < obs.frames.size(); ++f) {
    REQUIRE(rt.frames[f].observations.size() ==
            obs.frames[f].observations.size());
    for (size_t i = 0; i < obs.frames[f].observations.size(); ++i) {
      const auto& a = obs.frames[f].observations[i];
      const auto& b = rt.frames[f].observations[i];
      CHECK(a.visible == b.visible);
      if (a.visible) {
        CHECK(a.position.x == b.position.x);
        CHECK(a.yaw == b.yaw);
      }
    }
  }
}

TEST_CASE("physics refinement beats the observation-only baseline") {
  GeneratorConfig gen;
  double rmse_prior = 0.0, rmse_base = 0.0;
  double f1_prior = 0.0, f1_base = 0.0;
  int n_scenes = 4;
  for (int s = 0; s < n_scenes; ++s) {
    SceneAnnotation gt =
        generate_annotation(gen, "scene-ab" + std::to_string(s), 200 + s);
    NoiseModel noise;
    noise.seed = Rng::derive(9, s);
    ObservationSequence obs = synthesize_observations(gt, noise);

    EstimatorConfig with_prior;
    EstimatorConfig baseline;
    baseline.physics_refine = false;
    baseline.sigma_prior_sq = 1e12;

    TrackDiagnostics dp = evaluate_track(track_scene(obs, with_prior), gt);
    TrackDiagnostics db = evaluate_track(track_scene(obs, baseline), gt);
    rmse_prior += dp.position_rmse;
    rmse_base += db.position_rmse;
    f1_prior += dp.collision_f1;
    f1_base += db.collision_f1;
  }
  CHECK(rmse_prior < rmse_base);
  CHECK(f1_prior >= f1_base);
  CHECK(rmse_prior / n_scenes < 0.3 * 2);  // sanity bound, sigma_obs = 0.3
}

TEST_CASE("track_scene is deterministic") {
  SceneAnnotation gt = generate_annotation(GeneratorConfig{}, "scene-e3", 30);
  NoiseModel noise;
  noise.seed = 11;
  ObservationSequence obs = synthesize_observations(gt, noise);
  EstimatorConfig cfg;
  EstimatedScene a = track_scene(obs, cfg);
  EstimatedScene b = track_scene(obs, cfg);
  CHECK(to_json(a.annotation) == to_json(b.annotation));
}
