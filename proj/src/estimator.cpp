#include "dynsc/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "dynsc/dynamics.hpp"
#include "dynsc/error.hpp"
#include "dynsc/physics.hpp"
#include "dynsc/rng.hpp"

namespace dynsc {

namespace {
// minimum box penetration (m) for an estimated contact; rejects overlaps
// produced by residual observation noise
constexpr double kEstMinPeakDepth = 0.05;
constexpr int kEstSmoothWindow = 9;
}  // namespace

ObservationSequence synthesize_observations(const SceneAnnotation& annotation,
                                            const NoiseModel& noise) {
  if (noise.sigma_obs < 0 || noise.sigma_rot < 0 || noise.p_drop < 0 ||
      noise.p_drop >= 1)
    throw Error(ErrorKind::invalid_spec, "bad noise model");
  ObservationSequence seq;
  seq.scene_id = annotation.scene_id;
  seq.config = annotation.config;
  for (const auto& o : annotation.objects) seq.objects.push_back(o.spec);

  Rng rng(noise.seed);
  for (int f = 0; f < annotation.config.n_frames; ++f) {
    ObservationFrame frame;
    frame.frame = f;
    for (size_t i = 0; i < annotation.objects.size(); ++i) {
      const DynamicState& gt = annotation.trajectories[i].states[f];
      ObsEntry e;
      e.id = annotation.objects[i].spec.id;
      // frame 0 stays visible: the filter initializes from it
      bool dropped = rng.u01() < noise.p_drop && f > 0;
      e.visible = !dropped;
      if (e.visible) {
        e.position = gt.position + Vec3{rng.gaussian(0, noise.sigma_obs),
                                        rng.gaussian(0, noise.sigma_obs),
                                        rng.gaussian(0, noise.sigma_obs)};
        e.yaw = wrap_angle(gt.rotation.yaw() + rng.gaussian(0, noise.sigma_rot));
      } else {
        // keep the stream position-independent of dropped draws
        rng.gaussian(0, 1);
        rng.gaussian(0, 1);
        rng.gaussian(0, 1);
        rng.gaussian(0, 1);
      }
      frame.observations.push_back(e);
    }
    seq.frames.push_back(std::move(frame));
  }
  return seq;
}

namespace {

json spec_to_json(const ObjectSpec& s) {
  json j;
  j["id"] = s.id;
  j["class"] = to_string(s.shape.klass);
  j["subtype"] = s.shape.subtype;
  j["color"] = to_string(s.color);
  j["proxy_extents"] = to_json(s.proxy_extents);
  return j;
}

ObjectSpec spec_from_json(const json& j) {
  ObjectSpec s;
  s.id = j.at("id").get<int>();
  s.shape = shape_from_subtype(j.at("subtype").get<std::string>());
  s.color = color_from_string(j.at("color").get<std::string>());
  s.proxy_extents = vec3_from_json(j.at("proxy_extents"));
  return s;
}

}  // namespace

std::string observations_to_jsonl(const ObservationSequence& seq) {
  std::ostringstream out;
  json meta;
  meta["scene_id"] = seq.scene_id;
  meta["config"] = to_json(seq.config);
  meta["objects"] = json::array();
  for (const auto& s : seq.objects) meta["objects"].push_back(spec_to_json(s));
  out << meta.dump() << "\n";
  for (const auto& f : seq.frames) {
    json j;
    j["frame"] = f.frame;
    j["observations"] = json::array();
    for (const auto& e : f.observations) {
      json oj;
      oj["id"] = e.id;
      oj["visible"] = e.visible;
      if (e.visible) {
        oj["position"] = to_json(e.position);
        oj["yaw"] = e.yaw;
      }
      j["observations"].push_back(std::move(oj));
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

ObservationSequence observations_from_jsonl(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  ObservationSequence seq;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    json j = json::parse(line);
    if (!have_meta) {
      seq.scene_id = j.at("scene_id").get<std::string>();
      seq.config = scene_config_from_json(j.at("config"));
      for (const auto& oj : j.at("objects"))
        seq.objects.push_back(spec_from_json(oj));
      have_meta = true;
      continue;
    }
    ObservationFrame f;
    f.frame = j.at("frame").get<int>();
    for (const auto& oj : j.at("observations")) {
      ObsEntry e;
      e.id = oj.at("id").get<int>();
      e.visible = oj.at("visible").get<bool>();
      if (e.visible) {
        e.position = vec3_from_json(oj.at("position"));
        e.yaw = oj.at("yaw").get<double>();
      }
      f.observations.push_back(e);
    }
    seq.frames.push_back(std::move(f));
  }
  if (!have_meta)
    throw Error(ErrorKind::io_error, "observation stream has no meta line");
  return seq;
}

namespace {

// ---------------------------------------------------------------------------
// Trajectory-level MAP refinement.
//
// The simulator is a known deterministic map from an initial world to the
// full trajectory, so once the sequential filter has produced a coarse track
// the initial pose, velocity and force profile of every object are refit by
// direct pattern search on the joint observation likelihood of the
// *resimulated* scene. Collision events are then read off the refit
// simulation, which localizes them far more precisely than per-frame
// geometry can under noise.

struct RefineResult {
  WorldState world;
  SimResult sim;
};

RefineResult refine_scene(const ObservationSequence& obs,
                          const std::vector<ObjectSpec>& specs,
                          const std::vector<std::vector<Vec3>>& post_pos,
                          const std::vector<std::vector<double>>& post_yaw,
                          const EstimatorConfig& cfg) {
  const int n_frames = obs.config.n_frames;
  const size_t n = specs.size();

  // per-object visible observations, in spec order
  std::vector<std::vector<int>> ot(n);
  std::vector<std::vector<Vec3>> op(n);
  std::vector<std::vector<double>> oy(n);
  for (int t = 0; t < n_frames; ++t) {
    for (const auto& e : obs.frames[t].observations) {
      if (!e.visible) continue;
      for (size_t i = 0; i < n; ++i) {
        if (specs[i].id != e.id) continue;
        ot[i].push_back(t);
        op[i].push_back(e.position);
        oy[i].push_back(e.yaw);
        break;
      }
    }
  }

  long long evals = 0;

  // Loss of a single body simulated alone against its own observations over
  // the first `horizon` frames.
  auto obj_window_loss = [&](size_t i, const Body& body, int horizon) -> double {
    ++evals;
    SceneConfig c = obs.config;
    c.n_frames = horizon;
    WorldState w;
    w.bodies.push_back(body);
    try {
      SimResult sim = simulate(w, c);
      double e = 0.0;
      for (size_t k = 0; k < ot[i].size() && ot[i][k] < horizon; ++k) {
        const DynamicState& s = sim.trajectories[0].states[ot[i][k]];
        Vec3 d = s.position - op[i][k];
        e += d.dot(d) / cfg.sigma_obs_sq;
        double dy = wrap_angle(s.rotation.yaw() - oy[i][k]);
        e += dy * dy / cfg.sigma_rot_sq;
      }
      return e;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  // Joint loss over the first `horizon` frames only; the simulation itself is
  // truncated there, so short horizons are cheap.
  auto sse_window = [&](const WorldState& w0, int horizon) -> double {
    ++evals;
    SceneConfig c = obs.config;
    c.n_frames = horizon;
    try {
      SimResult sim = simulate(w0, c);
      double e = 0.0;
      for (size_t i = 0; i < n; ++i) {
        for (size_t k = 0; k < ot[i].size() && ot[i][k] < horizon; ++k) {
          const DynamicState& s = sim.trajectories[i].states[ot[i][k]];
          Vec3 d = s.position - op[i][k];
          e += d.dot(d) / cfg.sigma_obs_sq;
          double dy = wrap_angle(s.rotation.yaw() - oy[i][k]);
          e += dy * dy / cfg.sigma_rot_sq;
        }
      }
      return e;
    } catch (const Error&) {
      return std::numeric_limits<double>::infinity();
    }
  };
  auto sse = [&](const WorldState& w0) { return sse_window(w0, n_frames); };

  // Initial guess: least-squares line over the first frames of the filter
  // posterior gives pose and velocity; forces start from dynamics inference.
  const int fit_span = std::max(2, std::min(12, n_frames));
  WorldState world;
  std::vector<bool> aerial(n, false);
  for (size_t i = 0; i < n; ++i) {
    Body b;
    b.spec = specs[i];
    double tm = (fit_span - 1) / 2.0;
    Vec3 pm{}, slope_num{};
    double den = 0.0;
    for (int t = 0; t < fit_span; ++t) pm = pm + post_pos[i][t];
    pm = (1.0 / fit_span) * pm;
    for (int t = 0; t < fit_span; ++t) {
      double dt_c = (t - tm) * obs.config.dt;
      slope_num = slope_num + dt_c * (post_pos[i][t] - pm);
      den += dt_c * dt_c;
    }
    Vec3 v0 = (1.0 / den) * slope_num;
    Vec3 x0 = pm - (tm * obs.config.dt) * v0;

    // airborne start: noise-averaged height of the first frames above the
    // float threshold (grounded objects keep z = 0, v_z = 0 fixed)
    double z_head = 0.0;
    const int head = std::min<int>(8, post_pos[i].size());
    for (int t = 0; t < head; ++t) z_head += post_pos[i][t].z;
    z_head /= head;
    aerial[i] = z_head > kFloatHeightThreshold;
    double zmin = 1e9;
    for (const Vec3& p : post_pos[i]) zmin = std::min(zmin, p.z);
    b.state.position = {x0.x, x0.y, aerial[i] ? x0.z : 0.0};
    b.state.velocity = {v0.x, v0.y, aerial[i] ? v0.z : 0.0};

    double y0 = post_yaw[i][0], acc = 0.0;
    for (int t = 0; t < fit_span; ++t) acc += wrap_angle(post_yaw[i][t] - y0);
    double yaw0 = wrap_angle(y0 + acc / fit_span);
    b.state.rotation = Rotation::from_yaw(yaw0);

    if (aerial[i] && b.spec.shape.klass == VehicleClass::plane &&
        zmin > kFloatHeightThreshold)
      b.force.floating_force_per_mass = 10.0;
    // forward acceleration above threshold over the middle of the clip
    DerivedDynamics dd = derive_dynamics(post_pos[i], obs.config.dt, cfg.window);
    std::vector<double> fwd;
    for (int t = cfg.window; t < n_frames - cfg.window; ++t)
      fwd.push_back(dd.acceleration[t].dot(Rotation::from_yaw(post_yaw[i][t])
                                               .heading()));
    if (!fwd.empty()) {
      std::nth_element(fwd.begin(), fwd.begin() + fwd.size() / 2, fwd.end());
      if (fwd[fwd.size() / 2] > kAccelThreshold) b.force.engine_accel = 1.0;
    }
    world.bodies.push_back(std::move(b));
  }

  struct Param {
    size_t obj;
    int kind;  // 0 x, 1 y, 2 z, 3 yaw, 4 vx, 5 vy, 6 vz
    double step;
  };
  auto params_for = [&](size_t body_index, size_t spec_index) {
    std::vector<Param> ps;
    ps.push_back({body_index, 0, 0.15});
    ps.push_back({body_index, 1, 0.15});
    if (aerial[spec_index]) ps.push_back({body_index, 2, 0.15});
    ps.push_back({body_index, 3, 0.08});
    ps.push_back({body_index, 4, 0.4});
    ps.push_back({body_index, 5, 0.4});
    if (aerial[spec_index]) ps.push_back({body_index, 6, 0.4});
    return ps;
  };
  auto adjust = [](WorldState& w, const Param& p, double delta) {
    Body& b = w.bodies[p.obj];
    switch (p.kind) {
      case 0: b.state.position.x += delta; break;
      case 1: b.state.position.y += delta; break;
      case 2: b.state.position.z += delta; break;
      case 3:
        b.state.rotation =
            Rotation::from_yaw(wrap_angle(b.state.rotation.yaw() + delta));
        break;
      case 4: b.state.velocity.x += delta; break;
      case 5: b.state.velocity.y += delta; break;
      case 6: b.state.velocity.z += delta; break;
    }
  };

  // Compass pattern search with step halving and greedy extension along any
  // accepted move. Deterministic: fixed parameter order, strict improvement.
  auto search = [&](WorldState& w, double& best,
                    const std::vector<Param>& ps,
                    const std::function<double(const WorldState&)>& f,
                    long long budget) {
    const long long stop = evals + budget;
    double shrink = 1.0;
    while (evals < stop) {
      bool improved = false;
      for (const auto& p : ps) {
        for (double sgn : {1.0, -1.0}) {
          WorldState cand = w;
          adjust(cand, p, sgn * p.step * shrink);
          double e = f(cand);
          if (e + 1e-12 < best) {
            w = std::move(cand);
            best = e;
            improved = true;
            while (evals < stop) {  // greedy extension along the move
              WorldState more = w;
              adjust(more, p, sgn * p.step * shrink);
              double e2 = f(more);
              if (e2 + 1e-12 >= best) break;
              w = std::move(more);
              best = e2;
            }
            break;
          }
        }
      }
      if (!improved) {
        shrink *= 0.5;
        if (shrink < 0.02) break;
      }
    }
  };
  // Toggles the discrete force profile of every body; returns true if any
  // toggle lowered the objective.
  auto flip_forces = [&](WorldState& w, double& best,
                         const std::function<double(const WorldState&)>& f) {
    bool any = false;
    const double span = obs.config.n_frames * obs.config.dt;
    for (size_t k = 0; k < w.bodies.size(); ++k) {
      WorldState cand = w;
      Body& cb = cand.bodies[k];
      double eng_delta = cb.force.engine_accel != 0.0 ? -1.0 : 1.0;
      cb.force.engine_accel += eng_delta;
      // keep the clip-average displacement unchanged so the toggle is judged
      // on trajectory shape, not on a bulk offset the velocity fit absorbs
      cb.state.velocity = cb.state.velocity -
                          (eng_delta * span / 2.0) * cb.state.rotation.heading();
      double e = f(cand);
      if (e + 1e-12 < best) {
        w = std::move(cand);
        best = e;
        any = true;
      }
      if (w.bodies[k].spec.shape.klass == VehicleClass::plane) {
        WorldState fc = w;
        Body& fb = fc.bodies[k];
        fb.force.floating_force_per_mass =
            fb.force.floating_force_per_mass != 0.0 ? 0.0 : 10.0;
        e = f(fc);
        if (e + 1e-12 < best) {
          w = std::move(fc);
          best = e;
          any = true;
        }
      }
    }
    return any;
  };

  const bool dbg = std::getenv("DYNSC_DEBUG_REFINE") != nullptr;

  // Stage A: each object alone over an early window that is too short to
  // contain inter-object collisions, pinning down initial pose and velocity.
  // Force flags are left to stage B — their displacement inside the window
  // is below the noise floor anyway.
  const int head_window = std::min(20, n_frames);
  for (size_t i = 0; i < n; ++i) {
    WorldState w1;
    w1.bodies.push_back(world.bodies[i]);
    auto f1 = [&](const WorldState& w) {
      return obj_window_loss(i, w.bodies[0], head_window);
    };
    double loss = f1(w1);
    search(w1, loss, params_for(0, i), f1, 1500);
    world.bodies[i] = w1.bodies[0];
    if (dbg)
      std::fprintf(stderr, "[refine] stage A obj %zu loss %.1f\n", i, loss);
  }

  // Stage B: joint refinement with a growing horizon. Every refit starts
  // near the optimum of the previous, shorter one, so collisions entering
  // the window occur close to their true frames and the fit tracks them
  // instead of jumping basins.
  std::vector<Param> params;
  for (size_t i = 0; i < n; ++i)
    for (const Param& p : params_for(i, i)) params.push_back(p);
  std::vector<int> schedule;
  for (int h = n_frames / 4; h < n_frames; h += n_frames / 8)
    schedule.push_back(h);
  schedule.push_back(n_frames);
  schedule.push_back(n_frames);  // second full-horizon pass escapes plateaus
  for (int horizon : schedule) {
    if (horizon <= head_window) continue;
    auto f = [&](const WorldState& w) { return sse_window(w, horizon); };
    double best = f(world);
    if (dbg)
      std::fprintf(stderr, "[refine] stage B h=%d init sse %.1f\n", horizon, best);
    for (int round = 0; round < 3; ++round) {
      search(world, best, params, f, horizon == n_frames ? 10000 : 6000);
      bool any_flip = flip_forces(world, best, f);
      if (dbg)
        std::fprintf(stderr, "[refine] h=%d round %d sse %.1f evals %lld flip=%d\n",
                     horizon, round, best, evals, int(any_flip));
      if (!any_flip) break;
    }
  }

  RefineResult r;
  r.sim = simulate(world, obs.config);
  r.world = std::move(world);
  return r;
}

}  // namespace

double fuse_map(double prior_mean, double sigma_prior_sq, double obs,
                double sigma_obs_sq) {
  if (sigma_prior_sq <= 0 || sigma_obs_sq <= 0)
    throw Error(ErrorKind::domain_error, "fusion variances must be positive");
  double wp = 1.0 / sigma_prior_sq, wo = 1.0 / sigma_obs_sq;
  return (prior_mean * wp + obs * wo) / (wp + wo);
}

std::vector<ObjectSpec> classify_static_attributes(
    const ObservationSequence& obs, const AttributeHook& hook) {
  if (hook) return hook(obs);
  if (obs.objects.empty())
    throw Error(ErrorKind::tracking_error,
                "observation stream carries no identity labels and no "
                "classifier hook is registered");
  return obs.objects;
}

EstimatedScene track_scene(const ObservationSequence& obs,
                           const EstimatorConfig& config) {
  if (config.window < 1 || config.window % 2 == 0)
    throw Error(ErrorKind::invalid_spec, "smoothing window must be odd");
  const int n_frames = obs.config.n_frames;
  if (static_cast<int>(obs.frames.size()) != n_frames)
    throw Error(ErrorKind::io_error, "observation stream frame count mismatch");
  const auto specs = classify_static_attributes(obs);
  const size_t n = specs.size();

  auto entry_for = [&](int frame, int id) -> const ObsEntry& {
    for (const auto& e : obs.frames[frame].observations)
      if (e.id == id) return e;
    throw Error(ErrorKind::tracking_error,
                "object " + std::to_string(id) + " missing from frame " +
                    std::to_string(frame));
  };

  std::vector<std::vector<Vec3>> pos(n);
  std::vector<std::vector<double>> yaw(n);
  std::vector<CollisionEvent> events;
  std::vector<FusionDiagnostic> diags;

  // Frame 0: raw observation (with no history the MAP state maximizes the
  // observation likelihood alone).
  for (size_t i = 0; i < n; ++i) {
    const ObsEntry& e = entry_for(0, specs[i].id);
    if (!e.visible)
      throw Error(ErrorKind::tracking_error,
                  "object " + std::to_string(specs[i].id) +
                      " unobserved at frame 0");
    pos[i].push_back(e.position);
    yaw[i].push_back(e.yaw);
  }

  const double w_obs = (1.0 / config.sigma_obs_sq) /
                       (1.0 / config.sigma_prior_sq + 1.0 / config.sigma_obs_sq);

  for (int t = 1; t < n_frames; ++t) {
    // Predict: one physics step from the previous posterior, driven by the
    // online-smoothed derived velocities.
    WorldState world;
    for (size_t i = 0; i < n; ++i) {
      Body b;
      b.spec = specs[i];
      b.state.position = pos[i].back();
      b.state.rotation = Rotation::from_yaw(yaw[i].back());
      // one-frame history carries no velocity information yet
      b.state.velocity =
          pos[i].size() < 2
              ? Vec3{}
              : derive_dynamics(pos[i], obs.config.dt, config.window)
                    .velocity.back();
      world.bodies.push_back(std::move(b));
    }
    step(world, obs.config);

    // Fuse per object.
    for (size_t i = 0; i < n; ++i) {
      Vec3 mu = world.bodies[i].state.position;
      double mu_yaw = world.bodies[i].state.rotation.yaw();
      const ObsEntry& e = entry_for(t, specs[i].id);
      FusionDiagnostic d;
      d.frame = t;
      d.object_id = specs[i].id;
      d.prior_mean = mu;
      Vec3 posterior = mu;
      double yaw_post = mu_yaw;
      if (e.visible) {
        d.observation = e.position;
        posterior = {
            fuse_map(mu.x, config.sigma_prior_sq, e.position.x, config.sigma_obs_sq),
            fuse_map(mu.y, config.sigma_prior_sq, e.position.y, config.sigma_obs_sq),
            fuse_map(mu.z, config.sigma_prior_sq, e.position.z, config.sigma_obs_sq)};
        yaw_post = wrap_angle(mu_yaw + w_obs * wrap_angle(e.yaw - mu_yaw));
      }
      d.posterior = posterior;
      diags.push_back(d);
      pos[i].push_back(posterior);
      yaw[i].push_back(yaw_post);
    }

  }

  // Collision extraction runs offline on centered-smoothed posteriors.
  // Residual per-frame noise smears a single true contact into a run of
  // grazing overlaps, so overlaps are grouped per pair into episodes
  // (runs separated by at most debounce_frames), each episode yields one
  // event at its frame of maximum penetration depth, and shallow episodes
  // whose peak depth never exceeds the noise floor are rejected.
  std::vector<std::vector<Vec3>> smoothed(n);
  for (size_t i = 0; i < n; ++i)
    smoothed[i] = moving_average(pos[i], kEstSmoothWindow);
  struct Episode {
    int peak_frame = -1;
    double peak_depth = 0.0;
    int last_frame = -1;
    Vec3 point;
  };
  std::map<std::pair<int, int>, Episode> open;
  auto flush = [&](const std::pair<int, int>& key, const Episode& ep) {
    if (ep.peak_depth < kEstMinPeakDepth) return;
    CollisionEvent e;
    e.frame = ep.peak_frame;
    e.a = key.first;
    e.b = key.second;
    e.contact_point = ep.point;
    events.push_back(e);
  };
  for (int t = 1; t < n_frames; ++t) {
    WorldState world;
    for (size_t i = 0; i < n; ++i) {
      Body b;
      b.spec = specs[i];
      b.state.position = smoothed[i][t];
      b.state.rotation = Rotation::from_yaw(yaw[i][t]);
      world.bodies.push_back(std::move(b));
    }
    // close episodes whose pair has been out of contact for the debounce span
    for (auto it = open.begin(); it != open.end();) {
      if (t - it->second.last_frame > obs.config.debounce_frames) {
        flush(it->first, it->second);
        it = open.erase(it);
      } else {
        ++it;
      }
    }
    for (const auto& c : detect_collisions(world)) {
      std::pair<int, int> key = std::minmax(c.a, c.b);
      Episode& ep = open[key];
      ep.last_frame = t;
      if (c.depth > ep.peak_depth) {
        ep.peak_depth = c.depth;
        ep.peak_frame = t;
        ep.point = c.point;
      }
    }
  }
  for (const auto& [key, ep] : open) flush(key, ep);
  std::sort(events.begin(), events.end(), [](const CollisionEvent& a,
                                             const CollisionEvent& b) {
    return a.frame != b.frame ? a.frame < b.frame
                              : std::tie(a.a, a.b) < std::tie(b.a, b.b);
  });

  EstimatedScene out;
  out.diagnostics = std::move(diags);
  out.annotation.scene_id = obs.scene_id;
  out.annotation.config = obs.config;

  if (config.physics_refine) {
    RefineResult r = refine_scene(obs, specs, pos, yaw, config);
    for (size_t i = 0; i < n; ++i)
      out.annotation.objects.push_back({specs[i], r.world.bodies[i].force});
    out.annotation.trajectories = std::move(r.sim.trajectories);
    out.annotation.collisions = std::move(r.sim.collisions);
    return out;
  }

  for (size_t i = 0; i < n; ++i) {
    SceneObject so;
    so.spec = specs[i];  // forces left zero: not observable
    out.annotation.objects.push_back(so);
    Trajectory traj;
    auto d = derive_dynamics(pos[i], obs.config.dt, config.window);
    for (int t = 0; t < n_frames; ++t) {
      DynamicState s;
      s.position = pos[i][t];
      s.rotation = Rotation::from_yaw(yaw[i][t]);
      s.velocity = d.velocity[t];
      s.acceleration = d.acceleration[t];
      if (!s.finite())
        throw Error(ErrorKind::simulation_diverged, "estimate diverged");
      traj.states.push_back(s);
    }
    out.annotation.trajectories.push_back(std::move(traj));
  }
  out.annotation.collisions = std::move(events);
  return out;
}

TrackDiagnostics evaluate_track(const EstimatedScene& estimated,
                                const SceneAnnotation& ground_truth,
                                int frame_tolerance) {
  TrackDiagnostics d;
  double sq_sum = 0.0;
  size_t count = 0;
  for (size_t i = 0; i < ground_truth.objects.size(); ++i) {
    int id = ground_truth.objects[i].spec.id;
    const Trajectory& est = estimated.annotation.trajectory_by_id(id);
    const Trajectory& gt = ground_truth.trajectories[i];
    for (size_t f = 0; f < gt.states.size(); ++f) {
      Vec3 err = est.states[f].position - gt.states[f].position;
      sq_sum += err.dot(err);
      ++count;
    }
  }
  d.position_rmse = count ? std::sqrt(sq_sum / static_cast<double>(count)) : 0.0;

  // Greedy pair + frame-window matching, nearest frame first.
  std::vector<bool> est_used(estimated.annotation.collisions.size(), false);
  int tp = 0;
  for (const auto& g : ground_truth.collisions) {
    int best = -1, best_gap = frame_tolerance + 1;
    for (size_t k = 0; k < estimated.annotation.collisions.size(); ++k) {
      const auto& e = estimated.annotation.collisions[k];
      if (est_used[k] || !e.same_pair(g.a, g.b)) continue;
      int gap = std::abs(e.frame - g.frame);
      if (gap <= frame_tolerance && gap < best_gap) {
        best = static_cast<int>(k);
        best_gap = gap;
      }
    }
    if (best >= 0) {
      est_used[best] = true;
      ++tp;
    }
  }
  size_t n_est = estimated.annotation.collisions.size();
  size_t n_gt = ground_truth.collisions.size();
  d.collision_precision = n_est ? static_cast<double>(tp) / n_est : 1.0;
  d.collision_recall = n_gt ? static_cast<double>(tp) / n_gt : 1.0;
  double pr = d.collision_precision + d.collision_recall;
  d.collision_f1 = pr > 0 ? 2 * d.collision_precision * d.collision_recall / pr
                          : 0.0;
  return d;
}

}  // namespace dynsc
