#include "dynsc/executor.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <variant>

#include "dynsc/dynamics.hpp"
#include "dynsc/error.hpp"
#include "dynsc/generator.hpp"
#include "dynsc/json_io.hpp"

namespace dynsc {

namespace {

struct ObjRef { int id; };
struct FrameVal { int frame; };
using ObjSet = std::vector<int>;
using EventSet = std::vector<CollisionEvent>;

using Value = std::variant<ObjRef, ObjSet, CollisionEvent, EventSet, FrameVal,
                           bool, std::string>;

double median_of(std::vector<double> xs) {
  if (xs.empty()) return 0.0;
  std::sort(xs.begin(), xs.end());
  size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

}  // namespace

int ExecContext::index_of(int id) const {
  for (size_t i = 0; i < objects_.size(); ++i)
    if (objects_[i].spec.id == id) return static_cast<int>(i);
  throw Error(ErrorKind::domain_error, "unknown object id");
}

void ExecContext::check_frame(int frame) const {
  if (frame < 0 || frame >= horizon_)
    throw Error(ErrorKind::domain_error,
                "frame " + std::to_string(frame) + " out of range");
}

const SceneObject& ExecContext::object(int id) const {
  return objects_[index_of(id)];
}

Vec3 ExecContext::position(int id, int frame, ExecAudit& audit) const {
  check_frame(frame);
  audit.max_frame_read = std::max(audit.max_frame_read, frame);
  return trajectories_[index_of(id)].states[frame].position;
}

Rotation ExecContext::rotation(int id, int frame, ExecAudit& audit) const {
  check_frame(frame);
  audit.max_frame_read = std::max(audit.max_frame_read, frame);
  return trajectories_[index_of(id)].states[frame].rotation;
}

Vec3 ExecContext::smoothed_velocity(int id, int frame, ExecAudit& audit) const {
  check_frame(frame);
  // The smoothing window is truncated at the horizon, so the widest read is
  // still inside the observed window.
  audit.max_frame_read =
      std::max(audit.max_frame_read, std::min(frame + 2, horizon_ - 1));
  return smooth_vel_[index_of(id)][frame];
}

Vec3 ExecContext::smoothed_acceleration(int id, int frame,
                                        ExecAudit& audit) const {
  check_frame(frame);
  audit.max_frame_read =
      std::max(audit.max_frame_read, std::min(frame + 2, horizon_ - 1));
  return smooth_acc_[index_of(id)][frame];
}

std::vector<CollisionEvent> ExecContext::observed_events() const {
  std::vector<CollisionEvent> out;
  for (const auto& e : events_)
    if (e.frame < horizon_) out.push_back(e);
  return out;
}

std::vector<CollisionEvent> ExecContext::future_events() const {
  {
    std::scoped_lock lock(*cache_mutex_);
    auto it = resim_cache_.find("future");
    if (it != resim_cache_.end()) return it->second;
  }
  std::vector<CollisionEvent> result;
  if (resim_from_initial_) {
    for (const auto& e : simulate(initial_world_, config_).collisions)
      if (e.frame >= horizon_) result.push_back(e);
  } else {
    Simulator sim(horizon_world_, config_, horizon_ - 1);
    // Episodes already open at the resume point must not retrigger.
    for (const auto& m : detect_collisions(horizon_world_))
      sim.seed_contact(m.a, m.b, horizon_ - 1);
    for (const auto& e : events_)
      if (e.frame < horizon_ && e.frame > horizon_ - 1 - config_.debounce_frames)
        sim.seed_contact(e.a, e.b, e.frame);
    while (sim.frame() < config_.n_frames - 1) {
      for (const auto& e : sim.advance())
        if (e.frame >= horizon_) result.push_back(e);
    }
  }
  std::scoped_lock lock(*cache_mutex_);
  resim_cache_["future"] = result;
  return result;
}

std::vector<CollisionEvent> ExecContext::counterfactual_events(
    int object_id, const std::string& property,
    const std::string& value) const {
  std::string key = "cf:" + std::to_string(object_id) + ":" + property + ":" + value;
  {
    std::scoped_lock lock(*cache_mutex_);
    auto it = resim_cache_.find(key);
    if (it != resim_cache_.end()) return it->second;
  }
  WorldState modified =
      apply_modification(initial_world_, object_id, property, value);
  auto result = simulate(modified, config_).collisions;
  std::scoped_lock lock(*cache_mutex_);
  resim_cache_[key] = result;
  return result;
}

int ExecContext::frame_for_anchor(const nlohmann::ordered_json& frame_arg,
                                  int self_id, ExecAudit& audit) const {
  if (frame_arg.is_number_integer()) {
    int f = frame_arg.get<int>();
    check_frame(f);
    return f;
  }
  if (frame_arg.is_string()) {
    std::string s = frame_arg.get<std::string>();
    if (s == "begin") return 0;
    if (s == "end") return horizon_ - 1;
    throw Error(ErrorKind::type_error, "bad frame anchor: " + s);
  }
  if (frame_arg.is_object() && frame_arg.value("anchor", "") == "partner") {
    // "when it collides with the <color> <shape>"
    std::string color = frame_arg.at("color").get<std::string>();
    std::string shape = frame_arg.at("shape").get<std::string>();
    std::vector<int> partners;
    for (const auto& o : objects_)
      if (to_string(o.spec.color) == color && o.spec.shape.subtype == shape)
        partners.push_back(o.spec.id);
    if (partners.size() != 1)
      throw Error(ErrorKind::unique_violation,
                  "anchor descriptor matches " +
                      std::to_string(partners.size()) + " objects");
    std::optional<int> frame;
    for (const auto& e : observed_events()) {
      if (e.same_pair(self_id, partners[0])) {
        frame = frame ? std::min(*frame, e.frame) : e.frame;
      }
    }
    if (!frame)
      throw Error(ErrorKind::unanswerable, "referenced collision never happens");
    audit.max_frame_read = std::max(audit.max_frame_read, *frame);
    return *frame;
  }
  throw Error(ErrorKind::type_error, "bad frame argument");
}

namespace {

WorldState world_at(const std::vector<SceneObject>& objects,
                    const std::vector<Trajectory>& traj,
                    const std::vector<std::vector<Vec3>>& smooth_vel,
                    int frame) {
  WorldState w;
  for (size_t i = 0; i < objects.size(); ++i) {
    Body b;
    b.spec = objects[i].spec;
    b.force = objects[i].force;
    b.state = traj[i].states[frame];
    b.state.velocity = smooth_vel[i][frame];
    w.bodies.push_back(std::move(b));
  }
  return w;
}

}  // namespace

ExecContext ExecContext::from_ground_truth(const SceneAnnotation& annotation,
                                           int horizon) {
  if (horizon < 2 || horizon > annotation.config.n_frames)
    throw Error(ErrorKind::usage_error, "bad horizon");
  ExecContext ctx;
  ctx.objects_ = annotation.objects;
  ctx.horizon_ = horizon;
  ctx.config_ = annotation.config;
  ctx.camera_ = annotation.config.camera;
  ctx.events_ = annotation.collisions;
  ctx.resim_from_initial_ = true;
  ctx.initial_world_ = initial_world(annotation);

  for (const auto& t : annotation.trajectories) {
    Trajectory cut;
    cut.states.assign(t.states.begin(), t.states.begin() + horizon);
    ctx.trajectories_.push_back(std::move(cut));
  }
  for (const auto& t : ctx.trajectories_) {
    std::vector<Vec3> pos;
    for (const auto& s : t.states) pos.push_back(s.position);
    auto d = derive_dynamics(pos, ctx.config_.dt);
    ctx.smooth_vel_.push_back(std::move(d.velocity));
    ctx.smooth_acc_.push_back(std::move(d.acceleration));
  }
  ctx.horizon_world_ = world_at(ctx.objects_, ctx.trajectories_, ctx.smooth_vel_,
                                horizon - 1);
  return ctx;
}

ExecContext ExecContext::from_estimated(const SceneAnnotation& estimated,
                                        int horizon) {
  ExecContext ctx = from_ground_truth(estimated, horizon);
  ctx.resim_from_initial_ = false;

  // Force profiles are not observable; infer them from the smoothed dynamics.
  for (size_t i = 0; i < ctx.objects_.size(); ++i) {
    SceneObject& obj = ctx.objects_[i];
    std::vector<double> forward, height, vz;
    for (int f = 0; f < horizon; ++f) {
      Vec3 h = ctx.trajectories_[i].states[f].rotation.heading();
      forward.push_back(ctx.smooth_acc_[i][f].dot(h));
      height.push_back(ctx.trajectories_[i].states[f].position.z);
      vz.push_back(std::abs(ctx.smooth_vel_[i][f].z));
    }
    obj.force.engine_accel =
        median_of(forward) > ctx.thresholds_.accel_threshold ? 1.0 : 0.0;
    bool floater = obj.spec.shape.klass == VehicleClass::plane &&
                   median_of(height) > ctx.thresholds_.float_height &&
                   median_of(vz) < ctx.thresholds_.float_vz;
    obj.force.floating_force_per_mass = floater ? 10.0 : 0.0;
  }

  // Rebuild the resim start states with the inferred forces and smoothed
  // velocities.
  ctx.initial_world_ =
      world_at(ctx.objects_, ctx.trajectories_, ctx.smooth_vel_, 0);
  ctx.horizon_world_ =
      world_at(ctx.objects_, ctx.trajectories_, ctx.smooth_vel_, horizon - 1);
  return ctx;
}

namespace {

class Machine {
 public:
  Machine(const ExecContext& ctx) : ctx_(ctx) {}

  ExecResult run(const Program& program) {
    type_check(program);
    for (const auto& call : program) apply(call);
    if (stack_.size() != 1)
      throw Error(ErrorKind::type_error, "program did not reduce to one value");
    return {serialize(stack_.back()), audit_};
  }

 private:
  const ExecContext& ctx_;
  std::vector<Value> stack_;
  ExecAudit audit_;

  Value pop() {
    Value v = std::move(stack_.back());
    stack_.pop_back();
    return v;
  }

  ObjRef pop_object() {
    Value v = pop();
    if (auto* o = std::get_if<ObjRef>(&v)) return *o;
    throw Error(ErrorKind::type_error, "expected an object");
  }

  // Pops a set and an object in either stack order.
  std::pair<EventSet, ObjRef> pop_events_and_object() {
    Value top = pop(), below = pop();
    if (std::holds_alternative<ObjRef>(top))
      return {std::get<EventSet>(below), std::get<ObjRef>(top)};
    return {std::get<EventSet>(top), std::get<ObjRef>(below)};
  }

  int resolve_frame(const OpCall& call, int self_id) {
    if (!call.args.is_null() && call.args.contains("frame"))
      return ctx_.frame_for_anchor(call.args.at("frame"), self_id, audit_);
    Value v = pop();
    if (auto* f = std::get_if<FrameVal>(&v)) {
      ctx_.check_frame(f->frame);
      return f->frame;
    }
    throw Error(ErrorKind::type_error, "expected a frame");
  }

  VelocityState classify_velocity(int id, int frame) {
    double speed = ctx_.smoothed_velocity(id, frame, audit_).norm();
    if (speed <= ctx_.thresholds().epsilon_motion) return VelocityState::static_;
    return speed <= kSlowFastBoundary ? VelocityState::slow : VelocityState::fast;
  }

  bool accelerating(int id, int frame) {
    Vec3 heading = ctx_.rotation(id, frame, audit_).heading();
    return ctx_.smoothed_acceleration(id, frame, audit_).dot(heading) >
           ctx_.thresholds().accel_threshold;
  }

  bool floating(int id, int frame) {
    const auto& th = ctx_.thresholds();
    return ctx_.position(id, frame, audit_).z > th.float_height &&
           std::abs(ctx_.smoothed_velocity(id, frame, audit_).z) <= th.float_vz &&
           std::abs(ctx_.smoothed_acceleration(id, frame, audit_).z) <= th.float_az;
  }

  void filter_objects(const OpCall& call,
                      const std::function<bool(int, int)>& keep) {
    Value v = pop();
    ObjSet set = std::get<ObjSet>(v);
    int frame = resolve_frame(call, set.size() == 1 ? set[0] : -1);
    ObjSet out;
    for (int id : set)
      if (keep(id, frame)) out.push_back(id);
    stack_.push_back(std::move(out));
  }

  void apply(const OpCall& call) {
    switch (call.op) {
      case OpCode::objects: {
        ObjSet all;
        for (const auto& o : ctx_.objects()) all.push_back(o.spec.id);
        std::sort(all.begin(), all.end());
        stack_.push_back(std::move(all));
        return;
      }
      case OpCode::events: {
        EventSet evs = ctx_.observed_events();
        for (const auto& e : evs)
          audit_.max_frame_read = std::max(audit_.max_frame_read, e.frame);
        stack_.push_back(std::move(evs));
        return;
      }
      case OpCode::future_events: {
        audit_.used_future_events = true;
        stack_.push_back(ctx_.future_events());
        return;
      }
      case OpCode::filter_attributes: {
        ObjSet set = std::get<ObjSet>(pop());
        ObjSet out;
        for (int id : set) {
          const auto& o = ctx_.object(id);
          if (call.args.contains("color") &&
              to_string(o.spec.color) != call.args.at("color").get<std::string>())
            continue;
          if (call.args.contains("shape") &&
              o.spec.shape.subtype != call.args.at("shape").get<std::string>())
            continue;
          out.push_back(id);
        }
        stack_.push_back(std::move(out));
        return;
      }
      case OpCode::filter_static:
        filter_objects(call, [&](int id, int f) {
          return classify_velocity(id, f) == VelocityState::static_;
        });
        return;
      case OpCode::filter_moving_velocity: {
        VelocityState want =
            velocity_state_from_string(call.args.at("state").get<std::string>());
        filter_objects(call,
                       [&](int id, int f) { return classify_velocity(id, f) == want; });
        return;
      }
      case OpCode::filter_accelerating:
        filter_objects(call, [&](int id, int f) { return accelerating(id, f); });
        return;
      case OpCode::filter_floating:
        filter_objects(call, [&](int id, int f) { return floating(id, f); });
        return;
      case OpCode::query_attributes: {
        ObjRef o = pop_object();
        std::string attr = call.args.at("attr").get<std::string>();
        const auto& spec = ctx_.object(o.id).spec;
        if (attr == "shape") stack_.push_back(spec.shape.subtype);
        else if (attr == "color") stack_.push_back(to_string(spec.color));
        else throw Error(ErrorKind::type_error, "bad attribute: " + attr);
        return;
      }
      case OpCode::is_static: {
        ObjRef o = pop_object();
        int f = resolve_frame(call, o.id);
        stack_.push_back(classify_velocity(o.id, f) == VelocityState::static_);
        return;
      }
      case OpCode::query_moving_velocity: {
        ObjRef o = pop_object();
        int f = resolve_frame(call, o.id);
        stack_.push_back(to_string(classify_velocity(o.id, f)));
        return;
      }
      case OpCode::query_moving_direction: {
        ObjRef o = pop_object();
        int f = resolve_frame(call, o.id);
        Vec3 v = ctx_.smoothed_velocity(o.id, f, audit_);
        stack_.push_back(to_string(direction_of(v, ctx_.config().camera)));
        return;
      }
      case OpCode::is_accelerating: {
        ObjRef o = pop_object();
        int f = resolve_frame(call, o.id);
        stack_.push_back(accelerating(o.id, f));
        return;
      }
      case OpCode::is_floating: {
        ObjRef o = pop_object();
        int f = resolve_frame(call, o.id);
        stack_.push_back(floating(o.id, f));
        return;
      }
      case OpCode::get_frame: {
        Value v = pop();
        stack_.push_back(FrameVal{std::get<CollisionEvent>(v).frame});
        return;
      }
      case OpCode::come_in_frame: {
        ObjRef o = pop_object();
        for (int f = 0; f < ctx_.horizon(); ++f) {
          double u, vv;
          if (ctx_.config().camera.project(ctx_.position(o.id, f, audit_), u, vv) &&
              u >= 0 && u <= ctx_.config().camera.image_width && vv >= 0 &&
              vv <= ctx_.config().camera.image_height) {
            stack_.push_back(FrameVal{f});
            return;
          }
        }
        throw Error(ErrorKind::unanswerable, "object never enters the frame");
      }
      case OpCode::filter_collision: {
        auto [events, o] = pop_events_and_object();
        EventSet out;
        for (const auto& e : events)
          if (e.a == o.id || e.b == o.id) out.push_back(e);
        stack_.push_back(std::move(out));
        return;
      }
      case OpCode::get_all_col_partners: {
        auto [events, o] = pop_events_and_object();
        ObjSet out;
        for (const auto& e : events) {
          if (e.a == o.id) out.push_back(e.b);
          if (e.b == o.id) out.push_back(e.a);
        }
        std::sort(out.begin(), out.end());
        out.erase(std::unique(out.begin(), out.end()), out.end());
        stack_.push_back(std::move(out));
        return;
      }
      case OpCode::faster_velocity:
      case OpCode::slower_velocity: {
        ObjRef b = pop_object();
        ObjRef a = pop_object();
        int f = resolve_frame(call, a.id);
        double sa = ctx_.smoothed_velocity(a.id, f, audit_).norm();
        double sb = ctx_.smoothed_velocity(b.id, f, audit_).norm();
        stack_.push_back(call.op == OpCode::faster_velocity ? sa > sb : sa < sb);
        return;
      }
      case OpCode::counterfactual_static:
      case OpCode::counterfactual_moving_slow:
      case OpCode::counterfactual_moving_fast: {
        ObjRef o = pop_object();
        std::string value = call.op == OpCode::counterfactual_static ? "static"
                            : call.op == OpCode::counterfactual_moving_slow
                                ? "slow"
                                : "fast";
        stack_.push_back(ctx_.counterfactual_events(o.id, "velocity_state", value));
        return;
      }
      case OpCode::counterfactual_accelerating: {
        ObjRef o = pop_object();
        stack_.push_back(ctx_.counterfactual_events(o.id, "accelerating", "true"));
        return;
      }
      case OpCode::counterfactual_floating: {
        ObjRef o = pop_object();
        if (ctx_.object(o.id).spec.shape.klass != VehicleClass::plane)
          throw Error(ErrorKind::unanswerable,
                      "floating counterfactual on a non-plane");
        stack_.push_back(ctx_.counterfactual_events(o.id, "floating", "true"));
        return;
      }
      case OpCode::unique: {
        Value v = pop();
        if (auto* os = std::get_if<ObjSet>(&v)) {
          if (os->size() != 1)
            throw Error(ErrorKind::unique_violation,
                        "unique on a set of " + std::to_string(os->size()));
          stack_.push_back(ObjRef{(*os)[0]});
          return;
        }
        auto& es = std::get<EventSet>(v);
        if (es.size() != 1)
          throw Error(ErrorKind::unique_violation,
                      "unique on a set of " + std::to_string(es.size()));
        stack_.push_back(es[0]);
        return;
      }
      case OpCode::exist: {
        Value v = pop();
        if (auto* os = std::get_if<ObjSet>(&v))
          stack_.push_back(!os->empty());
        else
          stack_.push_back(!std::get<EventSet>(v).empty());
        return;
      }
      case OpCode::equal_to: {
        Value v = pop();
        stack_.push_back(serialize(v) == call.args.at("value").get<std::string>());
        return;
      }
    }
    throw Error(ErrorKind::type_error, "bad opcode");
  }

  std::string serialize(const Value& v) {
    if (auto* b = std::get_if<bool>(&v)) return *b ? "true" : "false";
    if (auto* s = std::get_if<std::string>(&v)) return *s;
    if (auto* f = std::get_if<FrameVal>(&v)) return std::to_string(f->frame);
    if (auto* o = std::get_if<ObjRef>(&v))
      return ctx_.object(o->id).spec.descriptor();
    throw Error(ErrorKind::type_error, "value is not an answer token");
  }
};

}  // namespace

ExecResult execute(const Program& program, const ExecContext& ctx) {
  Machine m(ctx);
  return m.run(program);
}

}  // namespace dynsc
