// Copyright 2026 The vlmtest Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vlmtest/harness/harness.hpp"

#include "checks.hpp"
#include "vlmtest/simworld/world.hpp"

#include <cmath>
#include <random>

namespace vlmtest::harness
{

namespace
{

namespace topic
{
constexpr const char * frame = "sim/frame";
constexpr const char * ego = "sim/ego";
constexpr const char * detections = "autonomy/detections";
constexpr const char * localization = "autonomy/localization";
constexpr const char * behaviors_raw = "autonomy/behaviors";
constexpr const char * perception = "midlayer/perception";
constexpr const char * vehicle_state = "midlayer/vehicle_state";
constexpr const char * behaviors = "midlayer/behaviors";
constexpr const char * command = "midlayer/command";
constexpr const char * state_vector = "midlayer/state_vector";
constexpr const char * prompt = "interface/prompt";
constexpr const char * reply = "agents/reply";
constexpr const char * action = "interface/action";
constexpr const char * plan = "midlayer/plan";
}  // namespace topic

enum Module : std::size_t
{
  kPrompt,
  kAction,
  kSpeech,
  kVision,
  kLocalization,
  kPlanning,
  kSelection,
  kRefinement
};

std::string module(Module m) { return std::string(kModuleNames[m]); }

enum Stream : std::uint64_t
{
  kSensorStream = 1,
  kLocalizationStream = 2
};

simworld::Rng make_stream(std::uint64_t seed, Stream stream)
{
  std::seed_seq seq{
    static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
    static_cast<std::uint32_t>(stream)};
  return simworld::Rng(seq);
}

// Rough working-set size of a module output, for the memory share.
std::size_t bytes_of(const autonomy::Trajectory & t)
{
  return sizeof(t) + t.behavior_id.size() + t.waypoints.size() * sizeof(autonomy::Waypoint) +
         t.kappa.size() * sizeof(double);
}

std::size_t bytes_of(const autonomy::BehaviorSet & b)
{
  std::size_t n = sizeof(b);
  for (const auto & x : b.behaviors) {
    n += bytes_of(x.trajectory) + sizeof(x);
  }
  return n;
}

std::size_t bytes_of(const midlayer::PerceptionFeed & f)
{
  std::size_t n = sizeof(f) + f.frame_tag.size() + f.detections.items.size() * sizeof(autonomy::Detection);
  for (const auto & s : f.summary) {
    n += sizeof(s) + s.size();
  }
  return n;
}

bool agent_is_async(AgentMode mode, const agents::Agent & agent)
{
  switch (mode) {
    case AgentMode::sync:
      return false;
    case AgentMode::async:
      return true;
    case AgentMode::automatic:
      return agent.kind() == "remote";
  }
  return false;
}

class Loop
{
public:
  Loop(const ScenarioSpec & spec, agents::Agent & agent, const RunOptions & opt)
  : spec_(spec),
    agent_(agent),
    cfg_(opt.config),
    seed_(opt.seed.value_or(spec.seed)),
    cadence_(opt.cadence.value_or(spec.cadence)),
    duration_(opt.duration.value_or(spec.duration)),
    async_(agent_is_async(cfg_.agent_mode, agent)),
    sensor_rng_(make_stream(seed_, kSensorStream)),
    loc_rng_(make_stream(seed_, kLocalizationStream)),
    worker_(agent)
  {
    if (!(duration_ > 0.0)) {
      throw ScenarioError("duration", "must be positive");
    }
    if (!(cadence_ > 0.0)) {
      throw ScenarioError("agent_cadence", "must be positive");
    }
    n_ticks_ = to_ticks(duration_, "duration");
    agent_ticks_ = to_ticks(cadence_, "agent_cadence");
    if (agent_ticks_ < 1) {
      throw ScenarioError("agent_cadence", "shorter than one tick");
    }
    midlayer::validate_ranges(cfg_.ranges);

    log_.meta = RunMeta{spec.name, spec.source_path, seed_, agent.kind(), async_ ? "async" : "sync", cadence_, duration_};

    bus_.register_topic<simworld::SensorFrame>(topic::frame);
    bus_.register_topic<simworld::EgoState>(topic::ego);
    bus_.register_topic<autonomy::DetectionSet>(topic::detections);
    bus_.register_topic<autonomy::VehicleState>(topic::localization);
    bus_.register_topic<autonomy::BehaviorSet>(topic::behaviors_raw);
    bus_.register_topic<midlayer::PerceptionFeed>(topic::perception);
    bus_.register_topic<autonomy::VehicleState>(topic::vehicle_state);
    bus_.register_topic<autonomy::BehaviorSet>(topic::behaviors);
    bus_.register_topic<midlayer::HumanCommand>(topic::command);
    bus_.register_topic<midlayer::DrivingStateVector>(topic::state_vector);
    bus_.register_topic<interface::Prompt>(topic::prompt);
    bus_.register_topic<agents::AgentReply>(topic::reply);
    bus_.register_topic<midlayer::ActionVector>(topic::action);
    bus_.register_topic<midlayer::ExecutionPlan>(topic::plan);
    bus_.set_tap([this](const runtime::EnvelopeRecord & rec) { log_.envelopes.push_back(rec); });

    world_.t = 0.0;
    world_.actors = spec.actors;
    ego_ = spec.ego;
    weather_ = spec.weather;
    friction_ = weather_.friction * road_friction(spec.road_condition);
  }

  RunLog run()
  {
    inst_.begin_window();
    for (std::int64_t k = 0; k < n_ticks_; ++k) {
      const double t = static_cast<double>(k) * kTick;
      world_.t = t;
      const auto fix = autonomy::localize(ego_, spec_.map_label, spec_.localization, loc_rng_, t);
      if (k % 10 == 0) {
        midlayer_tick(t, fix);
      }
      if (k > 0 && k % agent_ticks_ == 0) {
        agent_tick(t, static_cast<std::uint64_t>(k / agent_ticks_));
      }
      control_tick(t, fix);
    }
    if (worker_.pending()) {
      auto reply = worker_.collect();
      record_unapplied(pending_t_, pending_cycle_, std::move(reply), "run ended before the reply was applied");
    }
    inst_.end_window();
    log_.latency = inst_.samples();
    log_.resources = inst_.resources();
    return std::move(log_);
  }

private:
  void midlayer_tick(double t, const autonomy::VehicleState & fix)
  {
    auto frame = simworld::sense(world_, ego_, weather_, sensor_rng_, cfg_.sensor);
    frame.t_virtual = t;
    bus_.publish(topic::frame, frame, t);
    bus_.publish(topic::ego, ego_, t);
    const auto dets = autonomy::detect(frame);
    bus_.publish(topic::detections, dets, t);

    {
      auto probe = inst_.probe(module(kVision), t);
      F_ = midlayer::aggregate_perception(dets, frame);
      probe.set_bytes(bytes_of(*F_));
      probe.finish();
      seq_.f = bus_.publish(topic::perception, *F_, t, probe.t_wall_in_ns());
    }
    log_.checks.push_back(checks::perception(dets, frame, *F_));

    bus_.publish(topic::localization, fix, t);
    {
      auto probe = inst_.probe(module(kLocalization), t);
      S_ = midlayer::adapt_localization(fix);
      probe.set_bytes(sizeof(autonomy::VehicleState));
      probe.finish();
      seq_.s = bus_.publish(topic::vehicle_state, *S_, t, probe.t_wall_in_ns());
    }
    log_.checks.push_back(checks::localization(fix, *S_));

    auto raw = autonomy::plan_behaviors(spec_.library, *S_, spec_.situation);
    raw.t_virtual = t;
    bus_.publish(topic::behaviors_raw, raw, t);
    {
      auto probe = inst_.probe(module(kPlanning), t);
      B_ = midlayer::acquire_planning(raw, world_, cfg_.clearance);
      probe.set_bytes(bytes_of(*B_));
      probe.finish();
      seq_.b = bus_.publish(topic::behaviors, *B_, t, probe.t_wall_in_ns());
    }
    log_.checks.push_back(checks::planning(raw, world_, cfg_.clearance, *B_));

    std::optional<std::string> event;
    while (next_command_ < spec_.commands.size() && spec_.commands[next_command_].t <= t + 1e-9) {
      event = spec_.commands[next_command_].text;
      ++next_command_;
    }
    {
      auto probe = inst_.probe(module(kSpeech), t);
      H_ = midlayer::process_command(event, H_.value_or(midlayer::HumanCommand{}), t);
      probe.set_bytes(sizeof(midlayer::HumanCommand) + H_->text.size());
      probe.finish();
      seq_.h = bus_.publish(topic::command, *H_, t, probe.t_wall_in_ns());
    }
    log_.checks.push_back(checks::command(spec_.commands, t, event.has_value(), *H_));

    if (!plan_) {
      const auto * initial = B_->find(spec_.initial_behavior);
      if (initial == nullptr) {
        throw ScenarioError("initial_behavior", "'" + spec_.initial_behavior + "' not planned");
      }
      plan_ = midlayer::ExecutionPlan{initial->trajectory, autonomy::PidGains{}, cfg_.mpc_base, {}};
      bus_.publish(topic::plan, *plan_, t);
    }
  }

  void agent_tick(double t, std::uint64_t cycle)
  {
    if (worker_.pending()) {
      apply(t, pending_cycle_, worker_.collect());
    }
    const auto vs = midlayer::assemble_state_vector(F_, B_, S_, H_, t, seq_);
    bus_.publish(topic::state_vector, vs, t);

    interface::Prompt prompt;
    {
      auto probe = inst_.probe(module(kPrompt), t);
      prompt = interface::build_prompt(vs, cfg_.prompt_template);
      probe.set_bytes(prompt.text.size() + sizeof(prompt));
      probe.finish();
      bus_.publish(topic::prompt, prompt, t, probe.t_wall_in_ns());
    }
    log_.checks.push_back(checks::prompt(vs, cfg_.prompt_template, prompt));

    agents::AgentRequest req{std::move(prompt), cfg_.remote.deadline, cycle};
    ++log_.agent_queries;
    if (async_) {
      pending_t_ = t;
      pending_cycle_ = cycle;
      worker_.submit(std::move(req), vs);
    } else {
      apply(t, cycle, agent_.decide(req, vs));
    }
  }

  void record_unapplied(double t, std::uint64_t cycle, agents::AgentReply reply, std::string why)
  {
    Decision d;
    d.t_virtual = t;
    d.cycle = cycle;
    d.reply = std::move(reply);
    d.parse_error = std::move(why);
    fill_plan(d);
    log_.decisions.push_back(std::move(d));
  }

  void fill_plan(Decision & d) const
  {
    d.behavior = plan_->trajectory.behavior_id;
    d.gains = plan_->gains;
    d.weights = plan_->weights;
    d.clamped = plan_->clamped;
  }

  void apply(double t, std::uint64_t cycle, agents::AgentReply reply)
  {
    bus_.publish(topic::reply, reply, t);
    Decision d;
    d.t_virtual = t;
    d.cycle = cycle;
    d.reply = reply;
    if (reply.outcome != agents::Outcome::ok) {
      fill_plan(d);
      log_.decisions.push_back(std::move(d));
      return;
    }

    interface::ParseResult parsed;
    {
      auto probe = inst_.probe(module(kAction), t);
      parsed = interface::parse_action(reply.text);
      probe.set_bytes(reply.text.size());
      probe.finish();
    }
    if (auto * err = std::get_if<interface::ParseError>(&parsed)) {
      d.parse_error = err->message();
      fill_plan(d);
      log_.decisions.push_back(std::move(d));
      return;
    }
    const auto & action = std::get<midlayer::ActionVector>(parsed);
    bus_.publish(topic::action, action, t);
    auto c = checks::action(reply.text, action);
    c.t_virtual = t;
    log_.checks.push_back(c);

    midlayer::SelectionResult sel;
    {
      auto probe = inst_.probe(module(kSelection), t);
      sel = midlayer::select_behavior(action, *B_, plan_->trajectory, t);
      probe.set_bytes(bytes_of(sel.trajectory));
      probe.finish();
    }
    c = checks::selection(action, *B_, plan_->trajectory, sel);
    c.t_virtual = t;
    log_.checks.push_back(c);
    if (sel.violation) {
      log_.violations.push_back(*sel.violation);
    }

    midlayer::RefinedParams refined;
    {
      auto probe = inst_.probe(module(kRefinement), t);
      refined = midlayer::refine_motion_control(action, cfg_.ranges, cfg_.mpc_base);
      probe.set_bytes(sizeof(refined));
      probe.finish();
    }
    c = checks::refinement(action, cfg_.ranges, cfg_.mpc_base, refined);
    c.t_virtual = t;
    log_.checks.push_back(c);

    plan_ = midlayer::ExecutionPlan{std::move(sel.trajectory), refined.gains, refined.weights, refined.clamped};
    bus_.publish(topic::plan, *plan_, t);

    d.action = action;
    d.applied = true;
    fill_plan(d);
    log_.decisions.push_back(std::move(d));
  }

  void control_tick(double t, const autonomy::VehicleState & fix)
  {
    const auto out = autonomy::track(plan_->trajectory, fix, plan_->gains, plan_->weights, pid_, cfg_.tracker);
    pid_ = out.pid_state;
    const auto truth = autonomy::project_onto(plan_->trajectory, ego_.pose.x, ego_.pose.y);
    log_.trace.push_back(TracePoint{
      t, ego_.pose.x, ego_.pose.y, ego_.pose.psi, ego_.v, out.v_ref, truth.lateral, out.command.steer,
      out.command.accel, plan_->trajectory.behavior_id});
    ego_ = simworld::step_dynamics(ego_, out.command, friction_, kTick, cfg_.tracker.vehicle);
    world_.actors = simworld::step_actors(world_.actors, kTick);
  }

  const ScenarioSpec & spec_;
  agents::Agent & agent_;
  HarnessConfig cfg_;
  std::uint64_t seed_;
  double cadence_;
  double duration_;
  bool async_;
  simworld::Rng sensor_rng_;
  simworld::Rng loc_rng_;
  agents::AsyncAgent worker_;
  std::int64_t n_ticks_{0};
  std::int64_t agent_ticks_{0};

  runtime::Bus bus_;
  runtime::Instrumentation inst_;
  RunLog log_;

  simworld::WorldState world_;
  simworld::EgoState ego_;
  simworld::Weather weather_;
  double friction_{1.0};

  std::optional<midlayer::PerceptionFeed> F_;
  std::optional<autonomy::BehaviorSet> B_;
  std::optional<autonomy::VehicleState> S_;
  std::optional<midlayer::HumanCommand> H_;
  midlayer::PartSeq seq_;
  std::size_t next_command_{0};

  std::optional<midlayer::ExecutionPlan> plan_;
  autonomy::PidState pid_{0.0, 0.0, kTick};

  double pending_t_{0.0};
  std::uint64_t pending_cycle_{0};
};

}  // namespace

RunLog run(const ScenarioSpec & spec, agents::Agent & agent, const RunOptions & options)
{
  Loop loop(spec, agent, options);
  return loop.run();
}

std::unique_ptr<agents::Agent> make_agent(const std::string & choice, const HarnessConfig & config)
{
  if (choice == "rule") {
    return std::make_unique<agents::RuleAgent>(config.rule_policy);
  }
  if (choice == "remote") {
    return std::make_unique<agents::RemoteAgent>(config.remote);
  }
  constexpr std::string_view prefix = "scripted:";
  if (choice.rfind(prefix, 0) == 0) {
    return std::make_unique<agents::ScriptedAgent>(agents::load_script(choice.substr(prefix.size())));
  }
  throw std::invalid_argument("unknown agent '" + choice + "' (rule, remote or scripted:<file>)");
}

}  // namespace vlmtest::harness
