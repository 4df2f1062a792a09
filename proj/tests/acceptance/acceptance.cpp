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

// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits non-zero if any criterion fails.

#include "mock_vlm_server.hpp"
#include "vlmtest/harness/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <limits>
#include <random>
#include <sstream>

namespace h = vlmtest::harness;
namespace ag = vlmtest::agents;
namespace av = vlmtest::autonomy;
namespace in = vlmtest::interface;
namespace ml = vlmtest::midlayer;
namespace rt = vlmtest::runtime;
using namespace std::chrono_literals;

namespace
{

const std::string kScenarios = VLMTEST_SOURCE_DIR "/data/scenarios/";
const std::string kFixtures = VLMTEST_SOURCE_DIR "/tests/fixtures/";
const std::vector<std::string> kTrips{
  "highway_trip1", "highway_trip2", "intersection_trip1", "intersection_trip2", "parking_trip1", "parking_trip2"};

struct Verdict
{
  bool pass{true};
  std::string detail;
};

// Collects failures; the first few are kept for the report line.
class Tally
{
public:
  void expect(bool ok, const std::string & what)
  {
    if (!ok) {
      ++failures_;
      if (notes_.size() < 3) {
        notes_.push_back(what);
      }
    }
  }
  Verdict verdict(const std::string & summary) const
  {
    if (failures_ == 0) {
      return {true, summary};
    }
    std::string d = std::to_string(failures_) + " failed check(s):";
    for (const auto & n : notes_) {
      d += " [" + n + "]";
    }
    return {false, d};
  }

private:
  std::size_t failures_{0};
  std::vector<std::string> notes_;
};

std::string num(double v, const char * f = "%.4g")
{
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

h::ScenarioSpec trip(const std::string & name) { return h::load_scenario(kScenarios + name + ".json"); }

std::string following_reply(double w_lat = 0.2, double c_speed = 2.0, double kp = 1.1)
{
  ml::ActionVector a{"following", {w_lat, 0.35, c_speed}, {kp, 0.02, 0.01}, ""};
  return in::render_action(a);
}

// -----------------------------------------------------------------------------

Verdict latency_bounds()
{
  const auto t0 = std::chrono::steady_clock::now();
  const auto spec = trip("highway_trip1");
  std::vector<rt::LatencySample> samples;
  std::uint64_t cycles = 0;
  while (cycles < 1000) {
    ag::RuleAgent agent;
    h::RunOptions opt;
    opt.cadence = 0.1;
    opt.config.agent_mode = h::AgentMode::sync;
    const auto log = h::run(spec, agent, opt);
    cycles += log.agent_queries;
    samples.insert(samples.end(), log.latency.begin(), log.latency.end());
  }
  const double wall_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  Tally t;
  const auto prompt = rt::latency_stats(samples, "Prompt Generation Interface");
  const auto action = rt::latency_stats(samples, "Action Interface");
  t.expect(prompt.count >= 1000, "prompt cycles " + std::to_string(prompt.count));
  t.expect(prompt.max < 20.0, "prompt max " + num(prompt.max) + " ms");
  t.expect(prompt.avg < 10.0, "prompt avg " + num(prompt.avg) + " ms");
  t.expect(action.avg < 1.0, "action avg " + num(action.avg) + " ms");
  double worst_mid = 0.0;
  for (const char * m : {"Vision Perception Aggregator", "Localization State Adapter", "Planning & Navigation Acquisition",
                         "Speech Command Processor", "Driving Behavior Selection", "Motion Control Refinement"}) {
    const auto s = rt::latency_stats(samples, m);
    worst_mid = std::max(worst_mid, s.avg);
    t.expect(s.avg < 5.0, std::string(m) + " avg " + num(s.avg) + " ms");
  }
  t.expect(wall_s < 120.0, "runtime " + num(wall_s) + " s");
  return t.verdict(
    std::to_string(prompt.count) + " cycles; prompt avg " + num(prompt.avg) + " ms, max " + num(prompt.max) +
    " ms; parse avg " + num(action.avg) + " ms; worst mid-layer avg " + num(worst_mid) + " ms; " + num(wall_s, "%.1f") + " s");
}

Verdict accuracy_reproduction()
{
  const std::vector<std::string> modules{
    "Prompt Generation Interface", "Action Interface", "Planning & Navigation Acquisition",
    "Driving Behavior Selection", "Motion Control Refinement"};
  Tally t;
  std::size_t checked = 0;
  for (const auto & name : kTrips) {
    const auto spec = trip(name);
    ag::RuleAgent agent;
    const auto original = h::run(spec, agent);
    const auto result = h::replay(original);
    const auto m = h::compute_metrics(result.replayed, &spec, &original.decisions);
    for (const auto & row : m.rows) {
      if (std::find(modules.begin(), modules.end(), row.module) == modules.end()) {
        continue;
      }
      checked += row.checked;
      t.expect(row.accuracy.has_value(), name + " " + row.module + " unchecked");
      t.expect(row.accuracy && *row.accuracy == 100.0, name + " " + row.module + " " + num(row.accuracy.value_or(-1)) + "%");
    }
  }
  return t.verdict("5 modules at 100% on 6 replayed trips (" + std::to_string(checked) + " outputs checked)");
}

// Applied decisions at or after `from`.
std::vector<h::Decision> applied_after(const h::RunLog & log, double from)
{
  std::vector<h::Decision> out;
  for (const auto & d : log.decisions) {
    if (d.applied && d.t_virtual >= from) {
      out.push_back(d);
    }
  }
  return out;
}

Verdict decision_table()
{
  const av::PidGains def_g;
  const av::MpcWeights def_w;
  Tally t;
  std::map<std::string, std::vector<h::Decision>> after;
  for (const auto & name : kTrips) {
    const auto spec = trip(name);
    ag::RuleAgent agent;
    const auto log = h::run(spec, agent);
    after[name] = applied_after(log, spec.commands.at(0).t);
    t.expect(!after[name].empty(), name + " no applied decisions after the command");
  }
  auto all = [&](const std::string & name, const std::function<bool(const h::Decision &)> & pred, const std::string & what) {
    for (const auto & d : after[name]) {
      t.expect(pred(d), name + " at t=" + num(d.t_virtual) + ": " + what);
    }
  };
  all("highway_trip1", [](const auto & d) { return d.behavior == "overtake"; }, "overtake");
  all("highway_trip2", [&](const auto & d) {
    return d.behavior == "following" && d.gains.kp < def_g.kp && d.weights.c_speed > def_w.c_speed;
  }, "following, Kp down, c_speed up");
  all("intersection_trip1", [&](const auto & d) { return d.behavior == "following" && d.gains.kp > def_g.kp; },
      "following, Kp up");
  all("intersection_trip2", [&](const auto & d) {
    return d.behavior == "following" && d.gains.kp < def_g.kp && d.weights.c_speed > def_w.c_speed;
  }, "cautious following");
  all("parking_trip1", [&](const auto & d) { return d.behavior == "following" && d.weights.w_lat > def_w.w_lat; },
      "w_lat above default");
  if (!after["parking_trip1"].empty() && !after["parking_trip2"].empty()) {
    const auto & p1 = after["parking_trip1"].back();
    all("parking_trip2", [&](const auto & d) {
      return d.behavior == "following" && d.weights.w_lat < p1.weights.w_lat && d.gains.kp > p1.gains.kp;
    }, "w_lat below and Kp above trip 1");
  }
  return t.verdict("expected decisions reproduced on all six trips");
}

double pid_sum_form(const std::vector<double> & e, const av::PidGains & g, double dt)
{
  double sum = 0.0;
  for (double x : e) {
    sum += x * dt;
  }
  const double prev = e.size() > 1 ? e[e.size() - 2] : 0.0;
  return g.kp * e.back() + g.ki * sum + g.kd * (e.back() - prev) / dt;
}

Verdict pid_oracle()
{
  Tally t;
  std::mt19937_64 rng(4404);
  std::uniform_real_distribution<double> err(-5.0, 5.0);
  std::uniform_real_distribution<double> gain(0.0, 2.0);
  std::uniform_int_distribution<int> len(1, 100);
  const av::PidLimits wide{1e12, 1e12};
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const av::PidGains g{gain(rng), gain(rng) * 0.1, gain(rng) * 0.05};
    const double dt = trial % 2 == 0 ? 0.1 : 0.01;
    std::vector<double> e(len(rng));
    av::PidState st{0.0, 0.0, dt};
    double u = 0.0;
    for (auto & x : e) {
      x = err(rng);
      const auto out = av::pid_speed_control(x, st, g, wide);
      st = out.state;
      u = out.u;
    }
    const double ref = pid_sum_form(e, g, dt);
    const double rel = std::abs(u - ref) / std::max(std::abs(ref), 1e-300);
    worst = std::max(worst, std::abs(ref) > 1e-9 ? rel : std::abs(u - ref));
    t.expect(std::abs(u - ref) <= 1e-12 * std::max(1.0, std::abs(ref)), "trial " + std::to_string(trial));
  }
  const double fixture = av::pid_speed_control(2.0, {0.0, 0.0, 0.1}, {1.1, 0.02, 0.01}).u;
  t.expect(std::abs(fixture - 2.404) <= 1e-12, "fixture u=" + num(fixture, "%.15g"));
  return t.verdict("200 histories within 1e-12 (worst rel " + num(worst, "%.2e") + "); fixture u = " + num(fixture, "%.12g"));
}

double mpc_rollout_cost(
  double e_lat, double e_psi, double v, const std::vector<double> & kappa, const std::vector<double> & u,
  const av::MpcWeights & w, double wheelbase)
{
  const double s = w.dt * v;
  const double r = 1.0 + w.c_speed * v;
  double cost = 0.0;
  for (std::size_t k = 0; k < u.size(); ++k) {
    cost += w.w_lat * e_lat * e_lat + w.w_head * e_psi * e_psi + r * u[k] * u[k];
    const double n_lat = e_lat + s * e_psi;
    const double n_psi = e_psi + s / wheelbase * u[k] - s * kappa[k];
    e_lat = n_lat;
    e_psi = n_psi;
  }
  return cost + w.p_terminal * (w.w_lat * e_lat * e_lat + w.w_head * e_psi * e_psi);
}

// Smallest rollout cost over every sequence on a 0.001 rad grid in [-dmax, dmax]^N.
double grid_minimum(
  double e_lat, double e_psi, double v, const std::vector<double> & kappa, const av::MpcWeights & w,
  double wheelbase, double dmax)
{
  const int steps = static_cast<int>(std::lround(dmax / 0.001));
  const int n = w.horizon;
  std::vector<int> idx(n, -steps);
  std::vector<double> u(n);
  double best = std::numeric_limits<double>::infinity();
  while (true) {
    for (int k = 0; k < n; ++k) {
      u[k] = idx[k] * 0.001;
    }
    best = std::min(best, mpc_rollout_cost(e_lat, e_psi, v, kappa, u, w, wheelbase));
    int k = 0;
    while (k < n && ++idx[k] > steps) {
      idx[k] = -steps;
      ++k;
    }
    if (k == n) {
      break;
    }
  }
  return best;
}

Verdict mpc_optimality()
{
  Tally t;
  std::mt19937_64 rng(5505);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double wheelbase = 2.8;
  std::size_t instances = 0;
  double worst_gap = -std::numeric_limits<double>::infinity();
  for (int n = 1; n <= 3; ++n) {
    // Grid width keeps the enumeration small: 1201, 601^2 and 61^3 points.
    const double dmax = n == 1 ? 0.6 : n == 2 ? 0.3 : 0.03;
    for (int trial = 0; trial < 20; ++trial) {
      av::MpcWeights w{0.6 + 0.5 * u(rng), 0.6 + 0.5 * u(rng), 2.0 + 2.0 * u(rng), n, 0.1, 1.0 + 9.0 * std::abs(u(rng))};
      std::vector<double> kappa(n);
      for (auto & k : kappa) {
        k = 0.02 * u(rng);
      }
      const double v = 10.0 + 8.0 * u(rng);
      const double e_lat = 0.8 * u(rng);
      const double e_psi = 0.1 * u(rng);
      const auto sol = av::mpc_solve({e_lat, e_psi}, v, kappa, w, wheelbase);
      const double dp = mpc_rollout_cost(e_lat, e_psi, v, kappa, sol.inputs, w, wheelbase);
      const double grid = grid_minimum(e_lat, e_psi, v, kappa, w, wheelbase, dmax);
      worst_gap = std::max(worst_gap, (dp - grid) / std::max(grid, 1e-300));
      t.expect(dp <= grid * (1.0 + 1e-12), "N=" + std::to_string(n) + " trial " + std::to_string(trial));
      t.expect(std::abs(sol.cost - dp) <= 1e-9 * std::max(1.0, dp), "reported cost differs from rollout");
      ++instances;
    }
  }
  const std::vector<double> zero(20, 0.0);
  const double d0 = av::mpc_lateral_control({0.0, 0.0}, 12.0, zero, {}, wheelbase, 0.6);
  t.expect(d0 == 0.0, "zero error gives " + num(d0, "%.3g"));
  return t.verdict(
    std::to_string(instances) + " instances, DP never above the grid (max rel gap " + num(worst_gap, "%.2e") +
    "); zero error gives delta = 0");
}

struct Tracking
{
  double settle_t{std::numeric_limits<double>::infinity()};  // last time |e_lat| >= 0.1
  double min_e{0.0};
  double rms{0.0};
  double effort{0.0};
};

Tracking track_offset(double w_lat_scale, double c_speed_scale)
{
  const auto spec = h::load_scenario(kFixtures + "straight_offset.json");
  h::RunOptions opt;
  opt.config.mpc_base.w_lat *= w_lat_scale;
  opt.config.mpc_base.c_speed *= c_speed_scale;
  auto agent = ag::ScriptedAgent::from_texts(
    {following_reply(opt.config.mpc_base.w_lat, opt.config.mpc_base.c_speed)});
  const auto log = h::run(spec, agent, opt);
  Tracking r;
  double last_out = -1.0;
  double ss = 0.0;
  for (const auto & p : log.trace) {
    if (std::abs(p.e_lat) >= 0.1) {
      last_out = p.t;
    }
    r.min_e = std::min(r.min_e, p.e_lat);
    ss += p.e_lat * p.e_lat;
    r.effort += p.steer * p.steer;
  }
  r.settle_t = last_out + h::kTick;
  r.rms = std::sqrt(ss / static_cast<double>(log.trace.size()));
  return r;
}

Verdict closed_loop_tracking()
{
  Tally t;
  const auto base = track_offset(1.0, 1.0);
  const auto stiff = track_offset(4.0, 1.0);
  const auto damped = track_offset(1.0, 4.0);
  t.expect(base.settle_t <= 8.0, "settled at " + num(base.settle_t) + " s");
  t.expect(base.min_e > -0.25, "overshoot " + num(base.min_e) + " m");
  t.expect(stiff.rms <= base.rms, "4x w_lat rms " + num(stiff.rms) + " vs " + num(base.rms));
  t.expect(damped.effort <= base.effort, "4x c_speed effort " + num(damped.effort) + " vs " + num(base.effort));
  return t.verdict(
    "|e_lat| < 0.1 m from t = " + num(base.settle_t, "%.2f") + " s; min e_lat " + num(base.min_e, "%.3f") +
    " m; rms " + num(base.rms, "%.4f") + " -> " + num(stiff.rms, "%.4f") + " m with 4x w_lat; steering effort " +
    num(base.effort, "%.4f") + " -> " + num(damped.effort, "%.4f") + " with 4x c_speed");
}

Verdict safety_clamp_fuzz()
{
  Tally t;
  std::mt19937_64 rng(7707);
  std::uniform_real_distribution<double> wild(-1e3, 1e3);
  std::uniform_int_distribution<int> special(0, 11);
  std::bernoulli_distribution coin(0.5);
  const ml::SafetyRanges ranges;
  const auto rs = ml::ordered(ranges);
  auto draw = [&] {
    switch (special(rng)) {
      case 0:
        return std::numeric_limits<double>::quiet_NaN();
      case 1:
        return std::numeric_limits<double>::infinity();
      case 2:
        return -std::numeric_limits<double>::infinity();
      case 3:
        return 0.0;
      default:
        return wild(rng) * std::pow(10.0, static_cast<double>(special(rng)) - 6.0);
    }
  };
  for (int i = 0; i < 10000; ++i) {
    ml::ActionVector a{"following", {draw(), draw(), draw()}, {draw(), draw(), draw()}, ""};
    const auto r = ml::refine_motion_control(a, ranges);
    const std::array<double, 6> got{r.weights.w_lat, r.weights.w_head, r.weights.c_speed, r.gains.kp, r.gains.ki, r.gains.kd};
    for (std::size_t k = 0; k < 6; ++k) {
      t.expect(got[k] >= rs[k].lo && got[k] <= rs[k].hi, std::string(ml::kParamNames[k]) + " = " + num(got[k]));
    }
  }

  const std::vector<std::string> ids{"overtake", "yield", "following"};
  const std::vector<std::string> requests{"overtake", "yield", "following", "teleport", "", "FOLLOWING"};
  std::uniform_int_distribution<std::size_t> pick_req(0, requests.size() - 1);
  std::size_t refused = 0;
  av::Trajectory current = av::make_trajectory("following", {{0, 0, 5}, {1, 0, 5}});
  for (int i = 0; i < 10000; ++i) {
    av::BehaviorSet set;
    for (const auto & id : ids) {
      set.behaviors.push_back({av::make_trajectory(id, {{0, 0, 5}, {1, 0, 5}}), coin(rng), false});
    }
    const ml::ActionVector a{requests[pick_req(rng)], {0.2, 0.35, 2.0}, {1.1, 0.02, 0.01}, ""};
    const auto r = ml::select_behavior(a, set, current, 0.1 * i);
    const auto * chosen = set.find(r.trajectory.behavior_id);
    if (r.violation) {
      ++refused;
      t.expect(r.trajectory.behavior_id == current.behavior_id, "fallback changed the trajectory");
    } else {
      t.expect(chosen != nullptr && chosen->safe, "returned unsafe " + r.trajectory.behavior_id);
      t.expect(r.trajectory.behavior_id == a.behavior, "returned something other than the request");
      current = r.trajectory;
    }
  }
  return t.verdict(
    "60000 clamped parameters in range; 10000 selections never adopt an unsafe behavior (" +
    std::to_string(refused) + " refused and kept the current plan)");
}

Verdict parser_fuzz()
{
  Tally t;
  std::mt19937_64 rng(8808);
  std::uniform_real_distribution<double> mant(-1.0, 1.0);
  std::uniform_int_distribution<int> ex(-12, 12);
  std::uniform_int_distribution<int> letters(0, 25);
  std::uniform_int_distribution<int> len(1, 16);
  std::bernoulli_distribution coin(0.5);
  for (int i = 0; i < 10000; ++i) {
    ml::ActionVector a;
    for (int k = len(rng); k > 0; --k) {
      a.behavior += static_cast<char>('a' + letters(rng));
      if (coin(rng) && k > 1) {
        a.behavior += '_';
      }
    }
    for (auto * arr : {&a.lateral, &a.longitudinal}) {
      for (auto & x : *arr) {
        x = mant(rng) * std::pow(10.0, ex(rng));
      }
    }
    if (coin(rng)) {
      a.rationale = "case " + std::to_string(i) + " keeps words only";
    }
    const auto text = in::render_action(a);
    const auto r = in::parse_action(text);
    const auto * back = std::get_if<ml::ActionVector>(&r);
    t.expect(back != nullptr && *back == a, "round trip " + std::to_string(i));
  }
  std::uniform_int_distribution<int> byte(0, 255);
  std::uniform_int_distribution<int> blen(0, 512);
  std::size_t errors = 0;
  for (int i = 0; i < 10000; ++i) {
    std::string s;
    for (int k = blen(rng); k > 0; --k) {
      s += static_cast<char>(byte(rng));
    }
    try {
      const auto r = in::parse_action(s);
      errors += std::holds_alternative<in::ParseError>(r) ? 1 : 0;
    } catch (...) {
      t.expect(false, "parse_action threw on input " + std::to_string(i));
    }
  }
  return t.verdict(
    "10000 render/parse round trips exact; 10000 random byte strings parsed without a crash (" +
    std::to_string(errors) + " structured errors)");
}

int run_cli(const std::string & args)
{
  const std::string cmd = std::string("\"") + VLMTEST_CLI_PATH + "\" " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

Verdict determinism()
{
  Tally t;
  const auto dir = std::filesystem::temp_directory_path() / "vlmtest_acceptance";
  std::filesystem::create_directories(dir);
  std::size_t lines = 0;
  for (const auto & name : kTrips) {
    const auto spec = trip(name);
    ag::RuleAgent a1;
    ag::RuleAgent a2;
    const auto l1 = h::stripped_lines(h::run(spec, a1));
    const auto l2 = h::stripped_lines(h::run(spec, a2));
    lines += l1.size();
    t.expect(l1 == l2, name + " stripped logs differ");
    const int rc_run = run_cli("run " + kScenarios + name + ".json --agent rule --out " + dir.string());
    t.expect(rc_run == 0, name + " run exit " + std::to_string(rc_run));
    const int rc_replay = run_cli("replay " + (dir / (name + ".ndjson")).string());
    t.expect(rc_replay == 0, name + " replay exit " + std::to_string(rc_replay));
  }
  return t.verdict(
    "six trips byte-identical across runs (" + std::to_string(lines) + " stripped lines); replay subcommand exit 0 on all six");
}

Verdict remote_fault_tolerance()
{
  Tally t;
  vlmtest::testing::MockVlmServer server([](std::size_t n) {
    vlmtest::testing::MockResponse r;
    r.content = following_reply(0.2, 2.0, 0.8 + 0.1 * static_cast<double>(n));
    if (n == 2 || n == 4) {
      r.delay = 600ms;
    }
    return r;
  });
  const auto spec = trip("highway_trip1");
  h::RunOptions opt;
  opt.config.remote.endpoint = server.endpoint();
  opt.config.remote.deadline = 250ms;
  auto agent = h::make_agent("remote", opt.config);
  h::RunLog log;
  try {
    log = h::run(spec, *agent, opt);
  } catch (const std::exception & e) {
    t.expect(false, std::string("run aborted: ") + e.what());
    return t.verdict("");
  }
  std::vector<std::uint64_t> timeouts;
  for (std::size_t i = 0; i < log.decisions.size(); ++i) {
    const auto & d = log.decisions[i];
    if (d.reply.outcome != ag::Outcome::timeout) {
      // An async reply still in flight when the run ends is logged unapplied.
      const bool last = i + 1 == log.decisions.size();
      t.expect(d.reply.outcome == ag::Outcome::ok, "cycle " + std::to_string(d.cycle) + " failed");
      t.expect(d.applied || last, "cycle " + std::to_string(d.cycle) + " not applied");
      continue;
    }
    timeouts.push_back(d.cycle);
    t.expect(!d.applied, "timeout applied");
    if (i == 0) {
      t.expect(false, "timeout on the first decision");
      continue;
    }
    const auto & prev = log.decisions[i - 1];
    t.expect(d.behavior == prev.behavior, "behavior changed across a timeout");
    t.expect(
      d.gains.kp == prev.gains.kp && d.gains.ki == prev.gains.ki && d.gains.kd == prev.gains.kd,
      "gains changed across a timeout");
    t.expect(
      d.weights.w_lat == prev.weights.w_lat && d.weights.w_head == prev.weights.w_head &&
        d.weights.c_speed == prev.weights.c_speed,
      "weights changed across a timeout");
    for (const auto & e : log.envelopes) {
      t.expect(!(e.header.topic == "midlayer/plan" && e.header.t_virtual == d.t_virtual), "plan republished");
    }
  }
  t.expect(timeouts == std::vector<std::uint64_t>{2, 4}, "timeout cycles " + std::to_string(timeouts.size()));
  t.expect(log.decisions.size() == log.agent_queries, "decisions " + std::to_string(log.decisions.size()));
  return t.verdict(
    "run completed in " + log.meta.agent_mode + " mode; " + std::to_string(log.decisions.size()) +
    " cycles, timeouts on cycles 2 and 4, plan held across both");
}

std::vector<std::string> header_cells(const std::string & table)
{
  const auto at = table.find("| Module");
  const auto end = table.find('\n', at);
  std::vector<std::string> cells;
  std::stringstream ss(table.substr(at, end - at));
  std::string cell;
  while (std::getline(ss, cell, '|')) {
    const auto b = cell.find_first_not_of(' ');
    if (b == std::string::npos) {
      continue;
    }
    cells.push_back(cell.substr(b, cell.find_last_not_of(' ') - b + 1));
  }
  return cells;
}

Verdict resource_report()
{
  Tally t;
  const std::vector<std::string> expected{
    "Module", "Average Latency (ms)", "Latency Standard Deviation (ms)", "Max Latency (ms)",
    "CPU (%)", "Memory (%)", "GPU (%)", "Accuracy (%)"};
  std::size_t samples = 0;
  for (const auto & name : kTrips) {
    const auto spec = trip(name);
    ag::RuleAgent agent;
    const auto log = h::run(spec, agent);
    for (const auto & r : log.resources) {
      ++samples;
      t.expect(r.R_cpu >= 0.0 && r.R_cpu <= 100.0, name + " " + r.module + " cpu " + num(r.R_cpu));
      t.expect(r.R_mem >= 0.0 && r.R_mem <= 100.0, name + " " + r.module + " mem " + num(r.R_mem));
      t.expect(r.R_gpu == 0.0, name + " " + r.module + " gpu " + num(r.R_gpu));
    }
    const auto m = h::compute_metrics(log, &spec);
    const auto first = h::emit_report(m, h::ReportFormat::table);
    const auto second = h::emit_report(m, h::ReportFormat::table);
    t.expect(first == second, name + " table not byte-stable");
    t.expect(h::emit_report(m, h::ReportFormat::csv) == h::emit_report(m, h::ReportFormat::csv), name + " csv not byte-stable");
    t.expect(header_cells(first) == expected, name + " column order");
  }
  return t.verdict(std::to_string(samples) + " resource samples in [0, 100] with GPU 0; tables byte-stable in the reference column order");
}

}  // namespace

int main()
{
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria{
    {"latency bounds", latency_bounds},
    {"accuracy reproduction", accuracy_reproduction},
    {"six-trip decision table", decision_table},
    {"PID oracle", pid_oracle},
    {"MPC optimality", mpc_optimality},
    {"closed-loop tracking", closed_loop_tracking},
    {"safety clamp fuzz", safety_clamp_fuzz},
    {"parser round-trip fuzz", parser_fuzz},
    {"determinism and replay", determinism},
    {"remote-agent fault tolerance", remote_fault_tolerance},
    {"resource report well-formedness", resource_report},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Verdict v;
    try {
      v = criteria[i].second();
    } catch (const std::exception & e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    failed += v.pass ? 0 : 1;
    std::cout << (v.pass ? "PASS" : "FAIL") << "  criterion " << (i + 1) << " (" << criteria[i].first << "): " << v.detail
              << std::endl;
  }
  std::cout << (criteria.size() - failed) << "/" << criteria.size() << " criteria passed" << std::endl;
  return failed == 0 ? 0 : 1;
}
