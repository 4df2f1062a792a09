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

#include "vlmtest/autonomy/autonomy.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <stdexcept>

namespace vlmtest::autonomy
{

PidOutput pid_speed_control(
  double error, const PidState & state, const PidGains & gains, const PidLimits & limits)
{
  if (!(state.dt > 0.0)) {
    throw std::invalid_argument("pid_speed_control: dt must be positive");
  }
  PidOutput out;
  out.state.dt = state.dt;
  out.state.integral =
    std::clamp(state.integral + error * state.dt, -limits.integral_max, limits.integral_max);
  out.state.prev_error = error;
  const double derivative = (error - state.prev_error) / state.dt;
  const double u = gains.kp * error + gains.ki * out.state.integral + gains.kd * derivative;
  out.u = std::clamp(u, -limits.a_max, limits.a_max);
  return out;
}

namespace
{
// Symmetric 2x2 value-function matrix [[a, b], [b, c]].
struct Sym2
{
  double a{0.0};
  double b{0.0};
  double c{0.0};
};

struct Vec2
{
  double x{0.0};
  double y{0.0};
};

void check_weights(const MpcWeights & w, std::size_t kappa_len)
{
  if (w.horizon < 1) {
    throw std::invalid_argument("mpc: horizon must be at least 1");
  }
  if (w.w_lat < 0.0 || w.w_head < 0.0 || w.c_speed < 0.0) {
    throw std::invalid_argument("mpc: weights must be non-negative");
  }
  if (w.w_lat == 0.0 && w.w_head == 0.0) {
    throw std::invalid_argument("mpc: lateral and heading weights cannot both be zero");
  }
  if (!(w.dt > 0.0)) {
    throw std::invalid_argument("mpc: dt must be positive");
  }
  if (kappa_len < static_cast<std::size_t>(w.horizon)) {
    throw std::invalid_argument("mpc: kappa_ref shorter than the horizon");
  }
}
}  // namespace

MpcSolution mpc_solve(
  const LateralError & err0, double v, std::span<const double> kappa_ref,
  const MpcWeights & weights, double wheelbase)
{
  check_weights(weights, kappa_ref.size());
  if (v < 0.0) {
    throw std::invalid_argument("mpc: negative speed");
  }
  const int n = weights.horizon;
  // z+ = A z + B u + d with A = [[1, s], [0, 1]], B = [0, beta], d = [0, -s kappa].
  const double s = weights.dt * v;
  const double beta = s / wheelbase;
  const double r = 1.0 + weights.c_speed * v;
  const Sym2 q{weights.w_lat, 0.0, weights.w_head};

  // Value function V_k(z) = z' P_k z + 2 p_k' z + const, swept backwards.
  Sym2 p{weights.p_terminal * q.a, 0.0, weights.p_terminal * q.c};
  Vec2 lin{};
  std::vector<std::array<double, 3>> law(n);  // u_k = -(h0 z0 + h1 z1 + g) / S
  for (int k = n - 1; k >= 0; --k) {
    const double dk = -s * kappa_ref[k];
    // P A, columns of A are [1, 0] and [s, 1].
    const double pa00 = p.a, pa01 = p.a * s + p.b;
    const double pa10 = p.b, pa11 = p.b * s + p.c;
    // h = B' P A,  g = B' (P d + p),  S = R + B' P B.
    const double h0 = beta * pa10;
    const double h1 = beta * pa11;
    const Vec2 pd_p{p.b * dk + lin.x, p.c * dk + lin.y};
    const double g = beta * pd_p.y;
    const double big_s = r + beta * beta * p.c;
    law[k] = {h0 / big_s, h1 / big_s, g / big_s};

    // A' P A.
    const Sym2 apa{pa00, pa01, s * pa01 + pa11};
    Sym2 next{q.a + apa.a - h0 * h0 / big_s, q.b + apa.b - h0 * h1 / big_s, q.c + apa.c - h1 * h1 / big_s};
    // A' (P d + p) - h' g / S.
    Vec2 next_lin{pd_p.x - h0 * g / big_s, s * pd_p.x + pd_p.y - h1 * g / big_s};
    p = next;
    lin = next_lin;
  }

  MpcSolution sol;
  sol.inputs.resize(n);
  double z0 = err0.e_lat;
  double z1 = err0.e_psi;
  for (int k = 0; k < n; ++k) {
    const double u = -(law[k][0] * z0 + law[k][1] * z1 + law[k][2]);
    sol.inputs[k] = u;
    sol.cost += q.a * z0 * z0 + q.c * z1 * z1 + r * u * u;
    const double nz0 = z0 + s * z1;
    const double nz1 = z1 + beta * u - s * kappa_ref[k];
    z0 = nz0;
    z1 = nz1;
  }
  sol.cost += weights.p_terminal * (q.a * z0 * z0 + q.c * z1 * z1);
  return sol;
}

double mpc_lateral_control(
  const LateralError & err0, double v, std::span<const double> kappa_ref,
  const MpcWeights & weights, double wheelbase, double delta_max)
{
  const MpcSolution sol = mpc_solve(err0, v, kappa_ref, weights, wheelbase);
  return std::clamp(sol.inputs.front(), -delta_max, delta_max);
}

namespace
{
// Curvature at arc length `ahead` past the projection, by walking the polyline.
std::vector<double> sample_kappa(
  const Trajectory & traj, const PathProjection & proj, double step, int count)
{
  std::vector<double> out(count, 0.0);
  const auto & w = traj.waypoints;
  std::size_t seg = proj.segment;
  double seg_len = std::hypot(w[seg + 1].x - w[seg].x, w[seg + 1].y - w[seg].y);
  double along = proj.fraction * seg_len;
  for (int k = 0; k < count; ++k) {
    double target = along + step * k;
    std::size_t i = seg;
    double base = 0.0;
    double len = seg_len;
    while (target > base + len && i + 2 < w.size()) {
      base += len;
      ++i;
      len = std::hypot(w[i + 1].x - w[i].x, w[i + 1].y - w[i].y);
    }
    const double f = len > 0.0 ? std::clamp((target - base) / len, 0.0, 1.0) : 0.0;
    out[k] = traj.kappa[i] + f * (traj.kappa[i + 1] - traj.kappa[i]);
  }
  return out;
}

bool degenerate(const Trajectory & traj)
{
  for (std::size_t i = 0; i + 1 < traj.waypoints.size(); ++i) {
    if (traj.waypoints[i].x != traj.waypoints[i + 1].x || traj.waypoints[i].y != traj.waypoints[i + 1].y) {
      return false;
    }
  }
  return true;
}
}  // namespace

TrackOutput track(
  const Trajectory & trajectory, const VehicleState & state, const PidGains & gains,
  const MpcWeights & weights, const PidState & pid_state, const TrackerParams & params)
{
  if (trajectory.waypoints.size() < 2) {
    throw std::invalid_argument("track: empty trajectory");
  }
  if (degenerate(trajectory)) {
    throw std::invalid_argument("track: degenerate trajectory " + trajectory.behavior_id);
  }
  Trajectory local = trajectory;
  if (local.kappa.size() != local.waypoints.size()) {
    local.kappa.assign(local.waypoints.size(), 0.0);
  }
  const PathProjection proj = project_onto(local, state.x, state.y);

  TrackOutput out;
  out.v_ref = proj.v_ref;
  out.error = LateralError{proj.lateral, simworld::wrap_angle(state.psi - proj.heading)};

  const PidOutput pid = pid_speed_control(proj.v_ref - state.v, pid_state, gains, params.pid_limits);
  out.pid_state = pid.state;
  out.command.accel = pid.u;

  const auto kappa = sample_kappa(local, proj, state.v * weights.dt, weights.horizon);
  out.command.steer = mpc_lateral_control(
    out.error, state.v, kappa, weights, params.vehicle.wheelbase, params.vehicle.delta_max);
  return out;
}

}  // namespace vlmtest::autonomy
