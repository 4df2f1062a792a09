#!/usr/bin/env python3
# Copyright 2026 The vlmtest Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Writes the bundled scenarios and trajectory libraries.

Every trip is laid out in a road frame (s along the road, l to the left)
anchored at the ego start pose, then mapped to world coordinates.
"""

import json
import math
import os
import sys

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
KMH = 1.0 / 3.6


class Frame:
    def __init__(self, x0, y0, psi0):
        self.x0, self.y0, self.psi0 = x0, y0, psi0

    def world(self, s, l):
        c, sn = math.cos(self.psi0), math.sin(self.psi0)
        return (self.x0 + s * c - l * sn, self.y0 + s * sn + l * c)


def r6(v):
    return round(v, 6)


def path(frame, s0, s1, ds, lat, speed):
    pts = []
    n = int(round((s1 - s0) / ds))
    for i in range(n + 1):
        s = s0 + i * ds
        x, y = frame.world(s, lat(s))
        pts.append([r6(x), r6(y), r6(speed(s))])
    return pts


def smooth_step(s, a, b, height):
    if s <= a:
        return 0.0
    if s >= b:
        return height
    return height * 0.5 * (1.0 - math.cos(math.pi * (s - a) / (b - a)))


def actor(frame, ident, cls, s, l, v=0.0, heading=0.0):
    x, y = frame.world(s, l)
    return {"id": ident, "class": cls, "x": r6(x), "y": r6(y),
            "psi": r6(frame.psi0 + heading), "v": v}


def road(frame, length, lanes):
    a = frame.world(-20.0, 0.0)
    b = frame.world(length, 0.0)
    return {"polyline": [[r6(a[0]), r6(a[1])], [r6(b[0]), r6(b[1])]],
            "lanes": lanes, "lane_width": 3.5}


def scenario(name, map_label, frame, v0, **kw):
    doc = {
        "schema": 1,
        "name": name,
        "map_label": map_label,
        "road": kw.pop("road"),
        "road_condition": kw.pop("road_condition", "dry"),
        "weather": kw.pop("weather", {"kind": "clear"}),
        "actors": kw.pop("actors", []),
        "commands": kw.pop("commands", []),
        "trajectory_library": "../trajectories/%s.json" % map_label,
        "situation": kw.pop("situation"),
        "agent_cadence": kw.pop("agent_cadence", 3.0),
        "duration": kw.pop("duration"),
        "seed": kw.pop("seed"),
        "ego": {"x": frame.x0, "y": frame.y0, "psi": frame.psi0, "v": r6(v0)},
        "initial_behavior": "following",
        "expected": kw.pop("expected", []),
    }
    assert not kw, kw
    return doc


def traj(behavior, map_label, situation, points):
    return {"behavior_id": behavior, "map_label": map_label,
            "situation": situation, "points": points}


def highway():
    libs, scen = [], []
    # Trip 1: slow truck ahead, clear day.
    f = Frame(130.0, 46.0, 0.97)
    v = 50 * KMH
    libs += [
        traj("overtake", "highway", "trip1",
             path(f, -10, 420, 2.0, lambda s: smooth_step(s, 100, 160, 3.5), lambda s: 60 * KMH)),
        traj("yield", "highway", "trip1", path(f, -10, 420, 2.0, lambda s: 0.0, lambda s: 8.0)),
        traj("following", "highway", "trip1", path(f, -10, 420, 2.0, lambda s: 0.0, lambda s: v)),
    ]
    scen.append(scenario(
        "highway_trip1", "highway", f, v, road=road(f, 420, 2), situation="trip1",
        actors=[actor(f, "truck_1", "truck", 60.0, 0.0, 9.0)],
        commands=[{"t": 5.0, "text": "The traffic is too slow"}],
        duration=20.0, seed=101,
        expected=[{"t0": 6.0, "t1": 20.0, "behavior": "overtake"}]))

    # Trip 2: snow, passenger asks for a safe drive.
    f = Frame(231.0, 57.0, 0.89)
    v = 20 * KMH
    libs += [
        traj("overtake", "highway", "trip2",
             path(f, -10, 200, 2.0, lambda s: smooth_step(s, 40, 100, 3.5), lambda s: 30 * KMH)),
        traj("yield", "highway", "trip2", path(f, -10, 200, 2.0, lambda s: 0.0, lambda s: 3.0)),
        traj("following", "highway", "trip2", path(f, -10, 200, 2.0, lambda s: 0.0, lambda s: v)),
    ]
    scen.append(scenario(
        "highway_trip2", "highway", f, v, road=road(f, 200, 2), situation="trip2",
        road_condition="wet", weather={"kind": "snow"},
        actors=[actor(f, "car_1", "car", 35.0, 0.0, 5.0)],
        commands=[{"t": 1.0, "text": "Drive safely"}],
        duration=15.0, seed=102,
        expected=[{"t0": 3.0, "t1": 15.0, "behavior": "following",
                   "params": [{"name": "Kp", "cmp": "lt", "value": 1.1},
                              {"name": "c_speed", "cmp": "gt", "value": 2.0}]}]))
    return libs, scen


def intersection():
    libs, scen = [], []
    f = Frame(197.0, 51.0, 0.90)
    v = 20 * KMH
    libs += [
        traj("following", "intersection", "trip1", path(f, -10, 160, 1.0, lambda s: 0.0, lambda s: 30 * KMH)),
        traj("yield", "intersection", "trip1", path(f, -10, 160, 1.0, lambda s: 0.0, lambda s: 2.0)),
    ]
    scen.append(scenario(
        "intersection_trip1", "intersection", f, v, road=road(f, 160, 2), situation="trip1",
        actors=[actor(f, "cross_car", "car", 60.0, -40.0, 8.0, heading=0.5 * math.pi)],
        commands=[{"t": 2.0, "text": "I need to catch a flight"}],
        duration=12.0, seed=201,
        expected=[{"t0": 3.0, "t1": 12.0, "behavior": "following",
                   "params": [{"name": "Kp", "cmp": "gt", "value": 1.1}]}]))

    f = Frame(209.0, 46.0, 0.89)
    libs += [
        traj("following", "intersection", "trip2", path(f, -10, 160, 1.0, lambda s: 0.0, lambda s: v)),
        traj("yield", "intersection", "trip2", path(f, -10, 160, 1.0, lambda s: 0.0, lambda s: 2.0)),
    ]
    scen.append(scenario(
        "intersection_trip2", "intersection", f, v, road=road(f, 160, 2), situation="trip2",
        road_condition="icy", weather={"kind": "snow+fog"},
        actors=[actor(f, "ped_crosswalk", "pedestrian", 30.0, 5.0)],
        commands=[{"t": 1.0, "text": "Keep safe"}],
        duration=12.0, seed=202,
        expected=[{"t0": 3.0, "t1": 12.0, "behavior": "following",
                   "params": [{"name": "Kp", "cmp": "lt", "value": 1.1},
                              {"name": "c_speed", "cmp": "gt", "value": 2.0}]}]))
    return libs, scen


def parking():
    libs, scen = [], []
    wiggle = lambda s: 0.5 * math.sin(s / 15.0)
    f = Frame(60.0, 30.0, 0.5)
    v = 10 * KMH
    libs += [
        traj("following", "parkinglot", "trip1", path(f, -5, 80, 0.5, wiggle, lambda s: v)),
        traj("yield", "parkinglot", "trip1", path(f, -5, 80, 0.5, wiggle, lambda s: 1.0)),
    ]
    peds = [actor(f, "ped_%d" % i, "pedestrian", 10.0 + 4.0 * i, 3.0 if i % 2 == 0 else -3.0)
            for i in range(10)]
    scen.append(scenario(
        "parking_trip1", "parkinglot", f, v, road=road(f, 80, 1), situation="trip1",
        actors=peds,
        commands=[{"t": 1.0, "text": "I am in a hurry"}],
        duration=12.0, seed=301,
        expected=[{"t0": 3.0, "t1": 12.0, "behavior": "following",
                   "params": [{"name": "w_lat", "cmp": "gt", "value": 0.2}]}]))

    f = Frame(78.0, 42.0, 0.89)
    libs += [
        traj("following", "parkinglot", "trip2", path(f, -5, 80, 0.5, wiggle, lambda s: v)),
        traj("yield", "parkinglot", "trip2", path(f, -5, 80, 0.5, wiggle, lambda s: 1.0)),
    ]
    scen.append(scenario(
        "parking_trip2", "parkinglot", f, v, road=road(f, 80, 1), situation="trip2",
        actors=[actor(f, "parked_left", "car", 20.0, 4.5), actor(f, "parked_right", "car", 20.0, -4.5)],
        commands=[{"t": 1.0, "text": "Leave the parking lot quickly"}],
        duration=12.0, seed=302,
        expected=[{"t0": 3.0, "t1": 12.0, "behavior": "following",
                   "params": [{"name": "w_lat", "cmp": "lt", "value": 1.0},
                              {"name": "Kp", "cmp": "gt", "value": 0.8}]}]))
    return libs, scen


def fixtures():
    """Straight-road tracking fixtures for the tests."""
    f = Frame(0.0, 0.0, 0.0)
    lib = {"schema": 1, "trajectories": [
        traj("following", "highway", "default", path(f, -10, 300, 2.0, lambda s: 0.0, lambda s: 10.0)),
        traj("yield", "highway", "default", path(f, -10, 300, 2.0, lambda s: 0.0, lambda s: 5.0)),
    ]}
    write(os.path.join(ROOT, "tests", "fixtures", "straight_library.json"), lib)
    base = scenario("straight_on_path", "highway", f, 10.0, road=road(f, 300, 1), situation="default",
                    duration=12.0, seed=7)
    base["trajectory_library"] = "straight_library.json"
    write(os.path.join(ROOT, "tests", "fixtures", "straight_on_path.json"), base)
    off = dict(base)
    off["name"] = "straight_offset"
    off["ego"] = {"x": 0.0, "y": 1.0, "psi": 0.0, "v": 10.0}
    write(os.path.join(ROOT, "tests", "fixtures", "straight_offset.json"), off)


def write(p, doc):
    with open(p, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def main():
    out_t = os.path.join(ROOT, "data", "trajectories")
    out_s = os.path.join(ROOT, "data", "scenarios")
    for label, fn in (("highway", highway), ("intersection", intersection), ("parkinglot", parking)):
        libs, scens = fn()
        write(os.path.join(out_t, label + ".json"), {"schema": 1, "trajectories": libs})
        for s in scens:
            write(os.path.join(out_s, s["name"] + ".json"), s)
    fixtures()
    return 0


if __name__ == "__main__":
    sys.exit(main())
