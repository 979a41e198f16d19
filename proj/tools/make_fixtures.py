#!/usr/bin/env python3
"""Regenerates the bundled cases, menus and configs under data/.

The outputs are checked in; rerun only when a fixture has to change (and
regenerate tests/golden afterwards).
"""
import argparse
import json
import math
from pathlib import Path

import numpy as np

ROOT = Path(__file__).resolve().parent.parent


def _round(values, digits=3):
    return [round(float(v), digits) for v in values]


def _bus(bid, kv, zone, lon, lat, profile="", scale=1.0):
    b = {"id": bid, "base_kv": kv, "zone": zone, "coord": [lon, lat]}
    if profile:
        b["load_profile_ref"] = profile
        b["load_scale"] = scale
    return b


def _line(lid, f, t, x, limit, status="in"):
    return {"id": lid, "from_bus": f, "to_bus": t, "susceptance": round(1.0 / x, 6),
            "flow_limit": limit, "status": status}


def _gen(gid, bus, pmin, pmax, c1, c2=0.0, c0=0.0, ramp=None, min_up=1, min_down=1,
         no_load=0.0, startup=0.0, shutdown=0.0, profile=""):
    g = {"id": gid, "bus": bus, "pmin": pmin, "pmax": pmax,
         "ramp_up": pmax if ramp is None else ramp, "ramp_down": pmax if ramp is None else ramp,
         "min_up": min_up, "min_down": min_down, "cost_quad": [c2, c1, c0],
         "no_load_cost": no_load, "startup_cost": startup, "shutdown_cost": shutdown}
    if profile:
        g["renewable_profile_ref"] = profile
    return g


def case2():
    """Cheap unit behind a 60 MW line, expensive unit at the 100 MW load."""
    return {
        "base_mva": 100.0,
        "slack_bus": 1,
        "buses": [_bus(1, 138.0, "west", -97.0, 31.0),
                  _bus(2, 138.0, "east", -96.5, 31.0, "load2", 1.0)],
        "branches": [_line(1, 1, 2, 0.1, 60.0)],
        "generators": [_gen(1, 1, 0.0, 200.0, 10.0), _gen(2, 2, 0.0, 200.0, 50.0)],
        "series": {"load2": [100.0] * 24},
    }


DAILY_RES = [0.56, 0.53, 0.52, 0.52, 0.54, 0.60, 0.68, 0.74, 0.76, 0.77, 0.78, 0.79,
             0.80, 0.81, 0.84, 0.88, 0.98, 1.00, 0.99, 0.96, 0.88, 0.78, 0.68, 0.61]
DAILY_COM = [0.50, 0.48, 0.47, 0.47, 0.49, 0.55, 0.66, 0.80, 0.90, 0.95, 0.98, 1.00,
             1.00, 0.99, 0.97, 0.93, 0.88, 0.82, 0.75, 0.68, 0.62, 0.58, 0.54, 0.51]
DAILY_IND = [0.90, 0.89, 0.89, 0.89, 0.90, 0.92, 0.95, 0.98, 1.00, 1.00, 1.00, 1.00,
             1.00, 1.00, 1.00, 1.00, 0.99, 0.98, 0.97, 0.96, 0.95, 0.93, 0.92, 0.91]
DAILY_METRO = [0.50, 0.47, 0.46, 0.46, 0.48, 0.54, 0.60, 0.64, 0.66, 0.67, 0.68, 0.68,
               0.68, 0.69, 0.74, 0.95, 1.00, 0.99, 0.96, 0.72, 0.64, 0.60, 0.56, 0.52]
DAILY_WIND = [0.90, 0.92, 0.93, 0.93, 0.92, 0.88, 0.75, 0.50, 0.20, 0.12, 0.10, 0.10,
              0.10, 0.12, 0.18, 0.30, 0.42, 0.48, 0.55, 0.62, 0.72, 0.80, 0.85, 0.88]
DAILY_SOLAR = [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.05, 0.20, 0.42, 0.62, 0.78, 0.88,
               0.92, 0.90, 0.80, 0.64, 0.42, 0.20, 0.05, 0.0, 0.0, 0.0, 0.0, 0.0]


def _series(shape, days, rng, season_amp, noise, clip=(0.0, 1.0)):
    out = []
    for d in range(days):
        season = 1.0 + season_amp * math.sin(2.0 * math.pi * (d + 10) / days)
        day = season * (1.0 + noise * rng.standard_normal())
        for h in range(24):
            v = shape[h] * day * (1.0 + 0.25 * noise * rng.standard_normal())
            out.append(min(max(v, clip[0]), clip[1]))
    return out


def grid20(days=56, seed=20241):
    """Twenty-bus congested system.

    Central zone (1-10): bulk thermal fleet and a meshed 230/345 kV core.
    North pocket (11-14): cheap wind behind two weak ties; low prices but no
    import capability when the wind drops.
    Metro zone (15-20): evening-peaking load served mostly over three ties.
    """
    rng = np.random.default_rng(seed)
    buses = [
        _bus(1, 345.0, "central", -97.40, 31.60, "ind", 40.0),
        _bus(2, 500.0, "central", -97.10, 31.90),
        _bus(3, 230.0, "central", -97.70, 31.95, "res", 110.0),
        _bus(4, 230.0, "central", -97.20, 31.40, "com", 90.0),
        _bus(5, 230.0, "central", -97.60, 31.30, "res", 120.0),
        _bus(6, 138.0, "central", -97.00, 31.10, "com", 60.0),
        _bus(7, 230.0, "central", -96.80, 31.55, "ind", 80.0),
        _bus(8, 138.0, "central", -96.90, 31.85, "res", 70.0),
        _bus(9, 230.0, "central", -96.70, 31.25, "res", 90.0),
        _bus(10, 13.8, "central", -97.55, 31.75),
        _bus(11, 138.0, "north", -98.10, 32.50, "res", 20.0),
        _bus(12, 138.0, "north", -98.40, 32.75, "res", 10.0),
        _bus(13, 138.0, "north", -98.20, 32.95, "res", 10.0),
        _bus(14, 138.0, "north", -97.90, 32.70, "res", 20.0),
        _bus(15, 138.0, "metro", -96.50, 31.00, "metro", 60.0),
        _bus(16, 138.0, "metro", -96.35, 31.20, "metro", 70.0),
        _bus(17, 138.0, "metro", -96.20, 31.10, "metro", 55.0),
        _bus(18, 138.0, "metro", -96.30, 30.90, "metro", 65.0),
        _bus(19, 138.0, "metro", -96.10, 30.85, "metro", 50.0),
        _bus(20, 138.0, "metro", -96.45, 30.80, "metro", 45.0),
    ]
    lines = [
        (1, 2, 0.020, 700), (1, 3, 0.040, 450), (2, 4, 0.030, 500), (3, 4, 0.050, 350),
        (3, 5, 0.050, 250), (4, 5, 0.040, 250), (4, 7, 0.050, 350), (5, 6, 0.060, 200),
        (6, 7, 0.060, 400), (7, 8, 0.050, 220), (5, 9, 0.060, 170), (8, 9, 0.050, 150),
        (2, 7, 0.040, 450), (10, 1, 0.030, 250), (10, 3, 0.050, 200),
        (11, 12, 0.030, 300), (12, 13, 0.030, 300), (13, 14, 0.030, 300), (11, 14, 0.040, 300),
        (11, 3, 0.120, 50), (14, 5, 0.120, 50),
        (15, 16, 0.030, 250), (16, 17, 0.030, 250), (17, 18, 0.030, 250), (18, 19, 0.030, 250),
        (19, 20, 0.030, 250), (15, 20, 0.040, 250), (16, 19, 0.040, 200),
        (15, 6, 0.060, 195), (16, 7, 0.050, 210), (18, 9, 0.060, 200),
    ]
    branches = [_line(i + 1, f, t, x, lim) for i, (f, t, x, lim) in enumerate(lines)]
    gens = [
        _gen(1, 1, 150.0, 400.0, 19.0, 0.010, 75.0, ramp=200.0, min_up=4, min_down=4, startup=400.0),
        _gen(2, 2, 80.0, 350.0, 26.0, 0.015, 50.0, ramp=250.0, min_up=2, min_down=2, startup=175.0),
        _gen(3, 4, 50.0, 300.0, 30.0, 0.020, 40.0, ramp=250.0, min_up=2, min_down=2, startup=125.0),
        _gen(4, 8, 20.0, 300.0, 48.0, 0.050, 15.0, ramp=200.0, startup=40.0),
        _gen(5, 10, 0.0, 150.0, 14.0),
        _gen(6, 6, 0.0, 150.0, 0.0, profile="solar"),
        _gen(7, 12, 0.0, 150.0, 1.0, profile="wind12"),
        _gen(8, 13, 0.0, 120.0, 1.5, profile="wind13"),
        _gen(9, 17, 5.0, 30.0, 65.0, 0.080, 40.0, ramp=30.0, startup=100.0),
        _gen(10, 19, 0.0, 40.0, 38.0),
    ]
    wind_a = _series(DAILY_WIND, days, rng, 0.10, 0.08)
    wind_b = _series(DAILY_WIND, days, rng, 0.10, 0.08)
    series = {
        "res": _round(_series(DAILY_RES, days, rng, 0.08, 0.02, (0.0, 1.2))),
        "com": _round(_series(DAILY_COM, days, rng, 0.05, 0.02, (0.0, 1.2))),
        "ind": _round(_series(DAILY_IND, days, rng, 0.02, 0.01, (0.0, 1.2))),
        "metro": _round(_series(DAILY_METRO, days, rng, 0.08, 0.02, (0.0, 1.2))),
        "solar": _round([150.0 * v for v in _series(DAILY_SOLAR, days, rng, 0.15, 0.05)]),
        "wind12": _round([150.0 * v for v in wind_a]),
        "wind13": _round([120.0 * v for v in wind_b]),
    }
    return {"base_mva": 100.0, "slack_bus": 1, "buses": buses, "branches": branches,
            "generators": gens, "series": series}


def case3():
    shape = DAILY_RES
    return {
        "base_mva": 100.0,
        "slack_bus": 1,
        "buses": [_bus(1, 230.0, "a", -97.0, 31.0), _bus(2, 230.0, "a", -96.8, 31.2, "l2", 120.0),
                  _bus(3, 138.0, "b", -96.6, 31.0, "l3", 80.0)],
        "branches": [_line(1, 1, 2, 0.05, 150.0), _line(2, 2, 3, 0.05, 120.0), _line(3, 1, 3, 0.05, 150.0)],
        "generators": [_gen(1, 1, 20.0, 300.0, 20.0, 0.01, 100.0, startup=300.0, min_up=2, min_down=2),
                       _gen(2, 3, 0.0, 150.0, 35.0, 0.02)],
        "series": {"l2": _round(shape), "l3": _round(shape)},
    }


def case5():
    """Five-bus ring after the well-known PJM teaching case."""
    return {
        "base_mva": 100.0,
        "slack_bus": 4,
        "buses": [_bus(1, 230.0, "a", -97.0, 31.0), _bus(2, 230.0, "a", -96.8, 31.1, "l", 300.0),
                  _bus(3, 230.0, "a", -96.6, 31.0, "l", 300.0), _bus(4, 230.0, "a", -96.7, 30.8, "l", 400.0),
                  _bus(5, 230.0, "a", -96.9, 30.8)],
        "branches": [_line(1, 1, 2, 0.0281, 400.0), _line(2, 1, 4, 0.0304, 400.0), _line(3, 1, 5, 0.0064, 400.0),
                     _line(4, 2, 3, 0.0108, 400.0), _line(5, 3, 4, 0.0297, 400.0), _line(6, 4, 5, 0.0297, 240.0)],
        "generators": [_gen(1, 1, 0.0, 110.0, 14.0), _gen(2, 1, 0.0, 100.0, 15.0),
                       _gen(3, 3, 0.0, 520.0, 30.0), _gen(4, 4, 0.0, 200.0, 40.0),
                       _gen(5, 5, 0.0, 600.0, 10.0)],
        "series": {"l": _round([0.6 + 0.4 * v for v in DAILY_RES])},
    }


def menus():
    default = [
        {"id": "firm", "kind": "firm"},
        {"id": "pause", "kind": "pause"},
        {"id": "shift", "kind": "shift"},
    ]
    relaxed = [
        {"id": "firm", "kind": "firm"},
        {"id": "pause", "kind": "pause", "ramp_fraction": 0.6},
        {"id": "shift", "kind": "shift", "ramp_fraction": 0.6},
    ]
    return {"default.json": default, "relaxed_ramp.json": relaxed}


GOLDEN_TOML = """# Golden run on the congested 20-bus fixture.
case = "../cases/grid20.json"
menu = "../menus/default.json"
sizes_mw = [200.0]
tau_pr = 0.95
eps_mu = 1e-4
vmin_kv = 24.0
vmax_kv = 500.0
top_k = 5
hour_sample = "every4+peak"
days = 4
reserve_fraction = 0.03
output_dir = "../../out/golden"
"""

SWEEP_TOML = """# Sensitivity sweeps on the congested 20-bus fixture. Pause and shift use a
# 0.6 P ramp bound so that every swept alpha yields a valid envelope.
case = "../cases/grid20.json"
menu = "../menus/relaxed_ramp.json"
sizes_mw = [200.0]
tau_pr = 0.95
eps_mu = 1e-4
vmin_kv = 24.0
vmax_kv = 500.0
top_k = 5
hour_sample = "every4+peak"
days = 4
reserve_fraction = 0.03
output_dir = "../../out/sweep"
"""


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", type=Path, default=ROOT / "data")
    args = ap.parse_args()
    cases = args.out / "cases"
    cases.mkdir(parents=True, exist_ok=True)
    for name, build in (("case2", case2), ("case3", case3), ("case5", case5), ("grid20", grid20)):
        (cases / f"{name}.json").write_text(json.dumps(build(), indent=1) + "\n")
    menu_dir = args.out / "menus"
    menu_dir.mkdir(parents=True, exist_ok=True)
    for name, menu in menus().items():
        (menu_dir / name).write_text(json.dumps(menu, indent=1) + "\n")
    cfg = args.out / "configs"
    cfg.mkdir(parents=True, exist_ok=True)
    (cfg / "golden.toml").write_text(GOLDEN_TOML)
    (cfg / "sweep.toml").write_text(SWEEP_TOML)


if __name__ == "__main__":
    main()
