#!/usr/bin/env python3
"""Build the bundled classical-model case files.

Network data comes from the MATPOWER case9 / case39 tables shipped with
PYPOWER; machine dynamic data (H, x'd on a 100 MVA base) are the usual
textbook values for the WSCC 3-machine and New England 10-machine systems.

Steps per case:
  1. AC power flow (PYPOWER Newton-Raphson) for the pre-fault operating point.
  2. Loads converted to constant admittances, generator internal nodes added
     behind x'd, internal EMFs E' computed from the power-flow solution.
  3. Kron reduction to the internal nodes for the pre-fault, fault-on
     (faulted bus shorted to ground) and post-fault (optional branch trip)
     networks.
  4. Pm is set from the pre-fault reduced network at the internal angles so
     the case starts on an equilibrium.

Usage: python3 tools/build_cases.py [output_dir]
"""

import json
import math
import sys
from pathlib import Path

import numpy as np
from pypower.api import ppoption, runpf
from pypower.case9 import case9
from pypower.case39 import case39
from pypower.ext2int import ext2int
from pypower.makeYbus import makeYbus

FREQ_HZ = 60.0

# (H [s], x'd [p.u.]) on 100 MVA, ordered as the case's generator table.
WSCC_DYN = [(23.64, 0.0608), (6.40, 0.1198), (3.01, 0.1813)]
NE_DYN = [
    (42.0, 0.0310),  # G1  bus 30
    (30.3, 0.0697),  # G2  bus 31
    (35.8, 0.0531),  # G3  bus 32
    (28.6, 0.0436),  # G4  bus 33
    (26.0, 0.1320),  # G5  bus 34
    (34.8, 0.0500),  # G6  bus 35
    (26.4, 0.0490),  # G7  bus 36
    (24.3, 0.0570),  # G8  bus 37
    (34.5, 0.0570),  # G9  bus 38
    (500.0, 0.0060),  # G10 bus 39
]


def solve_power_flow(ppc):
    opt = ppoption(VERBOSE=0, OUT_ALL=0)
    for key in ("bus", "gen", "branch"):
        ppc[key] = ppc[key].astype(float)
    res, ok = runpf(ppc, opt)
    if not ok:
        raise RuntimeError("power flow did not converge")
    return ext2int(res)


def reduced_matrix(res, xd, fault_bus=None, trip=None):
    """Kron-reduced admittance at the generator internal nodes."""
    base = res["baseMVA"]
    bus, gen = res["bus"], res["gen"]
    branch = res["branch"].copy()
    if trip is not None:
        f, t = trip
        hit = False
        for row in branch:
            pair = (int(row[0]) + 1, int(row[1]) + 1)
            if pair in ((f, t), (t, f)) and row[10] > 0:
                row[10] = 0  # BR_STATUS
                hit = True
                break
        if not hit:
            raise ValueError(f"branch {trip} not found")
    ybus, _, _ = makeYbus(base, bus, branch)
    ybus = np.asarray(ybus.todense())
    vm = bus[:, 7]
    nb = ybus.shape[0]
    for k in range(nb):
        pd, qd = bus[k, 2] / base, bus[k, 3] / base
        ybus[k, k] += (pd - 1j * qd) / vm[k] ** 2
    ng = len(xd)
    gbus = gen[:, 0].astype(int)
    y = np.zeros((nb + ng, nb + ng), dtype=complex)
    y[:nb, :nb] = ybus
    for i in range(ng):
        yi = 1.0 / (1j * xd[i])
        b = gbus[i]
        y[nb + i, nb + i] += yi
        y[b, b] += yi
        y[nb + i, b] -= yi
        y[b, nb + i] -= yi
    keep_bus = list(range(nb))
    if fault_bus is not None:
        keep_bus.remove(fault_bus - 1)
    yb = y[np.ix_(keep_bus, keep_bus)]
    ygb = y[np.ix_(range(nb, nb + ng), keep_bus)]
    ybg = y[np.ix_(keep_bus, range(nb, nb + ng))]
    ygg = y[nb:, nb:]
    return ygg - ygb @ np.linalg.solve(yb, ybg)


def internal_emf(res, xd):
    base = res["baseMVA"]
    bus, gen = res["bus"], res["gen"]
    emf = []
    for i, row in enumerate(gen):
        b = int(row[0])
        v = bus[b, 7] * np.exp(1j * math.radians(bus[b, 8]))
        s = (row[1] + 1j * row[2]) / base
        current = np.conj(s / v)
        emf.append(v + 1j * xd[i] * current)
    return np.array(emf)


def electrical_power(yred, mag, ang):
    e = mag * np.exp(1j * ang)
    return np.real(e * np.conj(yred @ e))


def case_dict(name, provenance, dyn, res, stages, fault):
    xd = [d[1] for d in dyn]
    emf = internal_emf(res, xd)
    mag, ang = np.abs(emf), np.angle(emf)
    pre = stages["prefault"]
    pm = electrical_power(pre, mag, ang)
    # independent residual check against the AC power-flow generation
    pg = res["gen"][:, 1] / res["baseMVA"]
    resid = np.max(np.abs(pm - pg))
    if resid > 1e-6:
        raise RuntimeError(f"{name}: reduced network disagrees with power flow ({resid})")
    omega_s = 2 * math.pi * FREQ_HZ
    machines = [
        {
            "id": i + 1,
            "inertia": 2 * h / omega_s,
            "mech_power": float(pm[i]),
            "emf": float(mag[i]),
        }
        for i, (h, _) in enumerate(dyn)
    ]

    def stage(m):
        return {"g": np.real(m).tolist(), "b": np.imag(m).tolist()}

    return {
        "schema_version": 1,
        "name": name,
        "provenance": provenance,
        "base_mva": float(res["baseMVA"]),
        "frequency_hz": FREQ_HZ,
        "machines": machines,
        "stages": {k: stage(v) for k, v in stages.items()},
        "initial": {
            "time": 0.0,
            "delta_deg": [math.degrees(a) for a in ang],
            "omega": [0.0] * len(dyn),
        },
        "fault": fault,
    }


def symmetrize(m):
    return 0.5 * (m + m.T)


def build_wscc():
    res = solve_power_flow(case9())
    xd = [d[1] for d in WSCC_DYN]
    pre = reduced_matrix(res, xd)
    on = reduced_matrix(res, xd, fault_bus=8)
    post = reduced_matrix(res, xd, trip=(8, 9))
    stages = {"prefault": pre, "fault_on": on, "postfault": post}
    stages = {k: symmetrize(v) for k, v in stages.items()}
    return case_dict(
        "wscc3",
        "WSCC 3-machine 9-bus system (MATPOWER case9 network, textbook H/x'd). "
        "Three-phase fault at bus 8 (terminal side of G2), cleared by tripping line 8-9. "
        "Constant-impedance loads, classical machines, Kron-reduced to internal nodes.",
        WSCC_DYN,
        res,
        stages,
        {"t0": 0.0, "tc": 0.08, "t_end": 2.0, "dt": 0.001},
    )


def build_ne(fault_bus, trip, tc, t_end):
    res = solve_power_flow(case39())
    xd = [d[1] for d in NE_DYN]
    pre = reduced_matrix(res, xd)
    on = reduced_matrix(res, xd, fault_bus=fault_bus)
    post = reduced_matrix(res, xd, trip=trip) if trip else pre.copy()
    stages = {"prefault": pre, "fault_on": on, "postfault": post}
    stages = {k: symmetrize(v) for k, v in stages.items()}
    trip_txt = f"cleared by tripping line {trip[0]}-{trip[1]}" if trip else "cleared without topology change"
    return case_dict(
        "ne10",
        "New England 10-machine 39-bus system (MATPOWER case39 network, textbook H/x'd; "
        "G1..G10 at buses 30..39). Textbook stand-in data. "
        f"Three-phase fault at bus {fault_bus}, {trip_txt}. "
        "Constant-impedance loads, classical machines, Kron-reduced to internal nodes.",
        NE_DYN,
        res,
        stages,
        {"t0": 0.0, "tc": tc, "t_end": t_end, "dt": 0.001},
    )


def build_smib():
    # 1 machine against an infinite bus: Pmax = E * Eb * B = 1.8 p.u., Pm = 0.9 p.u.
    e, eb, b = 1.2, 1.0, 1.5
    pm = 0.9
    delta0 = math.asin(pm / (e * eb * b))
    h = 3.5
    coupling = {"emf": eb, "g": [0.0], "b": [b]}
    return {
        "schema_version": 1,
        "name": "smib",
        "provenance": "Single machine against an infinite bus; the bus is folded into the "
        "stage as a constant-EMF coupling. Bolted fault: fault-on transfer is zero.",
        "base_mva": 100.0,
        "frequency_hz": FREQ_HZ,
        "machines": [{"id": 1, "inertia": 2 * h / (2 * math.pi * FREQ_HZ), "mech_power": pm, "emf": e}],
        "stages": {
            "prefault": {"g": [[0.0]], "b": [[0.0]], "infinite_bus": coupling},
            "fault_on": {"g": [[0.0]], "b": [[0.0]], "infinite_bus": {"emf": eb, "g": [0.0], "b": [0.0]}},
            "postfault": {"g": [[0.0]], "b": [[0.0]], "infinite_bus": coupling},
        },
        "initial": {"time": 0.0, "delta_deg": [math.degrees(delta0)], "omega": [0.0]},
        "fault": {"t0": 0.0, "tc": 0.2, "t_end": 3.0, "dt": 0.001},
    }


# Fault chosen so that three machines are severely disturbed: two separate
# from the system and one swings back in between.
NE_FAULT = {"fault_bus": 1, "trip": (1, 2), "tc": 0.42, "t_end": 3.0}
NE_CRITICAL = [1, 9, 10]
NE_CR = [1, 10]


def main():
    out = Path(sys.argv[1] if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent / "cases")
    out.mkdir(parents=True, exist_ok=True)
    ne = build_ne(**NE_FAULT)
    ne["critical"] = NE_CRITICAL
    ne["separation"] = {"cr": NE_CR}
    for case in (build_smib(), build_wscc(), ne):
        path = out / f"{case['name']}.json"
        path.write_text(json.dumps(case, indent=2) + "\n")
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
