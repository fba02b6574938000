#!/usr/bin/env python3
"""Smoke test for the glacial_cycles_py extension module.

Builds the cdylib with cargo, loads it, and checks the headline numbers:
equilibria, virtuality, the epsilon bound, and a quick periodic orbit.

Run from the repository root (or anywhere inside it):

    python3 python/smoke_test.py
"""

import pathlib
import shutil
import subprocess
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent


def build_module() -> pathlib.Path:
    subprocess.run(
        ["cargo", "build", "--release", "-p", "glacial-cycles-py"],
        cwd=ROOT,
        check=True,
    )
    built = ROOT / "target" / "release" / "libglacial_cycles_py.so"
    if not built.exists():  # e.g. macOS
        built = ROOT / "target" / "release" / "libglacial_cycles_py.dylib"
    target = ROOT / "python" / "glacial_cycles_py.so"
    shutil.copyfile(built, target)
    return target


def approx(actual, expected, tol):
    assert abs(actual - expected) < tol, f"{actual} != {expected} (tol {tol})"


def main() -> None:
    build_module()
    sys.path.insert(0, str(ROOT / "python"))
    import glacial_cycles_py as gc

    p = gc.Params()
    p.validate()

    # Closed-form checks.
    approx(gc.epsilon_bound(p), 12.0 / 35.0, 1e-12)
    approx(gc.w_nullcline(1.0, p), 6.027125506072874, 1e-10)
    approx(gc.eta_nullcline(1.0, "retreat", p), 7.737404858299595, 1e-10)
    approx(gc.switching_ice_line(0.95, p), 0.92, 1e-12)
    approx(gc.switching_function(0.0, 0.5, 0.9, p), -1.225, 1e-12)
    approx(gc.insolation(0.0, p), 1.241, 1e-12)

    # Equilibria: the standard values give two virtual sinks.
    eqs = gc.equilibria(p)
    assert len(eqs) == 4, eqs
    retreat_sink = next(
        e for e in eqs if e["regime"] == "retreat" and e["stability"] == "sink"
    )
    approx(retreat_sink["w"], 5.08, 0.05)
    approx(retreat_sink["eta"], 0.95, 0.05)
    sinks = [e for e in eqs if e["stability"] == "sink"]
    assert all(e["classification"] == "virtual" for e in sinks), sinks

    # Inadmissible parameters raise.
    bad = gc.Params(alpha1=0.62)
    try:
        bad.validate()
    except ValueError:
        pass
    else:
        raise AssertionError("degenerate albedo should be rejected")

    # A short hybrid run alternates regimes.
    p.epsilon = 0.3
    run = gc.simulate(p, max_time=40.0, sample_interval=0.1)
    assert run["termination"] == "max_time"
    kinds = [e["kind"] for e in run["events"]]
    assert len(kinds) >= 3 and all(
        k in ("sigma_plus", "sigma_minus") for k in kinds
    ), kinds
    assert kinds[:2] in (["sigma_minus", "sigma_plus"], ["sigma_plus", "sigma_minus"])

    # The periodic orbit at epsilon = 0.3.
    orbit = gc.find_orbit(p)
    approx(orbit["w"], 3.08920, 1e-3)
    approx(orbit["eta"], 0.903366, 1e-4)
    approx(orbit["period"], 10.0034, 1e-2)
    assert orbit["closure_error"] < 1e-8
    assert 0.0 < orbit["contraction_estimate"] < 1.0

    print("smoke test passed:", len(eqs), "equilibria;",
          f"orbit period {orbit['period']:.4f} at epsilon=0.3")


if __name__ == "__main__":
    main()
