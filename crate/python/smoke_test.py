#!/usr/bin/env python3
"""Smoke test for the magnon_blockade_py extension module.

Builds expected: `cargo build [--release] -p magnon-blockade-python`.
The script locates the cdylib under target/, stages it under an importable
name, and exercises the main entry points end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> Path:
    override = sys.argv[1] if len(sys.argv) > 1 else None
    candidates = (
        [Path(override)]
        if override
        else [
            REPO / "target" / "release" / "libmagnon_blockade_py.so",
            REPO / "target" / "debug" / "libmagnon_blockade_py.so",
        ]
    )
    for lib in candidates:
        if lib.exists():
            stage = Path(tempfile.mkdtemp(prefix="magnon_blockade_py_"))
            shutil.copy2(lib, stage / "magnon_blockade_py.so")
            return stage
    sys.exit(
        "extension module not found; run "
        "`cargo build --release -p magnon-blockade-python` first"
    )


sys.path.insert(0, str(stage_module()))

import magnon_blockade_py as mb  # noqa: E402


def approx(x, y, rel):
    return abs(x - y) <= rel * max(abs(x), abs(y))


def main():
    print(f"module version {mb.version()}")

    params = mb.SystemParams(delta_c=2.0, delta_m=2.0, g_a=2.0, g_b=0.0,
                             j=0.0, o_drive=0.01, kappa_c=2.5, kappa_m=1.0)

    dt_c, dt_m = mb.complex_detunings(params)
    assert approx(dt_c.real, 2.0, 1e-12) and approx(dt_c.imag, -1.25, 1e-12)

    e_opt, phi_opt, degenerate = mb.optimal_drive(params)
    assert not degenerate and e_opt > 0.0
    print(f"optimal drive: e = {e_opt:.6e}, phi = {phi_opt / math.pi:.6f} pi")

    # the two amplitude routes agree at a generic drive
    params.e = e_opt / 3.0
    params.phi = 1.0
    closed = mb.closed_form_amplitudes(params)
    oracle = mb.truncated_solve(params)
    for key, value in closed.items():
        assert abs(value - oracle[key]) <= 1e-10 * max(abs(value), abs(oracle[key]), 1e-30), key

    # the pair amplitude is nulled at the optimum
    params.e = e_opt
    params.phi = phi_opt
    nulled = mb.closed_form_amplitudes(params)
    assert abs(nulled["c200"]) <= 1e-12 * abs(closed["c200"])

    # directional blockade in the master equation
    obs = mb.steady_state_observables(params, n_max=2)
    print(f"g2_a = {obs['g2_a']:.4e}, g2_b = {obs['g2_b']:.4e}, n_a = {obs['n_a']:.3e}")
    assert obs["g2_a"] < 1e-2
    assert obs["g2_b"] > 1.0

    # reversing the field swaps the statistics (generic drive point, where
    # g2 is not floor-dominated by the interference null)
    params.e = e_opt / 3.0
    params.phi = 1.0
    fwd = mb.steady_state_observables(params, n_max=2)
    rev = mb.steady_state_observables(params.swapped(), n_max=2)
    assert approx(rev["g2_b"], fwd["g2_a"], 1e-8)
    assert approx(rev["g2_a"], fwd["g2_b"], 1e-8)

    # analytic route tracks the master equation away from the null
    weak = mb.SystemParams(o_drive=1e-3, g_a=2.0, delta_c=2.0, delta_m=2.0,
                           kappa_c=2.5, phi=1.0)
    e_opt, _, _ = mb.optimal_drive(weak)
    weak.e = e_opt / 10.0
    ana = mb.g2_analytic(weak, "a")
    master = mb.steady_state_observables(weak)["g2_a"]
    assert approx(ana, master, 0.2), (ana, master)

    # small sweep through the config surface
    columns, rows = mb.run_sweep(
        "use_optimal_drive = true\n"
        "sweep.1 = phi, 0, 6.283185307179586, 9\n"
    )
    assert len(rows) == 9 and len(columns) == len(rows[0])
    assert "g2_a_master" in columns and "status" in columns
    assert all(row[columns.index("status")] == 0.0 for row in rows)

    # errors surface as ValueError
    try:
        mb.g2_analytic(mb.SystemParams(g_b=0.0, j=0.0, e=1e-4), "b")
    except ValueError as exc:
        assert "decoupled" in str(exc)
    else:
        sys.exit("expected ValueError for the decoupled mode")

    print("smoke test passed")


if __name__ == "__main__":
    main()
