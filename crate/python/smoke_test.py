#!/usr/bin/env python3
"""Smoke test for the metagames_py extension module.

Builds nothing itself: run `cargo build --release -p metagames-py` first.
The script locates the compiled cdylib, stages it under an importable name,
and exercises the main types and operations against known values.
"""

import json
import math
import pathlib
import shutil
import sys
import tempfile

ROOT = pathlib.Path(__file__).resolve().parents[1]


def load_module():
    candidates = [
        ROOT / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libmetagames_py.so", "metagames_py.so", "libmetagames_py.dylib")
    ]
    lib = next((p for p in candidates if p.exists()), None)
    if lib is None:
        sys.exit("build the extension first: cargo build --release -p metagames-py")
    staging = pathlib.Path(tempfile.mkdtemp(prefix="metagames_py_"))
    shutil.copy2(lib, staging / "metagames_py.so")
    sys.path.insert(0, str(staging))
    import metagames_py

    return metagames_py


def close(a, b, tol=1e-9):
    return abs(a - b) <= tol


def main():
    m = load_module()

    # Closed-form equilibria of the opposing-interests example.
    g = m.Game.g_oi(2.0, 3.0)
    p, q = g.mixed_ne()
    assert close(p, 2.0 / 3.0) and close(q, 0.4), (p, q)
    u1, u2 = g.expected_utilities(p, q)
    assert close(u1, 0.2) and close(u2, 1.0 / 3.0), (u1, u2)
    assert g.pure_ne() == []

    # Dominance-solvable example: elimination and commitment value.
    ds = m.Game.g_ds(1.0, 3.0)
    assert ds.is_dominance_solvable()
    trace = json.loads(ds.iterated_elimination())
    assert trace["surviving_rows"] == [1] and trace["surviving_cols"] == [0]
    action, reply, value = ds.stackelberg("row")
    assert (action, reply, value) == (0, 1, 3.0), (action, reply, value)
    assert close(ds.cce_violation([[1.0, 0.0], [0.0, 0.0]]), 1.0)

    # Deterministic dynamics approaching the mixed equilibrium.
    spec = json.dumps({"algo": "mw", "eta": 0.01})
    a = json.loads(m.run_dynamics(g, spec, spec, 20000, 1))
    b = json.loads(m.run_dynamics(g, spec, spec, 20000, 1))
    assert a == b, "same seed must reproduce the same trace"
    cells = a["final_distribution"]
    ne_cells = [[p * q, p * (1 - q)], [(1 - p) * q, (1 - p) * (1 - q)]]
    for i in range(2):
        for j in range(2):
            assert abs(cells[i][j] - ne_cells[i][j]) < 0.03, (cells, ne_cells)
    assert max(a["regret_per_round"]) < 0.05

    # Cournot: truth, best-reply manipulation, and the meta-equilibrium.
    out = json.loads(m.cournot_ne(1.0, 1.0, 0.5, 0.5))
    assert close(out["q1"], 1.0 / 6.0) and close(out["price"], 2.0 / 3.0)
    u1, u2 = m.cournot_utilities_at(1.0, 1.0, 0.5, 0.5, 3.0 / 8.0, 0.5)
    assert close(u1, 1.0 / 32.0), u1
    meta = json.loads(m.cournot_meta_equilibrium(1.0, 1.0, 0.5, 0.5))
    assert close(meta["declarations"][0][0], 0.4)
    assert close(meta["utilities"][0], 0.02)
    mf = json.loads(m.cournot_manipulation_free(1.0, 1.0, 0.5, 0.5))
    assert not mf["manipulation_free"]
    assert close(mf["witness"]["declaration"][0], 0.375)

    # Opposing-interests meta-equilibrium: declarations (3, 1/3), truthful
    # utilities preserved.
    fam = m.Family.g_oi_family()
    report = json.loads(fam.oi_meta_equilibrium())
    assert close(report["declarations"][0][0], 3.0)
    assert close(report["declarations"][1][0], 1.0 / 3.0)
    assert close(report["utilities"][0], 0.2) and close(report["utilities"][1], 1.0 / 3.0)
    assert json.loads(fam.natural_space_check()) == "Pass"

    # Families instantiate declared games.
    declared = fam.instantiate([1.0], [3.0])
    dp, dq = declared.mixed_ne()
    assert close(dp, 2.0 / 3.0) and close(dq, 0.5), (dp, dq)

    # Wide dominance-solvable family: the top row can be declared dominant.
    wide = m.Family.g_ds_row_wide_family()
    construction = json.loads(wide.construct_dominant_declaration("row", 0, 1.0))
    assert "Declaration" in construction, construction

    # Quantity dynamics reach the declared-game equilibrium.
    q1, q2 = m.run_cournot_dynamics(
        1.0, 1.0, 0.5, 0.5, 0.4, 0.4, json.dumps({"algo": "ogd"}), 50000, 1
    )
    assert abs(q1 - 0.2) / 0.2 < 0.05 and abs(q2 - 0.2) / 0.2 < 0.05, (q1, q2)

    print("smoke test passed")
    return 0


if __name__ == "__main__":
    sys.exit(main())
