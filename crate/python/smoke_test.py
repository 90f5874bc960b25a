#!/usr/bin/env python3
"""Smoke test for the `_gsparse` extension module.

Builds nothing itself: it locates the cdylib produced by
`cargo build -p gsparse-python` (release or debug), stages it under an
importable name, and exercises the main types and operations end to end.

Run from the repository root:

    cargo build -p gsparse-python --release
    python3 python/smoke_test.py
"""

import json
import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def stage_module() -> None:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("lib_gsparse.so", "_gsparse.so", "lib_gsparse.dylib")
    ]
    built = next((p for p in candidates if p.exists()), None)
    if built is None:
        sys.exit("cdylib not found; run `cargo build -p gsparse-python` first")
    stage = Path(tempfile.mkdtemp(prefix="gsparse-py-"))
    shutil.copy2(built, stage / "_gsparse.so")
    sys.path.insert(0, str(stage))


def approx(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


def main() -> None:
    stage_module()
    import _gsparse as gs

    checks = 0

    def ok(cond: bool, label: str) -> None:
        nonlocal checks
        if not cond:
            sys.exit(f"FAIL: {label}")
        checks += 1
        print(f"ok {checks:2d} - {label}")

    # Partition and norms on the worked four-dimensional example.
    p = gs.Partition(4, [[1, 2], [3, 4]], 2)
    ok(p.s_max == 1 and p.l_min == 2, "partition derived stats")
    ok(len(p.enumerate()) == 2, "two group k-sparse sets")

    x = [1.0, 0.1, 0.6, 0.6]
    gl = gs.Norm.gl()
    ok(approx(gl.eval(p, x), math.sqrt(1.01) + math.sqrt(0.72)), "group LASSO value")
    ok(approx(gs.Norm.l1().eval(p, x), 2.3), "l1 value")

    sigma, lam0 = gs.sparsity_index(p, gs.Norm.l1(), x)
    ok(approx(sigma, 1.1) and lam0 == [3, 4], "sparsity index and support")

    dec = gs.optimal_decomposition(p, gs.Norm.l1(), x)
    ok(dec["stages"][0]["groups"] == [2], "stage-0 support is G2")
    ok(dec["parts"][0] == [0.0, 0.0, 0.6, 0.6], "stage-0 part")
    ok(gs.check_interleaving_counterexample(p, x), "magnitude interleaving detected")

    rep = gl.check_decomposability(p, gamma=1.0, trials=200, seed=1)
    ok(rep["passed"], "group LASSO decomposability")

    # Constants, thresholds, bound coefficients.
    p20 = gs.Partition(40, [[4 * i + j for j in range(1, 5)] for i in range(10)], 20)
    consts = gs.closed_form_constants(gs.Norm.gl(), p20)
    ok(approx(consts["d"], math.sqrt(5)) and consts["f"] == 1.0, "group LASSO constants")
    thr = gs.compressibility_threshold(gs.Norm.gl(), p20)
    ok(approx(thr, 1.0 / (math.sqrt(10) + 1)), "threshold for s_max = 5")
    b = gs.bound_coefficients(gs.Norm.gl(), p20, 0.1, sigma=0.5, eps=0.05)
    ok(b["compressible"] and b["l2_bound"] > 0, "bound coefficients evaluate")

    # Isometry certification on a small matrix.
    a = gs.generate_matrix(12, 8, seed=3)
    p8 = gs.Partition(8, [[1, 2], [3, 4], [5, 6], [7, 8]], 4)
    g = gs.grip_constant(a, p8, order="k")
    r = gs.rip_constant(a, 4)
    ok(g["delta"] <= r["delta"] + 1e-12, "group constant below classical")

    # Recovery round trip: 1 active group, noiseless.
    truth = [0.0] * 8
    truth[2], truth[3] = 1.2, -0.8
    y = [sum(ai * xi for ai, xi in zip(row, truth)) for row in a]
    res = gs.recover(a, y, 0.0, gs.Norm.gl(), p8)
    err = math.sqrt(sum((u - v) ** 2 for u, v in zip(res["x_hat"], truth)))
    ok(res["converged"] and err < 1e-6, f"exact recovery (error {err:.2e})")

    # Sample-complexity reference configuration.
    sec6 = gs.repro_sec6()
    ok(approx(sec6["ratio_formula"], 0.5594, 1e-3), "reference ratio")
    ok(abs(sec6["scale_factor_s"] - 10.0) < 0.05, "x10 discrepancy flagged")
    plan = gs.sampling_plan(20000, 20, 6000, 5, 0.25, 1e-8)
    ok(plan["m_gs"] < plan["m_s"], "group bound is smaller")
    ok(approx(gs.subgaussian_c(2.0, 0.5), 1.0 / 36.0), "concentration constant")

    # Experiment driver through the JSON config interface.
    cfg = {
        "partition": {"n": 8, "k": 4, "groups": [[1, 2], [3, 4], [5, 6], [7, 8]]},
        "norm": {"variant": "gl"},
        "m": 6,
        "support_groups": 2,
        "trials": 2,
        "seed": 9,
        "delta_certification": "exact",
    }
    csv, agg = gs.run_experiment(json.dumps(cfg))
    ok(csv.startswith("# gsparse experiment report v1"), "experiment CSV header")
    ok(agg["trials"] == 2 and agg["failed"] == 0, "experiment aggregates")

    print(f"\nsmoke test passed: {checks} checks")


if __name__ == "__main__":
    main()
