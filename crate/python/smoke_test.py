#!/usr/bin/env python3
"""Smoke test for the Python bindings.

Builds nothing itself: expects `cargo build -p intervalopt-py` (or --release)
to have produced the extension library, copies it under an importable name,
and exercises the bound API end to end.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def locate_extension() -> Path:
    candidates = [
        REPO / "target" / profile / name
        for profile in ("release", "debug")
        for name in ("libintervalopt_py.so", "libintervalopt_py.dylib", "intervalopt_py.dll")
    ]
    for path in candidates:
        if path.exists():
            return path
    sys.exit("extension not found; run `cargo build -p intervalopt-py` first")


def main() -> None:
    ext = locate_extension()
    staging = Path(tempfile.mkdtemp(prefix="intervalopt_py_"))
    shutil.copy2(ext, staging / "intervalopt_py.so")
    sys.path.insert(0, str(staging))
    import intervalopt_py as iv

    # Interval orderings and scalarization
    a = iv.Interval(1.0, 4.0)
    b = iv.Interval(2.0, 5.0)
    assert a.leq_l(b) and a.leq_u(b) and a.leq(b)
    assert not b.leq(a)
    assert a.strictly_dominates(b)
    assert math.isclose(a.scalarize(0.25), 0.25 * 1.0 + 0.75 * 4.0)
    try:
        iv.Interval(3.0, 1.0)
    except ValueError:
        pass
    else:
        raise AssertionError("reversed endpoints must be rejected")

    # Pareto test against a pool
    pool = [iv.Interval(0.0, 10.0), iv.Interval(2.0, 3.0)]
    assert iv.is_pareto_optimal(iv.Interval(1.0, 2.0), pool)
    assert not iv.is_pareto_optimal(iv.Interval(5.0, 6.0), pool)

    # Projection
    ball = iv.Constraint.ball([0.0, 0.0], 1.0)
    p = ball.project([3.0, 4.0])
    assert math.isclose(p[0], 0.6) and math.isclose(p[1], 0.8)
    assert ball.project(p) == p
    box = iv.Constraint.box_([-1.0, 0.0], [1.0, 2.0])
    assert box.project([5.0, -5.0]) == [1.0, 0.0]
    assert math.isclose(box.distance([2.0, 1.0]), 1.0)

    # The 5-agent run: lambda consensus at 0.5 and the network mean near 1
    r = iv.run_five_agent(seed=1)
    assert r.iterations == 500
    assert all(abs(l - 0.5) < 1e-6 for l in r.final_lambda)
    assert abs(r.mean_final_x[0] - 1.0) < 0.1
    assert math.isclose(r.f_star, 12.5, abs_tol=1e-6)
    assert r.consensus_error < 0.05

    # Scalarization sweep with a closed-form front
    front = iv.pareto_front_designed([0.1 * i for i in range(1, 10)])
    for pt in front:
        assert abs(pt.x_star[0] - (3.0 - 2.0 * pt.weight)) < 1e-3
        assert pt.pareto

    print("smoke test: all bindings OK")


if __name__ == "__main__":
    main()
