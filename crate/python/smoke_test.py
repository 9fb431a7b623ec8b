"""Smoke test for the compiled extension.

Build and install first:
    pip install maturin
    maturin build --release -m crates/py/Cargo.toml --out dist
    pip install dist/sirlab_py-*.whl
then run ``python python/smoke_test.py`` or ``pytest python/``.
"""

import json
import math
import tempfile

import sirlab_py


def test_builtins_resolve():
    names = sirlab_py.builtin_scenarios()
    assert set(names) == {"eradication-1d", "endemic-1d", "gap-1d"}
    sc = json.loads(sirlab_py.load_scenario("gap-1d"))
    assert sc["expected_verdict"] == "gap"
    assert len(sirlab_py.scenario_hash("gap-1d")) == 64


def test_validation_error_names_the_key():
    try:
        sirlab_py.load_scenario("gap-1d", ["params.d=0"])
    except ValueError as e:
        assert "d must be positive" in str(e)
    else:
        raise AssertionError("expected a ValueError")


def test_eigenvalue_matches_closed_form():
    lam, continuum = sirlab_py.first_eigenvalue([1.0], [99])
    h = 1.0 / 100
    exact = 2.0 / h**2 * (1.0 - math.cos(math.pi * h))
    assert abs(lam - exact) / exact < 1e-10
    assert abs(continuum - math.pi**2) < 1e-12


def test_gap_run_reports_gap():
    with tempfile.TemporaryDirectory() as out:
        manifest = json.loads(
            sirlab_py.run_scenario("gap-1d", out, ["ensemble.seeds=1", "run.t1=2.0"])
        )
    assert manifest["passed"]
    assert manifest["seeds"][0]["threshold"]["verdict"] == "gap"


def test_trajectory_columns():
    cols = sirlab_py.trajectory("gap-1d", 0, ["run.t1=1.0"])
    assert cols["t"][0] == 0.0 and abs(cols["t"][-1] - 1.0) < 1e-12
    assert len(cols["norm_I"]) == len(cols["t"])


def test_box_counting_segment():
    pts = [[k / 4096.0, 0.0] for k in range(4097)]
    slope, _, counts = sirlab_py.box_counting_dimension(pts, [2.0**-k for k in range(3, 8)])
    assert abs(slope - 1.0) < 0.1
    assert counts == sorted(counts)


if __name__ == "__main__":
    for name, fn in list(globals().items()):
        if name.startswith("test_") and callable(fn):
            fn()
            print(f"ok {name}")
