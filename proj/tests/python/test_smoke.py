import json
import math

import pytest

import reflectlab as rl


def test_version_and_listing():
    assert rl.__version__
    names = rl.list_scenarios()
    assert "sl2-positivity" in names
    assert len(names) == 13


def test_positivity_scenario():
    rep = rl.run_scenario("sl2-positivity", {"s": 0.25})
    assert rep["passed"]
    assert rep["verdicts"]["psd"]
    assert json.loads(rep["json"])["scenario"] == "sl2-positivity"
    bad = rl.run_scenario("sl2-positivity", {"s": 3})
    assert not bad["verdicts"]["psd"]


def test_run_is_deterministic():
    a = rl.run_scenario("cayley-table", {"n_max": 4}, seed=5)
    b = rl.run_scenario("cayley-table", {"n_max": 4}, seed=5)
    assert a["json"] == b["json"]


def test_errors_are_translated():
    with pytest.raises(rl.Error):
        rl.run_scenario("sl2-positivity", {"nope": 1})
    with pytest.raises(rl.Error):
        rl.q_from_mu(-1.0)


def test_jform_and_cayley():
    ev = rl.jform_eigenvalues(0.5, bumps=6, order=40)
    assert len(ev) == 6
    assert ev[0] >= -1e-9 * ev[-1]
    rows = rl.cayley_table(2)
    assert rows[-1]["R"] == 3 and rows[-1]["Lpos"] == 3


def test_axb_helpers():
    mu = complex(0.7, -1.3)
    q = rl.q_from_mu(mu)
    r = rl.qfield_residuals(q)
    assert r["idempotent"] < 1e-14
    assert r["trace_qjq"] == pytest.approx(2 * mu.real / (1 + abs(mu) ** 2))
    assert rl.escape_time(0.0)["value"] == pytest.approx(1.0, abs=1e-8)
    assert rl.escape_time(1.0, direction="-")["diverges"]


def test_kernels():
    assert rl.kernel_J(0.5, 0.5, 1.0) == 1.0
    assert rl.sublaplacian_F(1.0) == pytest.approx(2 * math.pi * 0.42102443824070834, rel=1e-12)
