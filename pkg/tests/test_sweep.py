import csv
import io
import json

import numpy as np
import pytest

from optoupb.errors import ConfigError
from optoupb.liouvillian import SystemParams, delta_opt, with_optimal_detuning
from optoupb.observables import g2_zero
from optoupb.steady import steady_state
from optoupb.sweep import (SweepConfig, column_name, minimize_g2_over_g, parse_config,
                           parse_grid, point_params, run_sweep, to_csv, to_json,
                           write_result)

BASE = SystemParams(omega_m=24.0, coupling_j=2.6, coupling_g=1.16, drive_eps=0.3)
SMALL = dict(cutoffs=(3, 2), outputs=("g2", "n1"))


def test_single_point_sweep_is_bit_identical_to_a_solve():
    cfg = SweepConfig(base=BASE, axes=(("J", (2.6,)),), **SMALL)
    row = run_sweep(cfg).rows[0]
    direct = g2_zero(steady_state(with_optimal_detuning(BASE), 3, 2))
    assert row["g2"] == direct
    assert row["N_ph"] == 3 and row["N_m"] == 2 and row["error"] == ""


def test_grid_rows_are_row_major():
    cfg = SweepConfig(base=BASE, axes=(("g", (0.5, 1.0, 1.5)), ("J", (1.5, 2.5, 3.5))), **SMALL)
    res = run_sweep(cfg)
    assert len(res.rows) == 9
    keys = [(r["g_over_kappa"], r["J_over_kappa"]) for r in res.rows]
    assert keys == [(g, j) for g in (0.5, 1.0, 1.5) for j in (1.5, 2.5, 3.5)]
    assert res.columns[:4] == ("g_over_kappa", "J_over_kappa", "g2", "n1")


def test_derived_detuning_holds_exactly_at_every_point():
    cfg = SweepConfig(base=BASE, axes=(("g", (0.3, 1.2)), ("J", (1.0, 4.0))), **SMALL)
    for values in cfg.points():
        p = point_params(cfg, values)
        assert p.delta1 == delta_opt(p.coupling_j, p.kappa1)
        assert p.delta2 - p.coupling_g ** 2 / p.omega_m == pytest.approx(p.delta1, abs=1e-15)


def test_failed_points_are_recorded_in_row():
    # no optimal detuning exists below J = kappa / sqrt(2)
    cfg = SweepConfig(base=BASE, axes=(("J", (0.5, 2.0)),), **SMALL)
    res = run_sweep(cfg)
    bad, good = res.rows
    assert "ValueError" in bad["error"] and bad["g2"] is None
    assert good["error"] == "" and good["g2"] > 0
    assert res.failures == [bad]
    line = to_csv(res).splitlines()[1].split(",")
    assert line[1] == "" and "nan" not in to_csv(res).lower()


def test_parallel_workers_keep_order_and_values():
    axes = (("J", (1.2, 2.0, 3.0, 4.0)),)
    serial = run_sweep(SweepConfig(base=BASE, axes=axes, **SMALL))
    parallel = run_sweep(SweepConfig(base=BASE, axes=axes, workers=2, **SMALL))
    for a, b in zip(serial.rows, parallel.rows):
        assert a["J_over_kappa"] == b["J_over_kappa"]
        assert a["g2"] == b["g2"] and a["n1"] == b["n1"]


def test_repeated_runs_are_bitwise_reproducible():
    cfg = SweepConfig(base=BASE, axes=(("eps", (0.1, 0.5)),), outputs=("g2",))
    a, b = run_sweep(cfg), run_sweep(cfg)
    for ra, rb in zip(a.rows, b.rows):
        assert {k: v for k, v in ra.items() if k != "solve_time"} == \
               {k: v for k, v in rb.items() if k != "solve_time"}


def test_temperature_axis_sets_thermal_occupation():
    cfg = SweepConfig(base=BASE, axes=(("k_BT", (24.0,)),), **SMALL)
    assert point_params(cfg, (24.0,)).n_th == pytest.approx(1 / (np.e - 1))
    assert column_name("k_BT") == "k_BT_over_kappa"


def test_weak_pump_model_rows():
    cfg = SweepConfig(base=BASE.replace(drive_eps=0.0), axes=(("J", (2.0, 3.0)),),
                      model="weak-pump", outputs=("g2",))
    res = run_sweep(cfg)
    assert all(r["error"] == "" and 0 < r["g2"] < 1 for r in res.rows)
    p = point_params(cfg, (2.0,))
    assert p.delta1 == p.delta2


@pytest.mark.parametrize("kwargs", [
    dict(axes=(("foo", (1.0,)),)),
    dict(axes=(("J", ()),)),
    dict(axes=(("J", (1.0, 3.0, 2.0)),)),
    dict(axes=(("J", (1.0, float("inf"))),)),
    dict(axes=(("J", (1.0,)), ("coupling_j", (2.0,)))),
    dict(outputs=("g3",)),
    dict(model="weak-pump", outputs=("n1",)),
    dict(cutoffs=(-1, 2)),
    dict(workers=0),
])
def test_config_invariants(kwargs):
    with pytest.raises(ConfigError):
        SweepConfig(base=BASE, **kwargs)


def test_grid_syntax():
    assert parse_grid("1, 2,3") == (1.0, 2.0, 3.0)
    assert parse_grid("linspace(0, 1, 5)")[1] == 0.25
    assert parse_grid("geomspace(0.1, 10, 3)") == pytest.approx((0.1, 1.0, 10.0))
    with pytest.raises(ValueError):
        parse_grid("linspace(0, 1)")


CONFIG = """\
# rates in units of kappa
[params]
omega_m = 24
g = 1.16
eps = 0.3
gamma = 0.01

[axes]
J = linspace(2, 3, 3)

[sweep]
cutoffs = 3, 2
outputs = g2, n1

[solver]
backend = direct
"""


def test_parse_config():
    loaded = parse_config(CONFIG)
    cfg = loaded.sweep
    assert cfg.base.coupling_g == 1.16 and cfg.base.drive_eps == 0.3
    assert cfg.axes == (("coupling_j", (2.0, 2.5, 3.0)),)
    assert cfg.cutoffs == (3, 2) and cfg.solver.backend == "direct"


@pytest.mark.parametrize("bad,line,fragment", [
    (CONFIG.replace("gamma = 0.01", "gamma = 0.01\nfoo = 1"), 7, "[params] foo: unknown key"),
    (CONFIG.replace("[solver]", "[solvers]"), 15, "unknown section"),
    (CONFIG.replace("eps = 0.3", "eps = abc"), 5, "[params] eps"),
    (CONFIG.replace("cutoffs = 3, 2", "cutoffs = 3; 2"), 12, "[sweep] cutoffs"),
])
def test_config_errors_name_line_and_key(bad, line, fragment):
    with pytest.raises(ConfigError) as info:
        parse_config(bad, "run.ini")
    msg = str(info.value)
    assert msg.startswith(f"run.ini:{line}:") and fragment in msg


def test_csv_uses_twelve_significant_digits():
    cfg = parse_config(CONFIG).sweep
    res = run_sweep(cfg)
    rows = list(csv.reader(io.StringIO(to_csv(res))))
    assert rows[0][:3] == ["J_over_kappa", "g2", "n1"]
    assert len(rows) == 4
    assert rows[1][1] == format(res.rows[0]["g2"], ".12g")
    assert float(rows[1][1]) == pytest.approx(res.rows[0]["g2"], rel=1e-11)


def test_json_mirrors_csv(tmp_path):
    res = run_sweep(parse_config(CONFIG).sweep)
    path = tmp_path / "out.json"
    text = write_result(res, "json", path)
    doc = json.loads(path.read_text())
    assert doc == json.loads(text) == json.loads(to_json(res))
    assert doc["columns"] == list(res.columns)
    assert len(doc["rows"]) == 3
    assert doc["rows"][2]["g2"] == res.rows[2]["g2"]
    meta = doc["metadata"]
    assert {"version", "timestamp", "config"} <= set(meta)
    assert meta["config"]["axes"] == {"coupling_j": [2.0, 2.5, 3.0]}
    with pytest.raises(ConfigError):
        write_result(res, "xml")


def test_minimize_finds_interior_minimum_and_is_grid_stable():
    p = SystemParams(omega_m=24.0, coupling_j=2.6, drive_eps=0.1)
    a = minimize_g2_over_g(p, (0.4, 2.0), 6, cutoffs=(3, 2))
    b = minimize_g2_over_g(p, (0.4, 2.0), 12, cutoffs=(3, 2))
    assert 0.4 < a.g_min < 2.0
    assert abs(a.g_min - b.g_min) <= 1e-3 * b.g_min
    g_min, g2_min = b
    assert g_min == b.g_min
    assert g2_min <= min(v for _, v in b.grid)
    assert not b.multimodal


def test_minimize_validates_arguments():
    with pytest.raises(ValueError):
        minimize_g2_over_g(BASE, (2.0, 1.0), 5)
    with pytest.raises(ValueError):
        minimize_g2_over_g(BASE, (1.0, 2.0), 2)
