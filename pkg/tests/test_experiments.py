import math

import pytest

from mopiep import ValidationError
from mopiep.experiments import COLUMNS, EXPERIMENTS, ExperimentReport, ExperimentRow, format_number, parse_ns, run_experiment


def test_parse_ns():
    assert parse_ns("5:8") == [5, 6, 7, 8]
    assert parse_ns("5:20:5") == [5, 10, 15, 20]
    assert parse_ns("5, 10") == [5, 10]
    for bad in ("x", "5:10:0", "1:2:3:4"):
        with pytest.raises(ValidationError):
            parse_ns(bad)


def test_format_number():
    assert format_number(None) == ""
    assert format_number(3) == "3"
    assert format_number(0.1) == "0.1"
    assert float(format_number(1 / 3)) == 1 / 3


def test_csv_layout():
    rep = ExperimentReport("x", [ExperimentRow(5, "kryl", e_n=1e-16)])
    head, row = rep.to_csv().splitlines()
    assert head.split(",") == COLUMNS
    cells = row.split(",")
    assert cells[:3] == ["5", "kryl", "1e-16"] and cells[3] == "" and cells[-1] == "0"


def test_registry_lists_all_experiments():
    assert {"fig1_kravchuk", "fig1_hahn", "fig2_hahn_backward", "fig3_equidistant",
            "fig4_chebyshev", "fig5_equidistant", "fig5_chebyshev"} <= set(EXPERIMENTS)
    with pytest.raises(ValidationError):
        run_experiment("fig9")


def test_fig1_small():
    rep = run_experiment("fig1_hahn", [5, 6])
    assert [(r.n, r.algorithm) for r in rep.rows] == [(n, a) for n in (5, 6)
                                                      for a in ("core", "kryl", "krylreorth_full")]
    for r in rep.rows:
        assert r.e_n < 1e-10 and r.biorth_loss is not None and r.conditioning > 0
        assert r.backward_nodes is None and r.runtime_seconds is None


def test_fig2_backward_only():
    rep = run_experiment("fig2_hahn_backward", [6])
    for r in rep.rows:
        assert r.e_n is None and r.backward_w1 is not None and r.backward_nodes < 1e-10


def test_synthetic_average_is_reproducible():
    a = run_experiment("fig4_chebyshev", [7], runs=3, seed=4)
    b = run_experiment("fig4_chebyshev", [7], runs=3, seed=4)
    c = run_experiment("fig4_chebyshev", [7], runs=3, seed=5)
    assert a.to_csv() == b.to_csv() != c.to_csv()


def test_timing_fills_runtime():
    rep = run_experiment("fig5_equidistant", [10], timing=True)
    assert all(r.runtime_seconds >= 0 and not math.isnan(r.runtime_seconds) for r in rep.rows)


def test_threads_do_not_change_output(monkeypatch):
    base = run_experiment("fig3_equidistant", [5, 6, 7], runs=2).to_csv()
    monkeypatch.setenv("MOP_THREADS", "3")
    assert run_experiment("fig3_equidistant", [5, 6, 7], runs=2).to_csv() == base
