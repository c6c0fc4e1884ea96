import os
import pathlib

import pytest

import icol

DATA = pathlib.Path(os.environ.get("ICOL_TEST_DATA", pathlib.Path(__file__).parents[2] / "data"))


def test_wsu_update_stays_on_simplex():
    pi = icol.wsu_update([0.5, 0.5], [0.01, 0.64], 0.5)
    assert abs(sum(pi) - 1.0) < 1e-12
    assert pi[0] > pi[1]


def test_wswm_budget_balance():
    g = icol.wswm_payoffs([0.9, 0.2], [0.5, 0.5], 1)
    assert g == pytest.approx([0.6575, 0.3425], abs=1e-12)


def test_bad_input_raises():
    with pytest.raises(icol.IcolError):
        icol.wsu_update([0.5, 0.5], [0.1], 0.1)


def test_benchmark_on_bundled_panel():
    panel = icol.ingest_panel(DATA / "synthetic_panel.csv")
    assert panel.num_experts >= 10
    a = icol.run_benchmark(panel, ["WSU", "WSU-UX"], repetitions=3, seed=5)
    b = icol.run_benchmark(panel, ["WSU", "WSU-UX"], repetitions=3, seed=5)
    assert [e.to_json() for e in a] == [e.to_json() for e in b]
    assert all(e.invalid_rounds == 0 for e in a)
    assert len(a[0].mean) == panel.horizon
    assert icol.render_svg(a).startswith("<svg")


def test_monte_carlo_aggregate_is_negative():
    (e,) = icol.run_monte_carlo(6, 200, 4, 1, ["WSU:aggregate"])
    assert e.mean[-1] < 0


def test_builtin_audits():
    names = {a["name"]: a for a in icol.builtin_audits()}
    assert names["mwu-normalization"]["verdict"] == "violation"
