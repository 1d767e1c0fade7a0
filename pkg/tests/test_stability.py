import json
import math

import pytest

from scenarios import DRIFT_SCENARIOS, THEOREM_SCENARIOS, config, raw
from shockstab.config import parse_config
from shockstab.entropy import ShockDatum
from shockstab.fronttrack import PiecewiseLinearPath, Profile, run
from shockstab.measure import entropy_production
from shockstab.stability import (
    CSV_COLUMNS,
    default_times,
    drift_check,
    drift_terms,
    relative_entropy_window,
    relative_l2,
    run_scenario,
    simulate,
    solution_bounds,
    theorem_check,
    theorem_terms,
    tracked_path,
)

SHOCK = ShockDatum(1.0, -1.0)
AT_REST = PiecewiseLinearPath.affine(0.0, 0.0, 0.0, 1.0)


def test_relative_l2_pure_shock(model):
    sim = run(Profile.step(1.0, -1.0), model, T=1.0)
    path = tracked_path(sim, SHOCK)
    for t in (0.0, 0.5, 1.0):
        assert relative_l2(sim, path, SHOCK, t, 3.0) == 0.0


@pytest.mark.parametrize("a", [0.1, 0.5, 1.0])
def test_relative_l2_shifted_shock(burgers, a):
    sim = run(Profile([a], [1.0, -1.0]), burgers, T=1.0)
    assert relative_l2(sim, AT_REST, SHOCK, 0.0, 10.0) == pytest.approx(a * 4.0, abs=1e-15)


def test_relative_l2_canonical_perturbation(burgers):
    sim = simulate(config("canonical"))
    assert relative_l2(sim, AT_REST, SHOCK, 0.0, 10.0) == pytest.approx(0.25, abs=1e-15)


def test_relative_l2_rejects_empty_window(burgers):
    sim = run(Profile.step(1.0, -1.0), burgers, T=1.0)
    with pytest.raises(ValueError):
        relative_l2(sim, AT_REST, SHOCK, 0.5, 0.0)


@pytest.mark.parametrize("name", THEOREM_SCENARIOS)
def test_relative_l2_is_twice_the_entropy_window(name):
    cfg = config(name)
    sim = simulate(cfg)
    path = tracked_path(sim, cfg.shock)
    for t in (0.0, 0.4, 1.0):
        for R in (0.5, 2.0, 10.0):
            l2 = relative_l2(sim, path, cfg.shock, t, R)
            F = relative_entropy_window(sim, path, cfg.shock, t, -R, R)
            assert l2 == pytest.approx(2.0 * F, rel=1e-14, abs=1e-15)


def test_pure_shock_scenario_is_exact():
    rep = run_scenario(config("pure_shock"))
    assert rep.margins == [0.0] * len(rep.rows)
    assert rep.drift_margins == [0.0] * len(rep.times)
    assert all(x == 0.0 for _, x in rep.drift_knots)
    assert rep.mu_plus_total == 0.0


def test_canonical_scenario():
    rep = run_scenario(config("canonical"))
    assert rep.mu_plus_total == pytest.approx(1 / 96, abs=1e-15)
    assert rep.n_events == 0 and rep.n_fronts == 3
    assert rep.min_margin >= 0.0
    # initial mismatch 0.25, mu_plus 1/96 at t=1 and M/alpha = 1
    row = next(r for r in rep.rows if r["t"] == 1.0 and r["R"] == 10.0)
    assert row["mu_plus_cone"] == pytest.approx(1 / 96, abs=1e-15)
    assert row["rhs"] == pytest.approx(0.25 + 68 / 96, abs=1e-14)


def test_fan_scenario_production_rate():
    rep = run_scenario(config("fan_0.1"))
    assert rep.mu_plus_total == pytest.approx(20 * 0.1 ** 3 / 12, abs=1e-15)
    assert rep.min_margin >= 0.0


@pytest.mark.parametrize("name", ["entropic_left", "entropic_right"])
def test_entropic_scenarios_have_no_mu_plus(name):
    rep = run_scenario(config(name))
    assert rep.mu_plus_total == 0.0
    assert all(r["mu_plus_cone"] == 0.0 for r in rep.rows)
    # the contraction alone: distance at t never exceeds the widened initial distance
    assert all(r["lhs"] <= r["rhs"] for r in rep.rows)


def test_margin_monotone_in_theorem_constant():
    cfg = config("canonical")
    sim = simulate(cfg)
    path = tracked_path(sim, cfg.shock)
    mu = entropy_production(sim)
    margins = [theorem_check(sim, path, cfg.shock, 0.75, 5.0, C, mu) for C in (0.0, 1.0, 10.0, 68.0, 500.0)]
    assert margins == sorted(margins)
    assert margins[1] > margins[0]


def test_theorem_terms_are_consistent():
    cfg = config("canonical")
    sim = simulate(cfg)
    path = tracked_path(sim, cfg.shock)
    th = theorem_terms(sim, path, cfg.shock, 0.5, 2.0)
    b = solution_bounds(sim, cfg.shock)
    assert th["rhs"] == th["initial"] + 68.0 * b.ratio * th["mu_plus"]
    assert th["margin"] == th["rhs"] - th["lhs"]


def test_drift_pure_shock_margin_zero(model):
    sim = run(Profile.step(1.0, -1.0), model, T=1.0)
    path = tracked_path(sim, SHOCK)
    for t in (0.0, 0.5, 1.0):
        assert drift_check(sim, path, SHOCK, t) == 0.0


def test_drift_terms_shifted_shock(burgers):
    # shock at 0.5, path runs at f'(1) = 1 until it attaches at t = 0.5
    cfg = config("shifted_0.5")
    sim = simulate(cfg)
    path = tracked_path(sim, cfg.shock)
    d = drift_terms(sim, path, cfg.shock, 1.0)
    assert d["energy"] == pytest.approx(0.5, abs=1e-15)
    b = solution_bounds(sim, cfg.shock)
    assert d["lhs"] == pytest.approx(b.alpha / b.M ** 3 / 24 * 2 * 0.5, abs=1e-15)
    # window [-2, 2] holds the whole mismatch strip (0, 0.5)
    assert d["initial"] == pytest.approx(0.5 * 4, abs=1e-15)
    assert d["margin"] >= 0


@pytest.mark.parametrize("name", DRIFT_SCENARIOS)
def test_all_scenarios_nonnegative(name):
    rep = run_scenario(config(name))
    assert min(rep.margins) >= -1e-9
    assert min(rep.drift_margins) >= -1e-9
    assert rep.inclusion_max <= 1e-12 and rep.x_prime_max <= 1e-12


def test_report_serialises_and_is_deterministic():
    a = run_scenario(config("canonical"))
    b = run_scenario(config("canonical"))
    da, db = a.as_dict(), b.as_dict()
    assert json.dumps(da, sort_keys=True) == json.dumps(db, sort_keys=True)
    assert [len(r) for r in a.csv_rows()] == [len(CSV_COLUMNS)] * len(a.rows)
    assert len(a.rows) == len(a.times) * len(a.windows)
    assert len(a.F) == len(a.drift_energy) == len(a.times)


def test_report_margins_recomputable():
    rep = run_scenario(config("fan_0.02"))
    for r in rep.rows:
        assert r["margin"] == r["rhs"] - r["lhs"]
    for lhs, rhs, m in zip(rep.drift_lhs, rep.drift_rhs, rep.drift_margins):
        assert m == rhs - lhs


def test_default_time_grid_includes_events_and_crossings():
    r = raw("two_shock")
    del r["times"]
    cfg = parse_config(r)
    sim = simulate(cfg)
    path = tracked_path(sim, cfg.shock)
    ts = default_times(cfg.T, sim, path, cfg.windows)
    assert 1.0 in ts and ts[-1] == cfg.T and len(ts) >= 64
    rep = run_scenario(cfg)
    assert rep.times == ts


def test_regions_reported():
    r = raw("canonical")
    r["regions"] = [{"type": "rect", "t0": 0.0, "t1": 1.0}, {"type": "cone", "R": 1.0, "S": 1.0, "t": 1.0}]
    rep = run_scenario(parse_config(r))
    rect, cone = rep.extras["region_masses"]
    assert rect["plus"] == pytest.approx(1 / 96, abs=1e-15)
    assert rect["minus"] == pytest.approx(2 / 3 + 1 / 96, abs=1e-15)
    assert math.isfinite(cone["signed"])
