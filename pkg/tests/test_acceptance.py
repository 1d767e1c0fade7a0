"""Acceptance criteria, one test each, at their stated tolerances.

Every test prints a single ``PASS``/``FAIL`` line (visible with or without
``-s``) before asserting, so the run log doubles as the acceptance record.
"""

import time

import numpy as np

from conftest import MODELS
from scenarios import DRIFT_SCENARIOS, RAW, SHIFTED, THEOREM_SCENARIOS, VAR_SCENARIOS, config
from shockstab.entropy import (
    burgers_dissipation_closed_form,
    dissipation_rate,
    dissipation_rate_g_oracle,
    jump_entropy_cost,
)
from shockstab.flux import FluxModel
from shockstab.measure import audit_variation_formula
from shockstab.shift import inclusion_residuals
from shockstab.stability import run_scenario, simulate, solution_bounds, tracked_path
from shockstab.verify import GridSpec, verify_dbound, verify_identities
from test_entropy import mp_D

RANDOM = 10 ** 6
ORACLE_RANDOM = 10 ** 5
TOL = 1e-9


def record(capsys, n, title, ok, detail):
    with capsys.disabled():
        print(f"\n[acceptance {n}] {'PASS' if ok else 'FAIL'} {title}: {detail}")


def sweep_spec(model):
    return GridSpec(model, points=21, random=RANDOM, seed=0)


def test_1_dissipation_bound_sweep(capsys):
    start = time.perf_counter()
    reports = [verify_dbound(sweep_spec(m)) for m in MODELS]
    elapsed = time.perf_counter() - start
    bad = sum(r.n_violations for r in reports)
    n = sum(r.n_quadruples for r in reports)
    worst = min(r.checks["dbound"].worst_margin for r in reports)
    ok = bad == 0 and elapsed < 60.0
    record(capsys, 1, "dissipation bound, 21^4 grid + 1e6 random, 3 models", ok,
           f"{n} quadruples, {bad} violations, worst margin {worst:.3e}, {elapsed:.1f}s (< 60s)")
    assert bad == 0
    assert elapsed < 60.0


def test_2_identity_suite(capsys):
    details, bad = [], 0
    for m in MODELS:
        spec = sweep_spec(m)
        # the quadrature oracle covers the whole grid plus the first 1e5 random points
        limit = GridSpec(m, points=21).quadruples().shape[1] + ORACLE_RANDOM
        rep = verify_identities(spec, oracle_limit=limit)
        bad += rep.n_violations
        details.append(f"{m.kind}: {len(rep.checks)} checks, {rep.n_violations} violations, "
                       f"oracle on {rep.checks['g_oracle'].count}")
    record(capsys, 2, "identity suite incl. g-oracle", bad == 0, "; ".join(details))
    assert bad == 0


def test_3_spot_values(capsys):
    b = FluxModel.burgers()
    S = (1.0, -1.0)
    cases = [("D0(0,0;1,-1)", (0.0, 0.0), -1 / 3), ("D0(-1/2,1/2;1,-1)", (-0.5, 0.5), 0.0),
             ("D0(1/2,-1/2;1,-1)", (0.5, -0.5), -1 / 6)]
    errs = {}
    for name, j, want in cases:
        errs[name] = max(abs(dissipation_rate(b, j, S) - want),
                         abs(burgers_dissipation_closed_form(j, S) - want),
                         abs(dissipation_rate_g_oracle(b, j, S) - want),
                         abs(mp_D(b, *j, *S) - want))
    errs["E_burgers(0,1)"] = abs(jump_entropy_cost(b, (0.0, 1.0)) - 1 / 12)
    worst = max(errs.values())
    record(capsys, 3, "spot values (closed form, g-oracle, mpmath)", worst <= 1e-12,
           f"max error {worst:.1e} over {len(errs)} values")
    assert worst <= 1e-12


def test_4_engine_exactness(capsys):
    rh, mass, same = 0.0, 0.0, True
    for name in RAW:
        cfg = config(name)
        sim = simulate(cfg)
        rh = max(rh, sim.max_rh_residual())
        for t in np.linspace(0.0, cfg.T, 9):
            mass = max(mass, sim.mass_defect(float(t)))
        again = simulate(cfg)
        same &= again.fronts == sim.fronts and again.events == sim.events
        for t in cfg.times:
            a, c = sim.sample(t), again.sample(t)
            same &= a.breakpoints.tobytes() == c.breakpoints.tobytes()
            same &= a.values.tobytes() == c.values.tobytes()
    ok = rh <= 1e-12 and mass <= 1e-10 and same
    record(capsys, 4, f"engine exactness on {len(RAW)} scenarios", ok,
           f"max RH residual {rh:.1e}, max relative mass defect {mass:.1e}, reruns identical={same}")
    assert rh <= 1e-12
    assert mass <= 1e-10
    assert same


def test_5_variation_formula_audit(capsys):
    worst = {}
    for name in VAR_SCENARIOS:
        errs = audit_variation_formula(simulate(config(name)), pairs=50, seed=0)
        assert len(errs) == 50
        worst[name] = max(errs)
    ok = max(worst.values()) <= TOL
    record(capsys, 5, "variation formula, 50 path pairs x 3 scenarios", ok,
           ", ".join(f"{k} {v:.1e}" for k, v in worst.items()))
    assert ok


def test_6_stability_theorem(capsys):
    start = time.perf_counter()
    reports = {name: run_scenario(config(name)) for name in THEOREM_SCENARIOS}
    elapsed = time.perf_counter() - start
    worst = {k: min(r.margins) for k, r in reports.items()}
    grid_ok = all(r.times == [0.25, 0.5, 0.75, 1.0] and r.windows == [2.0, 5.0, 10.0]
                  and r.constants["C_thm"] == 68.0 for r in reports.values())
    mu_ok = (abs(reports["canonical"].mu_plus_total - 1 / 96) <= 1e-15
             and reports["entropic_left"].mu_plus_total == 0.0
             and reports["entropic_right"].mu_plus_total == 0.0)
    ok = min(worst.values()) >= -TOL and elapsed < 5.0 and grid_ok and mu_ok
    record(capsys, 6, "stability estimate, C_thm=68, t x R grid", ok,
           ", ".join(f"{k} {v:.3g}" for k, v in worst.items()) + f"; {elapsed:.2f}s (< 5s)")
    assert grid_ok and mu_ok
    assert min(worst.values()) >= -TOL
    assert elapsed < 5.0


def test_7_drift_estimate(capsys):
    reports = {name: run_scenario(config(name)) for name in DRIFT_SCENARIOS}
    worst = {k: min(r.drift_margins) for k, r in reports.items()}
    params_ok = all(r.constants["c_drift"] == 1 / 24 and r.constants["drift_exponent"] == 3.0
                    for r in reports.values())
    sat = {k: reports[k].drift_saturation for k in SHIFTED}
    ok = min(worst.values()) >= -TOL and params_ok
    record(capsys, 7, "drift estimate, c=1/24, M^3 variant", ok,
           f"min margin {min(worst.values()):.3g}; saturation (lhs/rhs) "
           + ", ".join(f"{k} {v:.3e}" for k, v in sat.items()))
    assert params_ok
    assert min(worst.values()) >= -TOL


def test_8_shift_inclusion(capsys):
    incl, xprime, cone, pieces = 0.0, 0.0, 0.0, 0
    for name in RAW:
        cfg = config(name)
        sim = simulate(cfg)
        path = tracked_path(sim, cfg.shock)
        S = solution_bounds(sim, cfg.shock).S
        for _, _, r_sigma, r_incl in inclusion_residuals(sim, path):
            pieces += 1
            incl = max(incl, r_incl)
            xprime = max(xprime, abs(r_sigma))
        for t, x in path.knots:
            cone = max(cone, abs(x) - S * t)
    ok = incl <= 1e-12 and xprime <= 1e-12 and cone <= 1e-12
    record(capsys, 8, f"shift inclusion and x' = sigma on {pieces} trace pieces", ok,
           f"inclusion {incl:.1e}, x' residual {xprime:.1e}, max(|x|-St) {cone:.1e}")
    assert incl <= 1e-12
    assert xprime <= 1e-12
    assert cone <= 1e-12
