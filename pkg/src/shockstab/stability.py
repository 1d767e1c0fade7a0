r"""
Shock stability estimates
-------------------------

Evaluates, for a front-tracking solution :math:`u` and a reference shock
:math:`(u_\ell, u_r)` recentred along the shift path :math:`x(t)`,

* the windowed :math:`L^2` distance
  :math:`\int_{-R}^{R} |u(t,x) - u_0^{shock}(x - x(t))|^2 dx`,
* the stability margin: the initial distance on :math:`[-R-tS, R+tS]` plus
  :math:`C (M/\alpha)^3 \mu_+([0,t]\times[-R-tS, R+tS])`, minus that distance,
* the drift margin, which bounds :math:`\int_0^t h'^2` with :math:`h = x - \sigma t`.

All spatial integrals are exact sums over constant cells.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from shockstab.config import SCHEMA_VERSION, Constants, ScenarioConfig
from shockstab.entropy import ShockDatum, rel_entropy
from shockstab.flux import IntervalBounds, bounds_on_interval
from shockstab.fronttrack import PiecewiseLinearPath, Simulation, run
from shockstab.measure import Cone, EntropyMeasure, Rect, entropy_production, mu_mass
from shockstab.shift import construct_shift, drift, drift_energy, inclusion_residuals

CSV_COLUMNS = ("t", "R", "lhs", "mu_plus_cone", "rhs", "margin", "drift_energy", "drift_margin")
DEFAULT_SAMPLES = 64


def solution_bounds(sim: Simulation, shock: ShockDatum) -> IntervalBounds:
    """Bounds on ``I = [min(u_r, inf u), max(u_ell, sup u)]``."""
    lo, hi = sim.value_range()
    return bounds_on_interval(sim.model, min(shock.u_r, lo), max(shock.u_ell, hi))


def window_l2(sim: Simulation, path: PiecewiseLinearPath, shock: ShockDatum,
              t: float, a: float, b: float) -> float:
    """``int_a^b (u(t,x) - u0_shock(x - x(t)))^2 dx``."""
    prof = sim.sample(t)
    xt = path(t)
    parts = []
    if a < min(b, xt):
        parts.append(prof.integrate(lambda u: (u - shock.u_ell) ** 2, a, min(b, xt)))
    if max(a, xt) < b:
        parts.append(prof.integrate(lambda u: (u - shock.u_r) ** 2, max(a, xt), b))
    return math.fsum(parts)


def relative_l2(sim: Simulation, path: PiecewiseLinearPath, shock: ShockDatum, t: float, R: float) -> float:
    if not R > 0:
        raise ValueError("R must be positive")
    return window_l2(sim, path, shock, t, -R, R)


def relative_entropy_window(sim: Simulation, path: PiecewiseLinearPath, shock: ShockDatum,
                            t: float, a: float, b: float) -> float:
    """``F = int_a^b eta(u(t,x) | u0_shock(x - x(t))) dx`` split at ``x(t)``."""
    prof = sim.sample(t)
    xt = min(max(path(t), a), b)
    return (prof.integrate(lambda u: rel_entropy(u, shock.u_ell), a, xt)
            + prof.integrate(lambda u: rel_entropy(u, shock.u_r), xt, b))


def theorem_terms(sim, path, shock, t, R, C_thm=Constants.C_thm, measure=None, bounds=None):
    """``dict`` with ``lhs``, ``initial``, ``mu_plus``, ``rhs`` and ``margin``."""
    measure = measure if measure is not None else entropy_production(sim)
    bounds = bounds or solution_bounds(sim, shock)
    wide = R + t * bounds.S
    initial = window_l2(sim, path, shock, 0.0, -wide, wide)
    mu_plus = mu_mass(measure, Rect(0.0, t, -wide, wide), "plus")
    rhs = initial + C_thm * bounds.ratio * mu_plus
    lhs = relative_l2(sim, path, shock, t, R)
    return {"lhs": lhs, "initial": initial, "mu_plus": mu_plus, "rhs": rhs, "margin": rhs - lhs}


def theorem_check(sim, path, shock, t, R, C_thm=Constants.C_thm, measure=None, bounds=None) -> float:
    return theorem_terms(sim, path, shock, t, R, C_thm, measure, bounds)["margin"]


def drift_terms(sim, path, shock, t, bounds=None, c_drift=Constants.c_drift, C_thm=Constants.C_thm,
                measure=None, exponent=Constants.drift_exponent):
    measure = measure if measure is not None else entropy_production(sim)
    bounds = bounds or solution_bounds(sim, shock)
    sigma = shock.speed(sim.model)
    w = 2.0 * bounds.S * t
    initial = window_l2(sim, path, shock, 0.0, -w, w) if w > 0 else 0.0
    mu_plus = mu_mass(measure, Rect(0.0, t, -w, w), "plus")
    energy = drift_energy(path, sigma, t)
    rhs = initial + bounds.ratio * mu_plus * C_thm
    lhs = c_drift * bounds.alpha / bounds.M ** exponent * (shock.u_ell - shock.u_r) * energy
    return {"lhs": lhs, "initial": initial, "mu_plus": mu_plus, "energy": energy,
            "rhs": rhs, "margin": rhs - lhs}


def drift_check(sim, path, shock, t, bounds=None, c_drift=Constants.c_drift, C_thm=Constants.C_thm,
                measure=None, exponent=Constants.drift_exponent) -> float:
    return drift_terms(sim, path, shock, t, bounds, c_drift, C_thm, measure, exponent)["margin"]


def cone_mu_plus(measure: EntropyMeasure, bounds: IntervalBounds, t: float, R: float) -> float:
    """``mu_+`` of the shrinking cone behind the window ``[-R, R]`` at time ``t``."""
    if t <= 0:
        return 0.0
    return mu_mass(measure, Cone(R + bounds.S * t, bounds.S, t), "plus")


@dataclass
class StabilityReport:
    scenario_id: str
    config_hash: str
    times: list
    windows: list
    rows: list
    F: list
    drift_knots: list
    drift_energy: list
    drift_margins: list
    drift_lhs: list
    drift_rhs: list
    constants: dict
    bounds: dict
    shock: dict
    sigma: float
    mu_plus_total: float
    n_fronts: int
    n_events: int
    shift_knots: list
    inclusion_max: float
    x_prime_max: float
    schema_version: str = SCHEMA_VERSION
    extras: dict = field(default_factory=dict)

    @property
    def margins(self):
        return [r["margin"] for r in self.rows]

    @property
    def min_margin(self) -> float:
        return min(self.margins + self.drift_margins)

    @property
    def drift_saturation(self) -> float:
        """Largest ``lhs / rhs`` of the drift estimate over the grid (1 means tight)."""
        ratios = [a / b for a, b in zip(self.drift_lhs, self.drift_rhs) if b > 0]
        return max(ratios, default=0.0)

    def csv_rows(self):
        return [tuple(r[c] for c in CSV_COLUMNS) for r in self.rows]

    def as_dict(self):
        out = dict(self.__dict__)
        out["min_margin"] = self.min_margin
        out["drift_saturation"] = self.drift_saturation
        return out


def default_times(T: float, sim: Simulation, path: PiecewiseLinearPath, windows, samples=DEFAULT_SAMPLES):
    """Uniform samples, event times and the times the shift leaves ``[-R, R]``."""
    ts = set(np.linspace(0.0, T, samples + 1)[1:].tolist())
    ts.update(e.time for e in sim.events if 0 < e.time <= T)
    for R in windows:
        for ta, tb, xa, v in path.pieces():
            for target in (R, -R):
                if v != 0:
                    tc = ta + (target - xa) / v
                    if ta < tc <= tb:
                        ts.add(float(tc))
    return sorted(ts)


def simulate(cfg: ScenarioConfig) -> Simulation:
    return run(cfg.initial, cfg.model, cfg.policy, cfg.delta, cfg.T, cfg.admissible, cfg.event_cap)


def tracked_path(sim: Simulation, shock: ShockDatum):
    sigma = shock.speed(sim.model)
    has_front = any(abs(f.position(0.0)) <= 1e-12 for f in sim.epochs[0].fronts)
    return construct_shift(sim, sigma_ref=sigma, expect_front=has_front)


def run_scenario(cfg: ScenarioConfig) -> StabilityReport:
    sim = simulate(cfg)
    shock = cfg.shock
    consts = cfg.constants
    measure = entropy_production(sim)
    bounds = solution_bounds(sim, shock)
    sigma = shock.speed(sim.model)
    path = tracked_path(sim, shock)
    times = sorted(cfg.times) if cfg.times is not None else default_times(cfg.T, sim, path, cfg.windows)

    rows, F, energies, dmargins, dl, dr = [], [], [], [], [], []
    r_max = max(cfg.windows)
    for t in times:
        d = drift_terms(sim, path, shock, t, bounds, consts.c_drift, consts.C_thm, measure,
                        consts.drift_exponent)
        energies.append(d["energy"])
        dmargins.append(d["margin"])
        dl.append(d["lhs"])
        dr.append(d["rhs"])
        F.append(relative_entropy_window(sim, path, shock, t, -r_max, r_max))
        for R in cfg.windows:
            th = theorem_terms(sim, path, shock, t, R, consts.C_thm, measure, bounds)
            rows.append({
                "t": t, "R": R, "lhs": th["lhs"], "mu_plus_cone": th["mu_plus"],
                "rhs": th["rhs"], "margin": th["margin"],
                "drift_energy": d["energy"], "drift_margin": d["margin"],
                "mu_plus_shrinking_cone": cone_mu_plus(measure, bounds, t, R),
            })

    region_masses = [
        {"region": dict(type=type(r).__name__.lower(), **r.__dict__),
         **{sign: mu_mass(measure, r, sign) for sign in ("plus", "minus", "signed")}}
        for r in cfg.regions
    ]
    incl = inclusion_residuals(sim, path)
    h = drift(path, sigma)
    return StabilityReport(
        scenario_id=cfg.id,
        config_hash=cfg.hash,
        times=times,
        windows=list(cfg.windows),
        rows=rows,
        F=F,
        drift_knots=[[float(a), float(b)] for a, b in zip(h.times, h.positions)],
        drift_energy=energies,
        drift_margins=dmargins,
        drift_lhs=dl,
        drift_rhs=dr,
        constants=consts.as_dict(),
        bounds={"alpha": bounds.alpha, "M": bounds.M, "S": bounds.S, "lo": bounds.lo, "hi": bounds.hi},
        shock={"u_ell": shock.u_ell, "u_r": shock.u_r},
        sigma=sigma,
        mu_plus_total=mu_mass(measure, Rect(0.0, cfg.T), "plus"),
        n_fronts=len(sim.fronts),
        n_events=len(sim.events),
        shift_knots=[[float(a), float(b)] for a, b in path.knots],
        inclusion_max=max((r[3] for r in incl), default=0.0),
        x_prime_max=max((abs(r[2]) for r in incl), default=0.0),
        extras={"region_masses": region_masses},
    )
