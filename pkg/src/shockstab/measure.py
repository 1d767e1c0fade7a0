r"""
Entropy production measure
--------------------------

For a front-tracking solution the measure
:math:`\mu = \partial_t(u^2/2) + \partial_x q(u)` lives on the front lines,
with density :math:`E(u_-, u_+)` per unit time. It is stored exactly as a
list of weighted segments; region masses are closed-form interval clips.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from shockstab.entropy import jump_entropy_cost, rel_entropy, rel_flux
from shockstab.fronttrack import PiecewiseLinearPath, Simulation

# a constraint whose affine margin is identically within this of zero is "on the boundary"
BOUNDARY_ATOL = 1e-12


@dataclass(frozen=True, eq=False)
class EntropyMeasure:
    """Segments ``x(t) = x0 + speed (t - t0)`` on ``[t0, t1]`` with ``density`` per unit time."""

    t0: np.ndarray
    t1: np.ndarray
    x0: np.ndarray
    speed: np.ndarray
    density: np.ndarray
    front_id: np.ndarray

    def __len__(self):
        return self.t0.size

    @property
    def lifetimes(self):
        return self.t1 - self.t0


@dataclass(frozen=True)
class Rect:
    """Closed rectangle ``[t0, t1] x [a, b]``; ``a``/``b`` may be infinite."""

    t0: float
    t1: float
    a: float = -math.inf
    b: float = math.inf

    def __post_init__(self):
        if not (self.t0 <= self.t1 and self.a <= self.b):
            raise ValueError(f"empty rectangle {self}")


@dataclass(frozen=True)
class Cone:
    """Open cone ``{0 < tau < t, -R + tau S < xi < R - tau S}``."""

    R: float
    S: float
    t: float

    def __post_init__(self):
        if not (self.R > 0 and self.S >= 0 and self.t > 0):
            raise ValueError(f"cone needs R > 0, S >= 0, t > 0; got {self}")


@dataclass(frozen=True)
class Between:
    """Open region ``{t1 < tau < t2, y(tau) < xi < z(tau)}``."""

    y: PiecewiseLinearPath
    z: PiecewiseLinearPath
    t1: float
    t2: float


def entropy_production(sim: Simulation) -> EntropyMeasure:
    rows = [(t0, t1, f.position(t0), f.speed, f.u_left, f.u_right, f.id)
            for t0, t1, f in sim.segments()]
    if not rows:
        empty = np.empty(0)
        return EntropyMeasure(empty, empty, empty, empty, empty, np.empty(0, dtype=int))
    t0, t1, x0, speed, ul, ur, ids = (np.array(c) for c in zip(*rows))
    density = np.atleast_1d(jump_entropy_cost(sim.model, (ul, ur)))
    return EntropyMeasure(t0, t1, x0, speed, density, ids.astype(int))


def _clip(lo, hi, g_at, g_slope, tau_ref, strict):
    """Intersect ``[lo, hi]`` with ``{tau: g_at + g_slope (tau - tau_ref) > 0}`` (``>=`` if not strict)."""
    with np.errstate(divide="ignore", invalid="ignore"):
        root = tau_ref - g_at / g_slope
    flat = g_slope == 0
    if strict:
        keep_flat = g_at > BOUNDARY_ATOL
    else:
        keep_flat = g_at >= -BOUNDARY_ATOL
    lo = np.where(flat, np.where(keep_flat, lo, np.inf), np.where(g_slope > 0, np.maximum(lo, root), lo))
    hi = np.where(flat, np.where(keep_flat, hi, -np.inf), np.where(g_slope < 0, np.minimum(hi, root), hi))
    return lo, hi


def _lengths(measure: EntropyMeasure, region) -> np.ndarray:
    m = measure
    if isinstance(region, Rect):
        lo = np.maximum(m.t0, region.t0)
        hi = np.minimum(m.t1, region.t1)
        with np.errstate(invalid="ignore"):
            lo, hi = _clip(lo, hi, m.x0 - region.a, m.speed, m.t0, strict=False)
            lo, hi = _clip(lo, hi, region.b - m.x0, -m.speed, m.t0, strict=False)
        return np.maximum(hi - lo, 0.0)
    if isinstance(region, Cone):
        R, S = region.R, region.S
        lo = np.maximum(m.t0, 0.0)
        hi = np.minimum(m.t1, region.t)
        lo, hi = _clip(lo, hi, m.x0 + R - S * m.t0, m.speed - S, m.t0, strict=True)
        lo, hi = _clip(lo, hi, R - S * m.t0 - m.x0, -S - m.speed, m.t0, strict=True)
        return np.maximum(hi - lo, 0.0)
    if isinstance(region, Between):
        return _between_lengths(m, region)
    raise TypeError(f"unsupported region {region!r}")


def _between_lengths(m: EntropyMeasure, region: Between) -> np.ndarray:
    y, z = region.y, region.z
    knots = sorted({region.t1, region.t2}
                   | {float(t) for t in y.times if region.t1 < t < region.t2}
                   | {float(t) for t in z.times if region.t1 < t < region.t2})
    total = np.zeros(len(m))
    for ta, tb in zip(knots[:-1], knots[1:]):
        vy = (y(tb) - y(ta)) / (tb - ta)
        vz = (z(tb) - z(ta)) / (tb - ta)
        lo = np.maximum(m.t0, ta)
        hi = np.minimum(m.t1, tb)
        xa = m.x0 + m.speed * (ta - m.t0)
        lo, hi = _clip(lo, hi, xa - y(ta), m.speed - vy, ta, strict=True)
        lo, hi = _clip(lo, hi, z(ta) - xa, vz - m.speed, ta, strict=True)
        total += np.maximum(hi - lo, 0.0)
    return total


def mu_mass(measure: EntropyMeasure, region, sign: str = "signed") -> float:
    """Mass of ``mu_+`` (``"plus"``), ``mu_-`` (``"minus"``) or ``mu`` in ``region``."""
    if len(measure) == 0:
        return 0.0
    if sign == "plus":
        dens = np.maximum(measure.density, 0.0)
    elif sign == "minus":
        dens = np.maximum(-measure.density, 0.0)
    elif sign == "signed":
        dens = measure.density
    else:
        raise ValueError(f"unknown sign {sign!r}")
    return math.fsum(dens * _lengths(measure, region))


def _boundary_flux(sim: Simulation, path: PiecewiseLinearPath, v0: float, side: str) -> float:
    """``int [q(u;v0) - path' eta(u|v0)] dtau`` with ``u`` the trace on ``side``."""
    terms = []
    for c, d, um, up in sim.traces_along(path):
        u = up if side == "plus" else um
        slope = path.slopes[min(np.searchsorted(path.times, 0.5 * (c + d)) - 1, path.slopes.size - 1)]
        terms.append((rel_flux(sim.model, u, v0) - slope * rel_entropy(u, v0)) * (d - c))
    return math.fsum(terms)


def variation_formula_terms(sim: Simulation, y: PiecewiseLinearPath, z: PiecewiseLinearPath,
                            v0: float, t1: float, t2: float, measure: EntropyMeasure | None = None):
    """Both sides of the windowed relative-entropy balance between ``y`` and ``z``.

    Returns ``(lhs, mu_term, y_flux, z_flux)`` with
    ``lhs = mu_term + y_flux - z_flux`` expected.
    """
    if not t1 < t2:
        raise ValueError("need t1 < t2")
    y, z = y.restrict(t1, t2), z.restrict(t1, t2)
    knots = sorted(set(y.times) | set(z.times))
    mids = [0.5 * (a + b) for a, b in zip(knots[:-1], knots[1:])]
    if any(y(t) > z(t) for t in knots) or any(not y(t) < z(t) for t in mids):
        raise ValueError("paths must satisfy y < z on (t1, t2)")
    if measure is None:
        measure = entropy_production(sim)

    def window(t):
        return sim.sample(t).integrate(lambda u: rel_entropy(u, v0), y(t), z(t))

    lhs = window(t2) - window(t1)
    mu_term = mu_mass(measure, Between(y, z, t1, t2))
    return lhs, mu_term, _boundary_flux(sim, y, v0, "plus"), _boundary_flux(sim, z, v0, "minus")


def variation_formula_check(sim: Simulation, y: PiecewiseLinearPath, z: PiecewiseLinearPath,
                            v0: float, t1: float, t2: float, measure: EntropyMeasure | None = None) -> float:
    """Absolute discrepancy of the relative-entropy balance law on the strip between ``y`` and ``z``."""
    lhs, mu_term, y_flux, z_flux = variation_formula_terms(sim, y, z, v0, t1, t2, measure)
    return abs(lhs - math.fsum([mu_term, y_flux, -z_flux]))


def random_path_pair(rng: np.random.Generator, t1: float, t2: float, span: float = 3.0, knots: int = 4):
    """Two random piecewise-linear paths with ``y < z`` on ``[t1, t2]``."""
    ts = np.concatenate(([t1], np.sort(rng.uniform(t1, t2, knots)), [t2]))
    ts = np.unique(ts)
    y = rng.uniform(-span, span, ts.size)
    z = y + rng.uniform(0.05, span, ts.size)
    return PiecewiseLinearPath(ts, y), PiecewiseLinearPath(ts, z)


def audit_variation_formula(sim: Simulation, pairs: int = 50, seed: int = 0, span: float = 3.0):
    """Discrepancies of the balance law on ``pairs`` random strips, times and ``v0``.

    ``v0`` is drawn from the solution's value range so the test exercises the
    relative flux away from the trivial ``v0 = u`` case.
    """
    rng = np.random.default_rng(seed)
    measure = entropy_production(sim)
    lo, hi = sim.value_range()
    out = []
    for _ in range(pairs):
        t1, t2 = np.sort(rng.uniform(0.0, sim.T, 2))
        if t2 - t1 < 1e-6:
            t2 = min(sim.T, t1 + 0.1)
        y, z = random_path_pair(rng, float(t1), float(t2), span)
        v0 = float(rng.uniform(lo - 0.5, hi + 0.5))
        out.append(variation_formula_check(sim, y, z, v0, float(t1), float(t2), measure))
    return out
