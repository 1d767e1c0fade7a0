"""Shift path of the reference shock as a generalized characteristic.

Starting from ``x(0) = 0`` the path either rides a front (slope equal to
the front's Rankine-Hugoniot speed) or crosses a constant region along a
characteristic (slope ``f'(u)``). A free characteristic only ever meets
entropic shocks, where it attaches and stays. At a collision involving the
carried front the path continues on the outgoing front through that point.
"""

from __future__ import annotations

import math

import numpy as np

from shockstab.flux import shock_speed
from shockstab.fronttrack import COINCIDE_TOL, PiecewiseLinearPath, Simulation


class ShiftPath(PiecewiseLinearPath):
    """Piecewise-linear path with a per-piece ``attached`` flag and front id."""

    def __init__(self, times, positions, attached, carriers):
        super().__init__(times, positions)
        self.attached = tuple(bool(a) for a in attached)
        self.carriers = tuple(carriers)
        if len(self.attached) != self.times.size - 1:
            raise ValueError("one attached flag per piece expected")

    @property
    def knots(self):
        return list(zip(self.times.tolist(), self.positions.tolist()))


def _pick(fronts, sigma_ref):
    # several fronts leave one point only inside a fan; any piece satisfies the inclusion
    return min(fronts, key=lambda f: (abs(f.speed - sigma_ref), f.speed))


def _coincident(fronts, t, x):
    return [f for f in fronts if abs(f.position(t) - x) <= COINCIDE_TOL * (1.0 + abs(x))]


def _ambient(epoch, t, x, tail):
    if not epoch.fronts:
        return tail
    left = sum(1 for f in epoch.fronts if f.position(t) < x)
    return epoch.states()[left]


def construct_shift(sim: Simulation, sigma_ref: float | None = None, expect_front: bool = True,
                    x0: float = 0.0) -> ShiftPath:
    """Generalized characteristic from ``(0, x0)`` on ``[0, T]``.

    ``sigma_ref`` breaks ties when several fronts leave the same point (the
    piece with speed closest to it is followed). With ``expect_front`` a
    missing front at ``(0, x0)`` is an error.
    """
    model = sim.model
    tail = sim.initial.left_tail
    ep0 = sim.epochs[0]
    here = _coincident(ep0.fronts, 0.0, x0)
    if sigma_ref is None:
        sigma_ref = 0.0
    if not here and expect_front:
        raise ValueError(f"no front at x={x0} at t=0")

    times, pos, attached, carriers = [0.0], [float(x0)], [], []
    carrier = _pick(here, sigma_ref) if here else None
    t, x = 0.0, float(x0)

    def add_knot(tn, xn, on):
        times.append(tn)
        pos.append(xn)
        attached.append(on is not None)
        carriers.append(on.id if on is not None else None)

    k = 0
    while True:
        ep = sim.epochs[k]
        if carrier is None:
            here = _coincident(ep.fronts, t, x)
            if here:
                carrier = _pick(here, sigma_ref)
        while t < ep.t1:
            if carrier is not None:
                x = carrier.position(ep.t1)
                add_knot(ep.t1, x, carrier)
                t = ep.t1
                break
            v = float(model.f1(_ambient(ep, t, x, tail)))
            hit_t, hit = ep.t1, None
            for f in ep.fronts:
                rel = f.speed - v
                if rel != 0.0:
                    th = t - (f.position(t) - x) / rel
                    if t < th and (th < hit_t or (th == hit_t and hit is None)):
                        hit_t, hit = th, f
            x = hit.position(hit_t) if hit is not None else x + v * (hit_t - t)
            add_knot(hit_t, x, None)
            t, carrier = hit_t, hit
        if k == len(sim.epochs) - 1 or t >= sim.T:
            break
        k += 1
        carrier, snapped = _successor(sim, carrier, t, sigma_ref)
        if snapped is not None:
            x = pos[-1] = snapped
    return _finish(times, pos, attached, carriers)


def _successor(sim, carrier, t, sigma_ref):
    """Front carrying the path just after ``t`` (``None`` if annihilated)."""
    snapped = None
    while carrier is not None and carrier.died_at <= t:
        ev = next(e for e in sim.events if carrier.id in e.incoming)
        outs = [sim.fronts[i] for i in ev.outgoing]
        carrier = _pick(outs, sigma_ref) if outs else None
        snapped = carrier.position(t) if carrier is not None else ev.position
    return carrier, snapped


def _finish(times, pos, attached, carriers):
    # drop zero-length pieces left by hits exactly at epoch boundaries
    ts, xs, att, car = [times[0]], [pos[0]], [], []
    for tn, xn, a, c in zip(times[1:], pos[1:], attached, carriers):
        if tn > ts[-1]:
            ts.append(tn)
            xs.append(xn)
            att.append(a)
            car.append(c)
        else:
            xs[-1] = xn
    return ShiftPath(ts, xs, att, car)


class Drift(PiecewiseLinearPath):
    """``h(t) = x(t) - sigma t``."""


def drift(path: PiecewiseLinearPath, sigma_shock: float) -> Drift:
    return Drift(path.times, path.positions - sigma_shock * path.times)


def drift_energy(path: PiecewiseLinearPath, sigma_shock: float, t: float) -> float:
    """``int_0^t h'(tau)^2 dtau`` as an exact sum over pieces."""
    if t > path.t1 + 1e-15:
        raise ValueError(f"t={t} beyond the path end {path.t1}")
    terms = []
    for ta, tb, _, v in path.pieces():
        if ta >= t:
            break
        terms.append((v - sigma_shock) ** 2 * (min(tb, t) - ta))
    return math.fsum(terms)


def inclusion_residuals(sim: Simulation, path: PiecewiseLinearPath):
    """Per trace interval: ``(slope - sigma(u-, u+), distance of slope outside [f'(u-), f'(u+)])``."""
    model = sim.model
    out = []
    for c, d, um, up in sim.traces_along(path):
        k = min(int(np.searchsorted(path.times, 0.5 * (c + d))) - 1, path.slopes.size - 1)
        v = float(path.slopes[k])
        lo, hi = sorted((float(model.f1(um)), float(model.f1(up))))
        out.append((c, d, v - shock_speed(model, um, up), max(lo - v, v - hi, 0.0)))
    return out
