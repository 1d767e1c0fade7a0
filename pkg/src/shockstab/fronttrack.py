r"""
Front tracking
--------------

Exact event-driven evolution of piecewise-constant weak solutions of a
scalar conservation law with convex flux. Every discontinuity moves at its
Rankine-Hugoniot speed, so the computed function is an exact weak solution.

Upward jumps are either resolved into a fan of small pieces (each an exact,
mildly non-entropic, front) or kept as a single non-entropic front, which is
how finite-entropy solutions with positive entropy production are produced.

.. autoclass:: Profile
.. autoclass:: Front
.. autoclass:: Simulation
.. autofunction:: solve_riemann
.. autofunction:: run
"""

from __future__ import annotations

import heapq
import math
from bisect import bisect_right
from dataclasses import dataclass, field, replace

import numpy as np

from shockstab.flux import FluxModel, shock_speed

ENTROPIC_SHOCK = "entropic_shock"
RAREFACTION_PIECE = "rarefaction_piece"
NON_ENTROPIC = "non_entropic"

PERSIST = "persist_until_collision"
RESOLVE = "resolve_at_collision"
POLICIES = (PERSIST, RESOLVE)

DEFAULT_DELTA = 0.01
DEFAULT_EVENT_CAP = 10**6
TIME_TOL = 1e-12
# offset/slope tolerance for deciding that a path runs along a front
COINCIDE_TOL = 1e-9


class EventCapExceeded(RuntimeError):
    pass


# {{{ profiles

@dataclass(frozen=True, eq=False)
class Profile:
    """Piecewise-constant function of ``x``.

    ``values[0]`` is the left tail, ``values[-1]`` the right tail and
    ``values[k]`` holds on ``(breakpoints[k-1], breakpoints[k])``.
    """

    breakpoints: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        bps = np.asarray(self.breakpoints, dtype=float).reshape(-1)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if vals.size != bps.size + 1:
            raise ValueError(f"need len(values) == len(breakpoints) + 1, got {vals.size} and {bps.size}")
        if bps.size and not np.all(np.diff(bps) > 0):
            raise ValueError("breakpoints must be strictly increasing")
        if not (np.all(np.isfinite(bps)) and np.all(np.isfinite(vals))):
            raise ValueError("profile must be finite")
        object.__setattr__(self, "breakpoints", bps)
        object.__setattr__(self, "values", vals)

    @classmethod
    def constant(cls, value: float) -> "Profile":
        return cls(np.empty(0), np.array([value], dtype=float))

    @classmethod
    def step(cls, u_left: float, u_right: float, x: float = 0.0) -> "Profile":
        return cls.canonical([x], [u_left, u_right])

    @classmethod
    def canonical(cls, breakpoints, values) -> "Profile":
        """Drop zero-width cells and merge equal neighbouring values."""
        bps = list(map(float, breakpoints))
        vals = list(map(float, values))
        out_b, out_v = [], [vals[0]]
        for x, v in zip(bps, vals[1:]):
            if out_b and x <= out_b[-1]:
                # coincident breakpoint: the cell in between has zero width
                out_v[-1] = v
                if len(out_v) >= 2 and out_v[-1] == out_v[-2]:
                    out_v.pop()
                    out_b.pop()
                continue
            if v == out_v[-1]:
                continue
            out_b.append(x)
            out_v.append(v)
        return cls(np.array(out_b), np.array(out_v))

    def __eq__(self, other):
        if not isinstance(other, Profile):
            return NotImplemented
        return (np.array_equal(self.breakpoints, other.breakpoints)
                and np.array_equal(self.values, other.values))

    @property
    def left_tail(self) -> float:
        return float(self.values[0])

    @property
    def right_tail(self) -> float:
        return float(self.values[-1])

    @property
    def jumps(self):
        """``(x, u_left, u_right)`` for every breakpoint."""
        return [(float(x), float(self.values[k]), float(self.values[k + 1]))
                for k, x in enumerate(self.breakpoints)]

    def __call__(self, x):
        """Right-continuous evaluation."""
        idx = np.searchsorted(self.breakpoints, x, side="right")
        out = self.values[idx]
        return float(out) if np.ndim(out) == 0 else out

    def pieces(self, a: float, b: float):
        """Cells ``(x0, x1, value)`` covering ``[a, b]``, clipped to it."""
        if b < a:
            raise ValueError("need a <= b")
        edges = [a] + [float(x) for x in self.breakpoints if a < x < b] + [b]
        out = []
        for x0, x1 in zip(edges[:-1], edges[1:]):
            if x1 > x0:
                out.append((x0, x1, self(0.5 * (x0 + x1))))
        return out

    def integrate(self, func, a: float, b: float) -> float:
        """``int_a^b func(u(x)) dx`` as an exact sum over cells."""
        return math.fsum(func(v) * (x1 - x0) for x0, x1, v in self.pieces(a, b))

    def mass(self, a: float, b: float) -> float:
        return self.integrate(lambda v: v, a, b)

    def value_range(self):
        return float(self.values.min()), float(self.values.max())

# }}}


# {{{ fronts

@dataclass(frozen=True)
class Front:
    """A discontinuity line ``x(t) = position_at_birth + speed (t - born_at)``."""

    born_at: float
    position_at_birth: float
    speed: float
    u_left: float
    u_right: float
    kind: str
    id: int = -1
    died_at: float = math.inf

    def position(self, t):
        return self.position_at_birth + self.speed * (t - self.born_at)

    def rh_residual(self, model: FluxModel) -> float:
        return float(model.f(self.u_right) - model.f(self.u_left)
                     - self.speed * (self.u_right - self.u_left))


@dataclass(frozen=True)
class Event:
    time: float
    position: float
    incoming: tuple
    outgoing: tuple


@dataclass(frozen=True)
class Epoch:
    """Time interval with a fixed, ordered set of fronts."""

    t0: float
    t1: float
    fronts: tuple

    def states(self):
        """Constant states between fronts, left tail first."""
        if not self.fronts:
            return None
        return [self.fronts[0].u_left] + [f.u_right for f in self.fronts]


def solve_riemann(model: FluxModel, u_left: float, u_right: float, delta: float = DEFAULT_DELTA,
                  admissible: bool = True, t: float = 0.0, x: float = 0.0):
    """Fronts resolving the jump ``(u_left, u_right)`` placed at ``(t, x)``.

    Downward jumps give one entropic shock. Upward jumps give a fan of
    ``ceil((u_right - u_left) / delta)`` equal pieces when ``admissible``,
    otherwise one non-entropic front.
    """
    if not delta > 0:
        raise ValueError(f"delta must be positive, got {delta}")
    u_left, u_right = float(u_left), float(u_right)
    if u_left == u_right:
        return []
    if u_left > u_right or not admissible:
        kind = ENTROPIC_SHOCK if u_left > u_right else NON_ENTROPIC
        return [Front(t, x, shock_speed(model, u_left, u_right), u_left, u_right, kind)]

    jump = u_right - u_left
    n = max(1, math.ceil(jump / delta - 1e-9))
    levels = [u_left + jump * k / n for k in range(n)] + [u_right]
    return [Front(t, x, shock_speed(model, a, b), a, b, RAREFACTION_PIECE)
            for a, b in zip(levels[:-1], levels[1:])]

# }}}


# {{{ paths

class PiecewiseLinearPath:
    """Continuous piecewise-linear ``x(t)`` through the given knots."""

    def __init__(self, times, positions):
        self.times = np.asarray(times, dtype=float).reshape(-1)
        self.positions = np.asarray(positions, dtype=float).reshape(-1)
        if self.times.size < 2 or self.times.size != self.positions.size:
            raise ValueError("a path needs at least two knots with matching positions")
        if not np.all(np.diff(self.times) > 0):
            raise ValueError("knot times must be strictly increasing")

    @classmethod
    def affine(cls, x0: float, slope: float, t0: float, t1: float):
        return cls([t0, t1], [x0, x0 + slope * (t1 - t0)])

    @property
    def t0(self) -> float:
        return float(self.times[0])

    @property
    def t1(self) -> float:
        return float(self.times[-1])

    @property
    def slopes(self) -> np.ndarray:
        return np.diff(self.positions) / np.diff(self.times)

    def __call__(self, t):
        out = np.interp(t, self.times, self.positions)
        return float(out) if np.ndim(out) == 0 else out

    def pieces(self):
        """``(ta, tb, x(ta), slope)`` for every linear piece."""
        s = self.slopes
        return [(float(self.times[k]), float(self.times[k + 1]), float(self.positions[k]), float(s[k]))
                for k in range(s.size)]

    def lipschitz(self) -> float:
        return float(np.max(np.abs(self.slopes)))

    def restrict(self, t0: float, t1: float) -> "PiecewiseLinearPath":
        if not (self.t0 <= t0 < t1 <= self.t1):
            raise ValueError(f"[{t0}, {t1}] not inside the path domain [{self.t0}, {self.t1}]")
        inner = [t for t in self.times if t0 < t < t1]
        ts = [t0] + inner + [t1]
        return PiecewiseLinearPath(ts, [self(t) for t in ts])

# }}}


# {{{ simulation

@dataclass(frozen=True, eq=False)
class Simulation:
    model: FluxModel
    initial: Profile
    policy: str
    delta: float
    T: float
    fronts: tuple
    epochs: tuple
    events: tuple
    _starts: list = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "_starts", [e.t0 for e in self.epochs])

    def epoch_at(self, t: float) -> Epoch:
        """Epoch in force at ``t``; at event times the post-event one."""
        if not 0.0 <= t <= self.T:
            raise ValueError(f"time {t} outside [0, {self.T}]")
        return self.epochs[max(0, bisect_right(self._starts, t) - 1)]

    def sample(self, t: float) -> Profile:
        ep = self.epoch_at(t)
        if not ep.fronts:
            return Profile.constant(self.initial.left_tail)
        pos = np.maximum.accumulate([f.position(t) for f in ep.fronts])
        return Profile.canonical(pos, ep.states())

    def mass(self, t: float, a: float, b: float) -> float:
        if not a < b:
            raise ValueError("need a < b")
        return self.sample(t).mass(a, b)

    def value_range(self):
        return self.initial.value_range()

    def traces_along(self, path: PiecewiseLinearPath):
        """One-sided traces ``(t0, t1, u_minus, u_plus)`` along ``path``.

        The result is split at path knots and at every time the path crosses
        a front; while the path runs along a front its states are returned.
        """
        t_lo = max(path.t0, 0.0)
        t_hi = min(path.t1, self.T)
        out = []
        for ep in self.epochs:
            a0, b0 = max(ep.t0, t_lo), min(ep.t1, t_hi)
            if not b0 > a0:
                continue
            for ta, tb, xa, v in path.pieces():
                a, b = max(a0, ta), min(b0, tb)
                if not b > a:
                    continue
                xs = xa + v * (a - ta)
                for c, d, um, up in _epoch_traces(ep, a, b, xs, v, self.initial.left_tail):
                    if out and out[-1][1] == c and out[-1][2:] == (um, up) and c not in path.times:
                        out[-1] = (out[-1][0], d, um, up)
                    else:
                        out.append((c, d, um, up))
        return out

    def max_rh_residual(self) -> float:
        return max((abs(f.rh_residual(self.model)) for f in self.fronts), default=0.0)

    def reach(self) -> float:
        """Half-width of a window containing every front on ``[0, T]``."""
        xs = [abs(f.position(t)) for f in self.fronts
              for t in (f.born_at, min(f.died_at, self.T))]
        return max(xs, default=0.0)

    def mass_defect(self, t: float, pad: float = 1.0) -> float:
        """Relative defect of ``mass(t) - mass(0) = t (f(u_L) - f(u_R))`` on a window holding all fronts.

        With different tail fluxes mass flows through the window edges at a
        constant rate, so plain conservation is only expected when they match.
        """
        L = self.reach() + pad
        m0, mt = self.mass(0.0, -L, L), self.mass(t, -L, L)
        inflow = t * float(self.model.f(self.initial.left_tail) - self.model.f(self.initial.right_tail))
        return abs(mt - m0 - inflow) / max(1.0, abs(m0), abs(mt))

    def segments(self):
        """``(t0, t1, front)`` for every front and epoch, in epoch order."""
        for ep in self.epochs:
            if ep.t1 > ep.t0:
                for f in ep.fronts:
                    yield ep.t0, ep.t1, f


def _epoch_traces(ep: Epoch, a: float, b: float, x_a: float, v: float, tail: float):
    if not ep.fronts:
        return [(a, b, tail, tail)]
    offs = np.array([f.position(a) for f in ep.fronts]) - x_a
    rel = np.array([f.speed for f in ep.fronts]) - v
    cuts = {a, b}
    for d0, r in zip(offs, rel):
        if r != 0.0:
            tc = a - d0 / r
            if a < tc < b:
                cuts.add(float(tc))
    cuts = sorted(cuts)
    states = ep.states()
    out = []
    for c, d in zip(cuts[:-1], cuts[1:]):
        m = 0.5 * (c + d)
        dm = offs + rel * (m - a)
        scale = 1.0 + abs(x_a) + abs(v) * (b - a)
        on = np.nonzero((np.abs(dm) <= COINCIDE_TOL * scale) & (np.abs(rel) <= COINCIDE_TOL))[0]
        if on.size:
            um, up = ep.fronts[on[0]].u_left, ep.fronts[on[-1]].u_right
        else:
            u = states[int(np.count_nonzero(dm < 0))]
            um = up = u
        out.append((c, d, float(um), float(up)))
    return out


def run(initial: Profile, model: FluxModel, policy: str = RESOLVE, delta: float = DEFAULT_DELTA,
        T: float = 1.0, admissible=None, event_cap: int = DEFAULT_EVENT_CAP) -> Simulation:
    """Track all fronts of ``initial`` on ``[0, T]``.

    ``admissible`` optionally flags each initial jump; a ``False`` upward
    jump starts as a single non-entropic front. At a collision the incoming
    fronts are replaced by the Riemann solution of the outer states, which
    may be non-entropic only under ``persist_until_collision``.
    """
    if policy not in POLICIES:
        raise ValueError(f"unknown policy {policy!r}")
    if not T > 0:
        raise ValueError(f"T must be positive, got {T}")
    T = float(T)
    jumps = initial.jumps
    if admissible is None:
        admissible = [True] * len(jumps)
    if len(admissible) != len(jumps):
        raise ValueError("one admissibility flag per initial jump expected")

    recs: list[Front] = []
    died: dict[int, float] = {}
    left_of: dict[int, int | None] = {}
    right_of: dict[int, int | None] = {}
    head = None

    def spawn(fr: Front) -> int:
        fid = len(recs)
        recs.append(replace(fr, id=fid))
        return fid

    order = []
    for (x, ul, ur), adm in zip(jumps, admissible):
        order.extend(spawn(fr) for fr in solve_riemann(model, ul, ur, delta, bool(adm), 0.0, x))
    for k, fid in enumerate(order):
        left_of[fid] = order[k - 1] if k else None
        right_of[fid] = order[k + 1] if k + 1 < len(order) else None
    head = order[0] if order else None

    heap: list = []
    seq = 0

    def push(a, b, now):
        nonlocal seq
        if a is None or b is None:
            return
        fa, fb = recs[a], recs[b]
        if not fa.speed > fb.speed:
            return
        gap = fb.position(now) - fa.position(now)
        tc = now + max(gap, 0.0) / (fa.speed - fb.speed)
        heapq.heappush(heap, (tc, seq, a, b))
        seq += 1

    def valid(a, b):
        return a not in died and b not in died and right_of.get(a) == b

    def snapshot():
        ids, cur = [], head
        while cur is not None:
            ids.append(cur)
            cur = right_of[cur]
        return ids

    for a, b in zip(order[:-1], order[1:]):
        push(a, b, 0.0)

    epochs_ids = []
    events_raw = []
    epoch_start = 0.0
    while heap:
        while heap and not valid(heap[0][2], heap[0][3]):
            heapq.heappop(heap)
        if not heap or heap[0][0] > T:
            break
        t_ev = heap[0][0]
        pairs = set()
        while heap and heap[0][0] <= t_ev + TIME_TOL:
            _, _, a, b = heapq.heappop(heap)
            if valid(a, b):
                pairs.add((a, b))
        rights = {b for _, b in pairs}
        nxt = dict(pairs)
        clusters = []
        for a, _ in pairs:
            if a in rights:
                continue
            chain = [a]
            while chain[-1] in nxt:
                chain.append(nxt[chain[-1]])
            clusters.append(chain)
        clusters.sort(key=lambda ch: (recs[ch[0]].position(t_ev), ch[0]))

        if t_ev > epoch_start:
            epochs_ids.append((epoch_start, t_ev, snapshot()))
            epoch_start = t_ev

        touched = []
        for chain in clusters:
            if len(events_raw) >= event_cap:
                raise EventCapExceeded(
                    f"event cap {event_cap} reached at t={t_ev:.17g} with {len(snapshot())} active fronts")
            ul, ur = recs[chain[0]].u_left, recs[chain[-1]].u_right
            x_c = math.fsum(recs[i].position(t_ev) for i in chain) / len(chain)
            adm = policy == RESOLVE or ul > ur
            outs = [spawn(fr) for fr in solve_riemann(model, ul, ur, delta, adm, t_ev, x_c)]
            lft, rgt = left_of[chain[0]], right_of[chain[-1]]
            for i in chain:
                died[i] = t_ev
            seqn = [lft] + outs + [rgt]
            for p, n in zip(seqn[:-1], seqn[1:]):
                if p is not None:
                    right_of[p] = n
                if n is not None:
                    left_of[n] = p
            if lft is None:
                head = outs[0] if outs else rgt
            events_raw.append((t_ev, x_c, tuple(chain), tuple(outs)))
            touched.extend(outs)
            if lft is not None:
                touched.append(lft)
            if rgt is not None:
                touched.append(rgt)
        for fid in touched:
            if fid not in died:
                push(left_of[fid], fid, t_ev)
                push(fid, right_of[fid], t_ev)

    epochs_ids.append((epoch_start, T, snapshot()))

    final = tuple(replace(fr, died_at=died.get(fr.id, math.inf)) for fr in recs)
    epochs = tuple(Epoch(t0, t1, tuple(final[i] for i in ids)) for t0, t1, ids in epochs_ids)
    events = tuple(Event(*ev) for ev in events_raw)
    return Simulation(model, initial, policy, float(delta), float(T), final, epochs, events)

# }}}
