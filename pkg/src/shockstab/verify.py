"""Brute-force certification of the dissipation bound and the jump identities.

Quadruples ``(u_-, u_+, u_ell, u_r)`` come from a lexicographic grid (only
``u_ell > u_r`` kept) followed by seeded uniform samples. Every quadruple has
a global index: grid points first, in lexicographic order, then samples in
draw order. Work is split into fixed-size chunks, so the worst-margin witness
(ties go to the smaller index) does not depend on the worker count.
"""

from __future__ import annotations

import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from shockstab.entropy import (
    DEFAULT_C1,
    DEFAULT_C2,
    burgers_dissipation_closed_form,
    dissipation_rate,
    dissipation_rate_g_oracle_masked,
    drift_penalty,
    jump_entropy_cost,
    rel_entropy,
    rel_flux,
    split_terms,
)
from shockstab.flux import FluxModel, hull_bounds

TOL = 1e-9
CHUNK = 1 << 16
ORACLE_CHUNK = 1 << 13
ORACLE_TOL = 1e-10
CASES = ("all", "case1", "case2")
MAX_WITNESSES = 20


@dataclass(frozen=True)
class GridSpec:
    model: FluxModel
    ranges: tuple = ((-2.0, 2.0),) * 4
    points: int = 21
    random: int = 0
    seed: int = 0
    case: str = "all"

    def __post_init__(self):
        if self.points < 1:
            raise ValueError("points per axis must be >= 1")
        if len(self.ranges) != 4 or any(lo > hi for lo, hi in self.ranges):
            raise ValueError("need four (lo, hi) ranges with lo <= hi")
        if self.case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        if self.random < 0:
            raise ValueError("random sample count must be >= 0")

    @classmethod
    def single(cls, model, um, up, ul, ur):
        """One-point grid at the given quadruple."""
        return cls(model, tuple((float(v), float(v)) for v in (um, up, ul, ur)), points=1)

    def axes(self):
        return [np.linspace(lo, hi, self.points) if self.points > 1 else np.array([lo])
                for lo, hi in self.ranges]

    @property
    def grid_size(self) -> int:
        return self.points ** 4

    def quadruples(self) -> np.ndarray:
        """``(4, n)`` array: filtered grid points, then random samples."""
        um, up, ul, ur = np.meshgrid(*self.axes(), indexing="ij")
        grid = np.stack([a.ravel() for a in (um, up, ul, ur)])
        parts = [grid]
        if self.random:
            rng = np.random.default_rng(self.seed)
            lo = np.array([r[0] for r in self.ranges])[:, None]
            hi = np.array([r[1] for r in self.ranges])[:, None]
            r = lo + (hi - lo) * rng.random((4, self.random))
            if self.ranges[2] == self.ranges[3]:
                # order (u_ell, u_r) rather than discard, so every draw is usable
                r[2], r[3] = np.maximum(r[2], r[3]), np.minimum(r[2], r[3])
            parts.append(r)
        q = np.concatenate(parts, axis=1)
        keep = q[2] > q[3]
        if self.case == "case1":
            keep &= q[1] >= q[0]
        elif self.case == "case2":
            keep &= q[0] > q[1]
        return q[:, keep]

    def describe(self):
        return {"model": self.model.to_spec(), "ranges": [list(r) for r in self.ranges],
                "points": self.points, "random": self.random, "seed": self.seed, "case": self.case}


@dataclass
class CheckResult:
    name: str
    count: int = 0
    worst_margin: float = math.inf
    witness: tuple | None = None
    witness_index: int = -1
    violations: int = 0
    oracle_failures: int = 0

    def as_dict(self):
        return dict(self.__dict__)


@dataclass
class VerifyReport:
    spec: dict
    n_quadruples: int
    checks: dict
    violations: list
    throughput: dict = field(default_factory=dict, compare=False)

    @property
    def ok(self) -> bool:
        return all(c.violations == 0 and c.oracle_failures == 0 for c in self.checks.values())

    @property
    def n_violations(self) -> int:
        return sum(c.violations + c.oracle_failures for c in self.checks.values())

    def as_dict(self):
        return {
            "spec": self.spec,
            "n_quadruples": self.n_quadruples,
            "ok": self.ok,
            "checks": {k: c.as_dict() for k, c in self.checks.items()},
            "violations": self.violations,
            "throughput": self.throughput,
        }


def _scale(*terms):
    return np.maximum.reduce([np.ones_like(terms[0])] + [np.abs(t) for t in terms])


def _bracket(value, a, b):
    """Margin of ``value`` inside the interval spanned by ``a`` and ``b``."""
    return np.minimum(value - np.minimum(a, b), np.maximum(a, b) - value)


def dbound_margins(model: FluxModel, q, constants=(DEFAULT_C1, DEFAULT_C2)):
    """``{"dbound": (margin, scale)}`` with ``margin = rhs - D``."""
    um, up, ul, ur = q
    C1, C2 = constants
    alpha, M, _ = hull_bounds(model, um, up, ul, ur)
    D = dissipation_rate(model, (um, up), (ul, ur))
    E = jump_entropy_cost(model, (um, up))
    rhs = C1 * (M / alpha) ** 3 * np.maximum(E, 0.0) - C2 * alpha * drift_penalty((um, up), (ul, ur))
    return {"dbound": (rhs - D, _scale(D, rhs))}


def identity_margins(model: FluxModel, q):
    """Margins (``>= -tol*scale`` means pass) of every closed-form identity and bound."""
    um, up, ul, ur = q
    out = {}
    D = dissipation_rate(model, (um, up), (ul, ur))
    E, Fm, Fp, Dmm, Dpp = split_terms(model, (um, up), (ul, ur))
    delta = up - um

    # brackets use f'' bounds on the smallest interval their derivation touches
    a_j, M_j, _ = hull_bounds(model, um, up)
    lo_E, hi_E = a_j * delta ** 3 / 12.0, M_j * delta ** 3 / 12.0
    out["idE"] = (_bracket(E, lo_E, hi_E), _scale(E, lo_E, hi_E))
    for name, F, u, sign in (("idF-", Fm, um, 1.0), ("idF+", Fp, up, -1.0)):
        A, B = ul - u, ur - u
        base = sign * 0.25 * delta * (A * A - B * B)
        out[name] = (_bracket(F, a_j * base, M_j * base), _scale(F, a_j * base, M_j * base))

    for name, Du, u in (("boundDu-", Dmm, um), ("boundDu+", Dpp, up)):
        a_u, _, _ = hull_bounds(model, u, ul, ur)
        A, B = ul - u, ur - u
        bound = -a_u / 6.0 * (A ** 3 - B ** 3)
        out[name] = (bound - Du, _scale(Du, bound))

    for name, split in (("split-", E + Fm + Dmm), ("split+", E + Fp + Dpp)):
        out[name] = (-np.abs(split - D), _scale(D, E, Fm, Fp, Dmm, Dpp))

    # Burgers closed form, its lower bound for downward jumps, and the comparison -D >= -alpha D0
    D0 = burgers_dissipation_closed_form((um, up), (ul, ur))
    down = um >= up
    pen = drift_penalty((um, up), (ul, ur))
    m = np.where(down, -D0 - pen / 12.0, np.inf)
    out["boundD0"] = (m, _scale(D0, pen))
    alpha4, _, _ = hull_bounds(model, um, up, ul, ur)
    m = np.where(um > up, -D + alpha4 * D0, np.inf)
    out["compareD0"] = (m, _scale(D, alpha4 * D0))
    if model.kind == "burgers":
        out["closedD0"] = (-np.abs(D - D0), _scale(D, D0))

    qb = []
    for u, v in ((um, ul), (up, ur), (um, up), (ul, ur), (um, ur), (up, ul)):
        _, _, S = hull_bounds(model, u, v)
        rq, re = rel_flux(model, u, v), S * rel_entropy(u, v)
        qb.append((re - np.abs(rq), _scale(rq, re)))
    margin = np.minimum.reduce([m for m, _ in qb])
    out["qbound"] = (margin, np.maximum.reduce([s for _, s in qb]))
    return out


def oracle_margins(model: FluxModel, q, tol=ORACLE_TOL, upto=None):
    """g-integral oracle against the closed form on the first ``upto`` columns (others skipped)."""
    um, up, ul, ur = q
    D = dissipation_rate(model, (um, up), (ul, ur))
    n = D.size if upto is None else max(0, min(int(upto), D.size))
    Dg = np.zeros_like(D)
    margin = np.full(D.shape, np.inf)
    for s in range(0, n, ORACLE_CHUNK):
        sl = slice(s, min(s + ORACLE_CHUNK, n))
        Dg[sl], ok = dissipation_rate_g_oracle_masked(model, (um[sl], up[sl]), (ul[sl], ur[sl]), tol)
        margin[sl] = np.where(ok, -np.abs(D[sl] - Dg[sl]), np.nan)
    return {"g_oracle": (margin, _scale(D, Dg))}


def _chunk_task(args):
    kind, model, q, offset, constants, oracle_limit = args
    if kind == "dbound":
        margins = dbound_margins(model, q, constants)
    else:
        margins = identity_margins(model, q)
        upto = None if oracle_limit is None else oracle_limit - offset
        if upto is None or upto > 0:
            margins.update(oracle_margins(model, q, upto=upto))
    out = {}
    for name, (m, scale) in margins.items():
        failed = np.isnan(m)
        mm = np.where(failed, np.inf, m)
        bad = np.flatnonzero(mm < -TOL * scale)
        k = int(np.argmin(mm)) if mm.size else -1
        out[name] = {
            "count": int(np.isfinite(mm).sum() + failed.sum()),
            "worst": float(mm[k]) if k >= 0 else math.inf,
            "worst_index": offset + k,
            "worst_q": tuple(float(v) for v in q[:, k]) if k >= 0 else None,
            "bad": [(offset + int(i), tuple(float(v) for v in q[:, i]), float(m[i]))
                    for i in bad[:MAX_WITNESSES]],
            "n_bad": int(bad.size),
            "n_failed": int(failed.sum()),
        }
    return out


def _run(kind, spec: GridSpec, constants=(DEFAULT_C1, DEFAULT_C2), workers=1, oracle_limit=None):
    start = time.perf_counter()
    q = spec.quadruples()
    n = q.shape[1]
    tasks = [(kind, spec.model, q[:, s:s + CHUNK], s, constants, oracle_limit) for s in range(0, n, CHUNK)]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_chunk_task, tasks))
    else:
        parts = [_chunk_task(t) for t in tasks]

    checks, violations = {}, []
    for part in parts:  # chunk order, so the reduction is deterministic
        for name, r in part.items():
            c = checks.setdefault(name, CheckResult(name))
            c.count += r["count"]
            c.violations += r["n_bad"]
            c.oracle_failures += r["n_failed"]
            if r["worst"] < c.worst_margin:
                c.worst_margin, c.witness, c.witness_index = r["worst"], r["worst_q"], r["worst_index"]
            for idx, quad, margin in r["bad"]:
                if len(violations) < MAX_WITNESSES:
                    violations.append({"check": name, "index": idx, "quadruple": list(quad),
                                       "margin": margin})
    elapsed = time.perf_counter() - start
    return VerifyReport(
        spec=dict(spec.describe(), constants=list(constants)) if kind == "dbound" else spec.describe(),
        n_quadruples=n,
        checks=checks,
        violations=violations,
        throughput={"seconds": elapsed, "quadruples_per_second": n / elapsed if elapsed > 0 else math.inf,
                    "workers": workers},
    )


def verify_dbound(spec: GridSpec, constants=(DEFAULT_C1, DEFAULT_C2), workers: int = 1) -> VerifyReport:
    """Check ``D <= C1 (M/alpha)^3 max(E,0) - C2 alpha (u_ell-u_r)[...]`` on every quadruple."""
    return _run("dbound", spec, tuple(float(c) for c in constants), workers)


def verify_identities(spec: GridSpec, workers: int = 1, oracle_limit: int | None = None) -> VerifyReport:
    """Brackets, split identities, Burgers bounds, ``|q(u;v)| <= S eta(u|v)`` and the g-oracle.

    The quadrature oracle is by far the slowest check; ``oracle_limit`` caps
    it to the first that many quadruples (``None`` means all, 0 none).
    """
    report = _run("identities", spec, workers=workers, oracle_limit=oracle_limit)
    report.spec["oracle_limit"] = oracle_limit
    return report


def _dbound_parts(spec: GridSpec):
    um, up, ul, ur = spec.quadruples()
    alpha, M, _ = hull_bounds(spec.model, um, up, ul, ur)
    D = dissipation_rate(spec.model, (um, up), (ul, ur))
    P = (M / alpha) ** 3 * np.maximum(jump_entropy_cost(spec.model, (um, up)), 0.0)
    Q = alpha * drift_penalty((um, up), (ul, ur))
    return np.stack([um, up, ul, ur]), D, P, Q


def _feasible(D, P, Q, C1, C2):
    rhs = C1 * P - C2 * Q
    return bool(np.all(rhs - D >= -TOL * _scale(D, rhs)))


def _bisect(ok, lo, hi, want_min, tol=1e-3):
    """Bisection on a monotone predicate; ``ok(hi)`` (min) or ``ok(lo)`` (max) must hold."""
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid) == want_min:
            hi = mid
        else:
            lo = mid
    return hi if want_min else lo


@dataclass
class SharpConstants:
    C1_min: float | None
    C2_max: float | None
    C1_witness: tuple | None
    C2_witness: tuple | None
    notes: list


def estimate_sharp_constants(spec: GridSpec, C1=DEFAULT_C1, C2=DEFAULT_C2, cap: float = 1e6) -> SharpConstants:
    """Smallest ``C1`` (at ``C2``) and largest ``C2`` (at ``C1``) without violations, to 1e-3.

    A constant that no grid point constrains is reported as ``None``.
    """
    q, D, P, Q = _dbound_parts(spec)
    notes = []

    def binding(c1, c2, weight):
        rhs = c1 * P - c2 * Q
        with np.errstate(divide="ignore", invalid="ignore"):
            slack = np.where(weight > 0, (rhs - D) / weight, np.inf)
        k = int(np.argmin(slack)) if slack.size else -1
        return tuple(float(v) for v in q[:, k]) if k >= 0 else None

    if not np.any(P > 0):
        c1_min, w1 = None, None
        notes.append("C1 unconstrained: no quadruple with E > 0")
        if not _feasible(D, P, Q, 0.0, C2):
            notes.append(f"C2={C2} is violated where E <= 0; no C1 can help")
    elif not _feasible(D, P, Q, cap, C2):
        c1_min, w1 = None, None
        notes.append(f"C1 infeasible up to {cap} at C2={C2}")
    elif _feasible(D, P, Q, 0.0, C2):
        c1_min, w1 = 0.0, None
        notes.append("C1 = 0 already suffices")
    else:
        hi = 1.0
        while not _feasible(D, P, Q, hi, C2):
            hi *= 2.0
        c1_min = _bisect(lambda c: _feasible(D, P, Q, c, C2), 0.0, hi, want_min=True)
        w1 = binding(c1_min, C2, P)

    if not np.any(Q > 0):
        c2_max, w2 = None, None
        notes.append("C2 unconstrained: drift penalty vanishes on every quadruple")
    elif not _feasible(D, P, Q, C1, 0.0):
        c2_max, w2 = None, None
        notes.append(f"C1={C1} infeasible even with C2=0")
    else:
        lo = 0.0
        hi = 1.0
        while _feasible(D, P, Q, C1, hi) and hi < cap:
            lo, hi = hi, hi * 2.0
        if _feasible(D, P, Q, C1, hi):
            c2_max, w2 = None, None
            notes.append(f"C2 unconstrained up to {cap}")
        else:
            c2_max = _bisect(lambda c: _feasible(D, P, Q, C1, c), lo, hi, want_min=False)
            w2 = binding(C1, c2_max, Q)
    return SharpConstants(c1_min, c2_max, w1, w2, notes)
