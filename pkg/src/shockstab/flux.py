r"""
Convex flux models
------------------

Three closed-form families of uniformly convex fluxes for

.. math::

    \partial_t u + \partial_x f(u) = 0,

together with the entropy flux :math:`q' = u f'` of the quadratic entropy
:math:`\eta(u) = u^2/2`, Rankine-Hugoniot speeds and exact bounds of
:math:`f''` and :math:`|f'|` on an interval.

All evaluators accept floats or numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

KINDS = ("burgers", "quartic", "cosh")

def _out(x):
    if np.ndim(x) == 0:
        return float(x)
    return x


@dataclass(frozen=True)
class FluxModel:
    """A uniformly convex flux.

    * ``burgers``: :math:`f = u^2/2`
    * ``quartic``: :math:`f = a u^2/2 + b u^4/4` with ``a > 0``, ``b >= 0``
    * ``cosh``: :math:`f = \\cosh u`
    """

    kind: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown flux kind {self.kind!r}; expected one of {KINDS}")
        if self.kind == "quartic":
            a = float(self.params.get("a", 1.0))
            b = float(self.params.get("b", 0.0))
            if not a > 0 or not b >= 0:
                raise ValueError(f"quartic flux needs a > 0 and b >= 0, got a={a}, b={b}")
            object.__setattr__(self, "params", {"a": a, "b": b})
        elif self.params:
            raise ValueError(f"flux {self.kind!r} takes no parameters")

    def __hash__(self):
        return hash((self.kind, tuple(sorted(self.params.items()))))

    @classmethod
    def burgers(cls) -> "FluxModel":
        return cls("burgers")

    @classmethod
    def quartic(cls, a: float = 1.0, b: float = 0.0) -> "FluxModel":
        return cls("quartic", {"a": a, "b": b})

    @classmethod
    def cosh(cls) -> "FluxModel":
        return cls("cosh")

    @classmethod
    def from_spec(cls, spec: dict) -> "FluxModel":
        """Build from ``{"name": ..., "params": {...}}``."""
        return cls(spec["name"], dict(spec.get("params", {})))

    def to_spec(self) -> dict:
        return {"name": self.kind, "params": dict(self.params)}

    # {{{ closed forms

    def f(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "burgers":
            r = 0.5 * u * u
        elif self.kind == "quartic":
            a, b = self.params["a"], self.params["b"]
            u2 = u * u
            r = 0.5 * a * u2 + 0.25 * b * u2 * u2
        else:
            r = np.cosh(u)
        return _out(r)

    def f1(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "burgers":
            r = u + 0.0
        elif self.kind == "quartic":
            a, b = self.params["a"], self.params["b"]
            r = a * u + b * u * u * u
        else:
            r = np.sinh(u)
        return _out(r)

    def f2(self, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "burgers":
            r = np.ones_like(u)
        elif self.kind == "quartic":
            a, b = self.params["a"], self.params["b"]
            r = a + 3.0 * b * u * u
        else:
            r = np.cosh(u)
        return _out(r)

    def q(self, u):
        """Entropy flux ``q(u) = int_0^u t f'(t) dt``."""
        u = np.asarray(u, dtype=float)
        if self.kind == "burgers":
            r = u * u * u / 3.0
        elif self.kind == "quartic":
            a, b = self.params["a"], self.params["b"]
            u3 = u * u * u
            r = a * u3 / 3.0 + b * u3 * u * u / 5.0
        else:
            r = u * np.cosh(u) - np.sinh(u)
        return _out(r)

    # }}}

    def secant_excess(self, a, b):
        """``sigma(a, b) - f'(a)`` without the cancellation of the naive difference.

        Equals ``(b - a) int_0^1 (1 - s) f''(a + s (b - a)) ds``.
        """
        a = np.asarray(a, dtype=float)
        d = np.asarray(b, dtype=float) - a
        if self.kind == "burgers":
            r = 0.5 * d
        elif self.kind == "quartic":
            pa, pb = self.params["a"], self.params["b"]
            r = d * (0.5 * pa + 0.25 * pb * (6.0 * a * a + 4.0 * a * d + d * d))
        else:
            d2 = d * d
            # (sinh d - d) / d, by its series where the direct form cancels
            series = d2 * (1 / 6 + d2 * (1 / 120 + d2 * (1 / 5040 + d2 * (1 / 362880 + d2 / 39916800))))
            with np.errstate(divide="ignore", invalid="ignore"):
                direct = (np.sinh(d) - d) / d
                half = np.where(d != 0, 2.0 * np.sinh(0.5 * d) ** 2 / d, 0.0)
            r = np.cosh(a) * half + np.sinh(a) * np.where(np.abs(d) < 0.1, series, direct)
        return _out(r)

    def evaluate(self, order: str, u):
        """Evaluate ``order`` in ``{"f", "f1", "f2", "q"}`` at ``u``."""
        try:
            fn = {"f": self.f, "f1": self.f1, "f2": self.f2, "q": self.q}[order]
        except KeyError:
            raise ValueError(f"unknown order {order!r}") from None
        return fn(u)

    def shock_speed(self, u_minus, u_plus):
        return shock_speed(self, u_minus, u_plus)

    def bounds(self, lo: float, hi: float) -> "IntervalBounds":
        return bounds_on_interval(self, lo, hi)


def evaluate(model: FluxModel, order: str, u):
    return model.evaluate(order, u)


def shock_speed(model: FluxModel, u_minus, u_plus):
    """Rankine-Hugoniot speed, extended by ``f'`` on the diagonal.

    Built as the mean of ``f'`` at both ends plus the two secant excesses,
    which is symmetric in its arguments and free of the ``1/(u_+ - u_-)``
    cancellation of the plain difference quotient.
    """
    ends = model.f1(u_minus) + model.f1(u_plus)
    excess = model.secant_excess(u_minus, u_plus) + model.secant_excess(u_plus, u_minus)
    return _out(0.5 * (np.asarray(ends) + np.asarray(excess)) + 0.0)


@dataclass(frozen=True)
class IntervalBounds:
    """Exact ``inf f''`` (alpha), ``sup f''`` (M) and ``sup |f'|`` (S) on ``[lo, hi]``."""

    alpha: float
    M: float
    S: float
    lo: float
    hi: float

    @property
    def ratio(self) -> float:
        """``M**3 / alpha**3``, the prefactor of the entropy-production terms."""
        return (self.M / self.alpha) ** 3


def bounds_on_interval(model: FluxModel, lo: float, hi: float) -> IntervalBounds:
    # f'' is even and nondecreasing in |u| and f' is increasing for all three families
    lo, hi = float(lo), float(hi)
    if lo > hi:
        raise ValueError(f"empty interval [{lo}, {hi}]")
    nearest = 0.0 if lo <= 0.0 <= hi else (lo if lo > 0 else hi)
    alpha = float(model.f2(nearest))
    M = float(max(model.f2(lo), model.f2(hi)))
    S = float(max(abs(model.f1(lo)), abs(model.f1(hi))))
    return IntervalBounds(alpha=alpha, M=M, S=S, lo=lo, hi=hi)


def hull_bounds(model: FluxModel, *arrays):
    """Vectorised ``(alpha, M, S)`` on the convex hull of the given arrays."""
    stacked = np.broadcast_arrays(*[np.asarray(a, dtype=float) for a in arrays])
    lo = np.minimum.reduce(stacked)
    hi = np.maximum.reduce(stacked)
    nearest = np.where(lo > 0, lo, np.where(hi < 0, hi, 0.0))
    alpha = model.f2(nearest)
    M = np.maximum(model.f2(lo), model.f2(hi))
    S = np.maximum(np.abs(model.f1(lo)), np.abs(model.f1(hi)))
    return alpha, M, S
