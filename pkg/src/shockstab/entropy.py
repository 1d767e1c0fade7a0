r"""
Relative entropy calculus for the quadratic entropy
---------------------------------------------------

With :math:`\eta(u) = u^2/2` and the flux's entropy flux :math:`q`:

* :func:`rel_entropy` and :func:`rel_flux` form the relative pair
  :math:`\eta(x|a)`, :math:`q(x;a)`;
* :func:`jump_entropy_cost` is the entropy produced per unit time by a
  jump :math:`(u_-, u_+)` moving at its Rankine-Hugoniot speed;
* :func:`dissipation_rate` is the boundary term :math:`D` driving the
  relative entropy to a shifted shock :math:`(u_\ell, u_r)`;
* :func:`dbound_rhs` is the upper bound on :math:`D` in terms of the
  positive part of the entropy cost.

Every function here is vectorised: jumps and shocks may be pairs of arrays.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from shockstab.flux import FluxModel, IntervalBounds, hull_bounds, shock_speed
from shockstab.quadrature import OracleFailure, adaptive_simpson

DEFAULT_C1 = 33.0
DEFAULT_C2 = 1.0 / 24.0


def _out(x):
    return float(x) if np.ndim(x) == 0 else x


class JumpPair(NamedTuple):
    """Left and right traces ``(u_minus, u_plus)`` of a jump.

    ``u_minus < u_plus`` encodes a non-entropic jump.
    """

    u_minus: float
    u_plus: float

    @property
    def delta(self):
        return self.u_plus - self.u_minus


@dataclass(frozen=True)
class ShockDatum:
    """Entropic reference shock ``u_ell 1_{x<0} + u_r 1_{x>0}``."""

    u_ell: float
    u_r: float

    def __post_init__(self):
        if not self.u_ell > self.u_r:
            raise ValueError(f"reference shock needs u_ell > u_r, got ({self.u_ell}, {self.u_r})")

    def __iter__(self):
        return iter((self.u_ell, self.u_r))

    def speed(self, model: FluxModel) -> float:
        return shock_speed(model, self.u_ell, self.u_r)

    def state(self, x):
        """Value of the initial shock profile at ``x`` (``u_r`` at ``x = 0``)."""
        return np.where(np.asarray(x) < 0, self.u_ell, self.u_r)


def rel_entropy(x, a):
    x = np.asarray(x, dtype=float)
    return _out(0.5 * (x - a) ** 2)


def rel_flux(model: FluxModel, x, a):
    """``q(x; a) = q(x) - q(a) - a (f(x) - f(a))``."""
    x = np.asarray(x, dtype=float)
    a = np.asarray(a, dtype=float)
    return _out(model.q(x) - model.q(a) - a * (model.f(x) - model.f(a)))


def jump_entropy_cost(model: FluxModel, j):
    um, up = (np.asarray(v, dtype=float) for v in j)
    sigma = shock_speed(model, um, up)
    return _out(model.q(up) - model.q(um) - sigma * 0.5 * (up * up - um * um))


def dissipation_rate(model: FluxModel, j, s):
    um, up = (np.asarray(v, dtype=float) for v in j)
    ul, ur = (np.asarray(v, dtype=float) for v in s)
    sigma = shock_speed(model, um, up)
    return _out(
        rel_flux(model, up, ur)
        - rel_flux(model, um, ul)
        - sigma * (rel_entropy(up, ur) - rel_entropy(um, ul))
    )


def _g_integrals(model, um, up, ul, ur, tol):
    um, up, ul, ur = np.broadcast_arrays(*(np.atleast_1d(np.asarray(v, dtype=float))
                                           for v in (um, up, ul, ur)))
    sigma = np.atleast_1d(shock_speed(model, um, up))
    offset = np.atleast_1d(model.f(up)) - sigma * up

    def g(t, owner):
        own = owner % um.size
        return model.f(t) - sigma[own] * t - offset[own]

    a = np.concatenate([ur.ravel(), ul.ravel()])
    b = np.concatenate([up.ravel(), um.ravel()])
    vals, ok = adaptive_simpson(g, a, b, tol=tol)
    n = um.size
    D = -vals[:n] + vals[n:]
    return D.reshape(um.shape), (ok[:n] & ok[n:]).reshape(um.shape)


def dissipation_rate_g_oracle(model: FluxModel, j, s, tol: float = 1e-11):
    """``D = -int_{u_r}^{u_+} g + int_{u_ell}^{u_-} g`` by adaptive Simpson.

    ``g(t) = f(t) - sigma t - (f(u_+) - sigma u_+)`` with ``sigma`` the speed
    of the jump. Raises :class:`OracleFailure` if quadrature does not converge.
    """
    um, up = j
    ul, ur = s
    scalar = all(np.ndim(v) == 0 for v in (um, up, ul, ur))
    D, ok = _g_integrals(model, um, up, ul, ur, tol)
    if not ok.all():
        raise OracleFailure(f"g-integral oracle did not converge on {int((~ok).sum())} input(s)")
    return float(D[0]) if scalar else D


def dissipation_rate_g_oracle_masked(model: FluxModel, j, s, tol: float = 1e-11):
    """Array form of the oracle returning ``(D, converged)`` without raising."""
    um, up = j
    ul, ur = s
    return _g_integrals(model, um, up, ul, ur, tol)


def diagonal_dissipation(model: FluxModel, u, s):
    """``D(u, u; u_ell, u_r)``."""
    return dissipation_rate(model, (u, u), s)


def split_terms(model: FluxModel, j, s):
    """``(E, F_minus, F_plus, D(u_-,u_-), D(u_+,u_+))``.

    The cross terms use the factorised closed forms
    ``F_pm = (u_ell - u_r)(u_ell + u_r - 2 u_pm)(sigma - f'(u_pm)) / 2``
    so that ``E + F_pm + D(u_pm, u_pm) = D`` is a genuine identity check.
    """
    um, up = (np.asarray(v, dtype=float) for v in j)
    ul, ur = (np.asarray(v, dtype=float) for v in s)
    E = jump_entropy_cost(model, (um, up))
    width = ul - ur
    F_minus = 0.5 * width * (ul + ur - 2.0 * um) * model.secant_excess(um, up)
    F_plus = 0.5 * width * (ul + ur - 2.0 * up) * model.secant_excess(up, um)
    return (
        E,
        _out(F_minus),
        _out(F_plus),
        diagonal_dissipation(model, um, (ul, ur)),
        diagonal_dissipation(model, up, (ul, ur)),
    )


dissipation_split_terms = split_terms


def drift_penalty(j, s):
    """``(u_ell - u_r) [(u_ell - u_-)^2 + (u_r - u_+)^2]``."""
    um, up = (np.asarray(v, dtype=float) for v in j)
    ul, ur = (np.asarray(v, dtype=float) for v in s)
    return _out((ul - ur) * ((ul - um) ** 2 + (ur - up) ** 2))


def dbound_rhs(model: FluxModel, j, s, bounds, constants=(DEFAULT_C1, DEFAULT_C2)):
    """``C1 (M/alpha)^3 max(E, 0) - C2 alpha (u_ell - u_r)[(u_ell-u_-)^2 + (u_r-u_+)^2]``.

    ``bounds`` is an :class:`IntervalBounds` on the hull of the four states
    or an ``(alpha, M)`` pair of arrays.
    """
    C1, C2 = constants
    if isinstance(bounds, IntervalBounds):
        alpha, M = bounds.alpha, bounds.M
    else:
        alpha, M = bounds[0], bounds[1]
    E = jump_entropy_cost(model, j)
    return _out(C1 * (M / alpha) ** 3 * np.maximum(E, 0.0) - C2 * alpha * drift_penalty(j, s))


def quadruple_bounds(model: FluxModel, j, s):
    """Exact ``(alpha, M, S)`` on the hull of ``{u_-, u_+, u_ell, u_r}``."""
    alpha, M, S = hull_bounds(model, *j, *s)
    return _out(alpha), _out(M), _out(S)


def burgers_dissipation_closed_form(j, s):
    """``D_0`` for Burgers via ``-D_0 = (u_- - u_+)(H^2 + K^2)/4 + (H^3 - K^3)/6``.

    ``H = u_ell - u_-`` and ``K = u_r - u_+``. Valid for every ordering.
    """
    um, up = (np.asarray(v, dtype=float) for v in j)
    ul, ur = (np.asarray(v, dtype=float) for v in s)
    H = ul - um
    K = ur - up
    return _out(-(0.25 * (um - up) * (H * H + K * K) + (H ** 3 - K ** 3) / 6.0))
