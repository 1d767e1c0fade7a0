"""Vectorised adaptive Simpson quadrature.

Used only as an independent oracle against the closed forms.
"""

from __future__ import annotations

import numpy as np

_EPS = np.finfo(float).eps


class OracleFailure(RuntimeError):
    """Adaptive quadrature did not reach the requested tolerance."""


def adaptive_simpson(func, a, b, tol=1e-11, max_depth=40):
    """Integrate ``func`` over many intervals ``[a_i, b_i]`` at once.

    ``func(t, owner)`` must evaluate the integrand of interval ``owner[k]``
    at ``t[k]``; this lets every integral carry its own parameters.
    Returns ``(values, converged)``. Reversed intervals give negated values.
    """
    a = np.atleast_1d(np.asarray(a, dtype=float))
    b = np.atleast_1d(np.asarray(b, dtype=float))
    a, b = np.broadcast_arrays(a, b)
    n = a.size
    result = np.zeros(n)
    converged = np.ones(n, dtype=bool)

    owner = np.arange(n)
    lo, hi = a.ravel().copy(), b.ravel().copy()
    m = 0.5 * (lo + hi)
    flo, fm, fhi = func(lo, owner), func(m, owner), func(hi, owner)
    whole = (hi - lo) / 6.0 * (flo + 4.0 * fm + fhi)
    tols = np.full(n, float(tol))
    depth = 0

    while owner.size:
        lm = 0.5 * (lo + m)
        rm = 0.5 * (m + hi)
        flm = func(lm, owner)
        frm = func(rm, owner)
        left = (m - lo) / 6.0 * (flo + 4.0 * flm + fm)
        right = (hi - m) / 6.0 * (fm + 4.0 * frm + fhi)
        err = left + right - whole
        floor = 64.0 * _EPS * (np.abs(left) + np.abs(right))
        done = (np.abs(err) <= np.maximum(15.0 * tols, floor)) | (depth >= max_depth)
        if depth >= max_depth:
            bad = np.abs(err[done]) > np.maximum(15.0 * tols[done], floor[done])
            converged[owner[done][bad]] = False
        np.add.at(result, owner[done], left[done] + right[done] + err[done] / 15.0)

        keep = ~done
        if not keep.any():
            break
        owner = np.concatenate([owner[keep], owner[keep]])
        new_lo = np.concatenate([lo[keep], m[keep]])
        new_hi = np.concatenate([m[keep], hi[keep]])
        new_m = np.concatenate([lm[keep], rm[keep]])
        flo = np.concatenate([flo[keep], fm[keep]])
        fhi = np.concatenate([fm[keep], fhi[keep]])
        fm = np.concatenate([flm[keep], frm[keep]])
        whole = np.concatenate([left[keep], right[keep]])
        tols = np.concatenate([tols[keep], tols[keep]]) * 0.5
        lo, hi, m = new_lo, new_hi, new_m
        depth += 1

    return result.reshape(a.shape), converged.reshape(a.shape)


def integrate(fn, a: float, b: float, tol: float = 1e-11) -> float:
    """Scalar convenience wrapper; raises :class:`OracleFailure`."""
    val, ok = adaptive_simpson(lambda t, _owner: fn(t), a, b, tol=tol)
    if not ok.all():
        raise OracleFailure(f"adaptive Simpson did not converge on [{a}, {b}]")
    return float(val[0])
