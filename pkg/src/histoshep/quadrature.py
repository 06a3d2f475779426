"""Gauss-Legendre rules: fixed composite and vectorised adaptive."""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .errors import QuadratureNonConvergence


@lru_cache(maxsize=None)
def gauss_legendre(npts: int) -> tuple[np.ndarray, np.ndarray]:
    """Nodes and weights on ``[-1, 1]``."""
    x, w = np.polynomial.legendre.leggauss(npts)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def panel_points(lo: np.ndarray, hi: np.ndarray, npts: int):
    """Quadrature points (shape ``(P, npts)``) and weights for panels."""
    t, w = gauss_legendre(npts)
    half = 0.5 * (hi - lo)[:, None]
    mid = 0.5 * (hi + lo)[:, None]
    return mid + half * t[None, :], half * w[None, :]


def composite(fvec, breakpoints, npts: int = 16) -> float:
    """Integral of ``fvec`` over ``[breakpoints[0], breakpoints[-1]]`` with one
    ``npts``-point rule per panel."""
    bp = np.asarray(breakpoints, dtype=float)
    pts, wts = panel_points(bp[:-1], bp[1:], npts)
    vals = np.asarray(fvec(pts.ravel()), dtype=float).reshape(pts.shape)
    return float(np.sum(vals * wts))


def panel_integrals(fvec, lo, hi, npts: int = 16) -> np.ndarray:
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    pts, wts = panel_points(lo, hi, npts)
    vals = np.asarray(fvec(pts.ravel()), dtype=float).reshape(pts.shape)
    return np.sum(vals * wts, axis=1)


def adaptive(fvec, lo, hi, owner, n_owners: int, tol: float = 1e-11,
             npts: int = 16, max_rounds: int = 40) -> np.ndarray:
    """Adaptive composite Gauss-Legendre over many panels at once.

    Each panel belongs to an ``owner`` (e.g. a segment); the result is the
    integral per owner.  A panel is accepted once its whole-panel value and
    the sum over its two halves agree to ``tol`` times its share of the
    owner's length (so each owner's total error is about ``tol``); otherwise
    it is bisected.

    Raises
    ------
    QuadratureNonConvergence
        Panels remain after ``max_rounds`` bisections.
    """
    lo = np.asarray(lo, dtype=float)
    hi = np.asarray(hi, dtype=float)
    owner = np.asarray(owner, dtype=int)
    total = np.zeros(n_owners)
    owner_len = np.zeros(n_owners)
    np.add.at(owner_len, owner, hi - lo)
    for _ in range(max_rounds):
        if lo.size == 0:
            return total
        mid = 0.5 * (lo + hi)
        vals = panel_integrals(fvec, np.concatenate([lo, lo, mid]), np.concatenate([hi, mid, hi]), npts)
        P = lo.size
        whole, halves = vals[:P], vals[P:2 * P] + vals[2 * P:]
        share = (hi - lo) / owner_len[owner]
        ok = np.abs(whole - halves) <= tol * share
        np.add.at(total, owner[ok], halves[ok])
        bad = ~ok
        lo, hi, owner = (np.concatenate([lo[bad], mid[bad]]), np.concatenate([mid[bad], hi[bad]]),
                         np.concatenate([owner[bad], owner[bad]]))
    raise QuadratureNonConvergence(f"{lo.size} panels failed to converge to tol={tol:g}")
