"""Adaptive Simpson quadrature.

Intervals are bisected recursively and the absolute tolerance is halved at
each subdivision. The recursion is processed one level at a time so that a
vectorised integrand is called once per level with all new abscissae.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ConvergenceError

__all__ = ["QuadConfig", "adaptive_simpson"]

_MIN_DEPTH = 3


@dataclass(frozen=True)
class QuadConfig:
    abs_tol: float = 1e-10
    max_depth: int = 60
    max_evals: int = 400_000

    def __post_init__(self):
        if not self.abs_tol > 0:
            raise ValueError("abs_tol must be > 0")
        if self.max_depth < 10:
            raise ValueError("max_depth must be >= 10")
        if self.max_evals < 100:
            raise ValueError("max_evals must be >= 100")


def adaptive_simpson(f, a, b, abs_tol=1e-10, max_depth=60, max_evals=400_000):
    """Integrate ``f`` over [a, b] to an absolute tolerance.

    ``f`` must accept and return 1-D float arrays. An interval is accepted once
    ``|S_left + S_right - S_whole| <= 15 * tol`` (after a few forced levels);
    accepted pieces get the usual Richardson correction.

    Raises ConvergenceError when an interval would go deeper than
    ``max_depth``, when intervals shrink below floating-point resolution, or
    when more than ``max_evals`` integrand values have been requested.
    """
    a, b = float(a), float(b)
    if a == b:
        return 0.0
    if a > b:
        return -adaptive_simpson(f, b, a, abs_tol, max_depth, max_evals)
    fa, fm, fb = np.asarray(f(np.array([a, 0.5 * (a + b), b])), dtype=float)
    lo = np.array([a])
    hi = np.array([b])
    f_lo, f_mid, f_hi = np.array([fa]), np.array([fm]), np.array([fb])
    whole = (hi - lo) / 6 * (f_lo + 4 * f_mid + f_hi)
    tol = np.array([abs_tol])
    pieces = []
    evals = 3

    for depth in range(max_depth + 1):
        mid = 0.5 * (lo + hi)
        if np.any((mid <= lo) | (mid >= hi)):
            raise ConvergenceError(f"interval width reached machine resolution at depth {depth}")
        lm = 0.5 * (lo + mid)
        rm = 0.5 * (mid + hi)
        k = lo.size
        evals += 2 * k
        if evals > max_evals:
            raise ConvergenceError(f"evaluation budget of {max_evals} exhausted at depth {depth}")
        vals = np.asarray(f(np.concatenate([lm, rm])), dtype=float)
        f_lm, f_rm = vals[:k], vals[k:]
        left = (mid - lo) / 6 * (f_lo + 4 * f_lm + f_mid)
        right = (hi - mid) / 6 * (f_mid + 4 * f_rm + f_hi)
        err = left + right - whole
        done = np.abs(err) <= 15 * tol if depth >= _MIN_DEPTH else np.zeros(k, dtype=bool)
        if np.any(done):
            pieces.extend((left + right + err / 15)[done].tolist())
        todo = ~done
        if not np.any(todo):
            return math.fsum(pieces)
        if depth == max_depth:
            break
        lo, mid, hi = lo[todo], mid[todo], hi[todo]
        f_lo, f_lm, f_mid, f_rm, f_hi = f_lo[todo], f_lm[todo], f_mid[todo], f_rm[todo], f_hi[todo]
        half = tol[todo] / 2
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
        f_lo, f_mid, f_hi = (
            np.concatenate([f_lo, f_mid]),
            np.concatenate([f_lm, f_rm]),
            np.concatenate([f_mid, f_hi]),
        )
        whole = np.concatenate([left[todo], right[todo]])
        tol = np.concatenate([half, half])

    raise ConvergenceError(f"max_depth={max_depth} exhausted before reaching abs_tol={abs_tol:g}")
