"""Convergence acceleration for sequences of partial sums and grid estimates."""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

BREAKDOWN_THRESHOLD = 1e-300


class NumericalBreakdownError(ArithmeticError):
    pass


def _converged(values: Sequence[float], rtol: float = 16 * np.finfo(float).eps) -> bool:
    ref = values[-1]
    scale = max(abs(ref), np.finfo(float).tiny)
    return all(abs(v - ref) <= rtol * scale for v in values)


def wynn_table(terms: Sequence[float]) -> list[list[float]]:
    """Columns eps_{-1}, eps_0, eps_1, ... of Wynn's epsilon table.

    ``table[k + 1][n]`` is eps_k^{(n)}.  Construction stops early once an
    even column has converged to working precision, since the next odd
    column would divide by zero.
    """
    s = [float(t) for t in terms]
    if len(s) < 3:
        raise ValueError("epsilon acceleration needs at least 3 terms")
    if not all(math.isfinite(t) for t in s):
        raise ValueError("non-finite term in sequence")
    table = [[0.0] * (len(s) + 1), s]
    k = 0
    while len(table[-1]) > 1:
        if k % 2 == 0 and _converged(table[-1]):
            break
        prev2, prev = table[-2], table[-1]
        col = []
        for n in range(len(prev) - 1):
            d = prev[n + 1] - prev[n]
            if abs(d) < BREAKDOWN_THRESHOLD:
                raise NumericalBreakdownError(
                    f"epsilon table breakdown at column {k + 1}, row {n}"
                )
            col.append(prev2[n + 1] + 1.0 / d)
        table.append(col)
        k += 1
    return table


def wynn_epsilon(terms: Sequence[float]) -> float:
    """Limit estimate from the deepest even column of the epsilon table."""
    table = wynn_table(terms)
    even = [col for k, col in enumerate(table[1:]) if k % 2 == 0]
    return even[-1][-1]


def shanks(terms: Sequence[float]) -> list[float]:
    """One Shanks transform (second column of the epsilon table)."""
    s = np.asarray(terms, dtype=float)
    num = s[2:] * s[:-2] - s[1:-1] ** 2
    den = s[2:] - 2 * s[1:-1] + s[:-2]
    return list(num / den)


def richardson(
    terms: Sequence[float], steps: Sequence[float], order: int, increment: int = 2
) -> float:
    """Extrapolate ``terms[i] = T(steps[i])`` to zero step.

    The error is modelled as ``a_1 h^order + a_2 h^(order+increment) + ...``
    with as many terms as the data allow; the default increment of 2 fits
    symmetric schemes (trapezoid, Numerov) whose error expansions are even.
    """
    t = np.asarray(terms, dtype=float)
    h = np.asarray(steps, dtype=float)
    if t.shape != h.shape:
        raise ValueError(f"{t.size} terms but {h.size} steps")
    if t.size < 2:
        raise ValueError("need at least two estimates to extrapolate")
    if np.any(np.diff(h) >= 0) or np.any(h <= 0):
        raise ValueError("steps must be positive and strictly decreasing")
    # rescale steps to O(1) to keep the Vandermonde system tame
    hs = h / h[0]
    powers = order + increment * np.arange(t.size - 1)
    A = np.column_stack([np.ones_like(hs)] + [hs**p for p in powers])
    return float(np.linalg.solve(A, t)[0])
