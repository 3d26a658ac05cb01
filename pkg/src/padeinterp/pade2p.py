"""Two-point Padé approximants.

A single rational function R(x) = P(x)/Q(x) is fitted so that its Taylor
expansion about x = 0 reproduces ``c_0 + c_1 x + ... + c_K x^K`` and its
expansion about x = infinity reproduces ``e_0 x + e_1 + e_2 / x + ... +
e_K x^(1-K)``.  With deg P = K + 1 and a monic Q of degree K this gives
2K + 2 unknowns and 2K + 2 linear matching conditions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .polyrat import Polynomial, RationalFn, real_roots_with_multiplicity

# Matching systems with a larger condition number are reported as singular.
MAX_CONDITION = 1e13


class SingularSystemError(np.linalg.LinAlgError):
    def __init__(self, message: str, condition_number: float):
        super().__init__(message)
        self.condition_number = condition_number


class PoleAtOriginError(ZeroDivisionError):
    pass


@dataclass(frozen=True)
class PowerSeries:
    """Taylor coefficients ``c_0..c_K`` about x = 0."""

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Sequence[float]):
        c = tuple(float(v) for v in coeffs)
        if not c:
            raise ValueError("a power series needs at least c_0")
        if not all(math.isfinite(v) for v in c):
            raise ValueError(f"non-finite series coefficients: {c}")
        object.__setattr__(self, "coeffs", c)

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        return sum(c * x**k for k, c in enumerate(self.coeffs))


@dataclass(frozen=True)
class AsymptoticSeries:
    """Descending-power coefficients: ``sum_k e_k x**(leading_power - k)``."""

    coeffs: tuple[float, ...]
    leading_power: int = 1

    def __init__(self, coeffs: Sequence[float], leading_power: int = 1):
        c = tuple(float(v) for v in coeffs)
        if not c:
            raise ValueError("an asymptotic series needs at least e_0")
        if not all(math.isfinite(v) for v in c):
            raise ValueError(f"non-finite series coefficients: {c}")
        if c[0] == 0.0:
            raise ValueError("leading asymptotic coefficient e_0 must be nonzero")
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "leading_power", int(leading_power))

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x: float) -> float:
        p = self.leading_power
        return sum(e * x ** (p - k) for k, e in enumerate(self.coeffs))


@dataclass(frozen=True)
class RationalInterpolant:
    rat: RationalFn
    order: int
    condition_number: float

    @property
    def num(self) -> Polynomial:
        return self.rat.num

    @property
    def den(self) -> Polynomial:
        return self.rat.den

    def __call__(self, x: float) -> float:
        return self.rat(x)


@dataclass(frozen=True)
class Pole:
    location: float
    multiplicity: int
    residue_sign: int  # sign of num/den' at the pole, 0 for multiple poles
    residue: float = math.nan  # nan for multiple poles
    zero_distance: float = math.inf  # to the nearest (complex) numerator zero

    def shift_at(self, x: float) -> float:
        """Size of this pole's term residue/(x - location) at ``x``."""
        if self.multiplicity != 1:
            return math.inf
        return abs(self.residue) / abs(x - self.location) if x != self.location else math.inf


def matching_system(small: PowerSeries, large: AsymptoticSeries) -> tuple[np.ndarray, np.ndarray]:
    """Assemble the (2K+2)-square linear system for the two-point Padé.

    Unknowns are ordered ``p_0..p_{K+1}, q_0..q_{K-1}``; ``q_K = 1``.
    """
    K = small.order
    c, e = small.coeffs, large.coeffs
    n = 2 * K + 2
    A = np.zeros((n, n))
    b = np.zeros(n)

    def add_den_term(row: int, j: int, coef: float) -> None:
        if j == K:
            b[row] -= coef
        else:
            A[row, K + 2 + j] += coef

    row = 0
    # x^k, k = 0..K, of P - c(x) Q
    for k in range(K + 1):
        A[row, k] = 1.0
        for j in range(min(k, K) + 1):
            add_den_term(row, j, -c[k - j])
        row += 1
    # x^k, k = K+1..1, of P - e(x) Q with e(x) = sum_i e_i x^(1-i)
    for k in range(K + 1, 0, -1):
        A[row, k] = 1.0
        for j in range(K + 1):
            i = 1 + j - k
            if 0 <= i <= K:
                add_den_term(row, j, -e[i])
        row += 1
    return A, b


def build_two_point_pade(small: PowerSeries, large: AsymptoticSeries) -> RationalInterpolant:
    """Rational function matching ``small`` at x -> 0 and ``large`` at x -> infinity."""
    if large.leading_power != 1:
        raise NotImplementedError(
            f"only leading_power = 1 is supported, got {large.leading_power}"
        )
    if small.order != large.order:
        raise ValueError(
            f"series orders differ: small K={small.order}, large K={large.order}"
        )
    K = small.order
    A, b = matching_system(small, large)
    cond = float(np.linalg.cond(A))
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise SingularSystemError(
            f"two-point Padé matching system is singular (cond={cond:.3g})", cond
        )
    sol = np.linalg.solve(A, b)
    num = Polynomial(sol[: K + 2])
    den = Polynomial(list(sol[K + 2:]) + [1.0])
    return RationalInterpolant(RationalFn(num, den), K, cond)


def _series_quotient(num: Sequence[float], den: Sequence[float], K: int) -> list[float]:
    # coefficients t_k of num(y)/den(y) about y = 0
    out = []
    for k in range(K + 1):
        acc = num[k] if k < len(num) else 0.0
        for j in range(1, min(k, len(den) - 1) + 1):
            acc -= den[j] * out[k - j]
        out.append(acc / den[0])
    return out


def expand_small(r: RationalInterpolant | RationalFn, K: int) -> PowerSeries:
    rat = r.rat if isinstance(r, RationalInterpolant) else r
    q = rat.den.coeffs
    if q[0] == 0.0:
        raise PoleAtOriginError("denominator vanishes at x = 0")
    return PowerSeries(_series_quotient(rat.num.coeffs, q, K))


def expand_large(r: RationalInterpolant | RationalFn, K: int) -> AsymptoticSeries:
    rat = r.rat if isinstance(r, RationalInterpolant) else r
    # in y = 1/x: P(x) = x^dp * Prev(y), Q(x) = x^dq * Qrev(y)
    prev = rat.num.coeffs[::-1]
    qrev = rat.den.coeffs[::-1]
    return AsymptoticSeries(_series_quotient(prev, qrev, K), rat.asymptotic_power)


def pole_report(r: RationalInterpolant | RationalFn, lo: float, hi: float) -> list[Pole]:
    """Real zeros of the denominator in ``(lo, hi]``.

    Each pole carries its residue and the distance to the nearest numerator
    zero, so callers can tell a near-cancelling pole/zero pair (a Froissart
    doublet) from a pole that actually shapes the function.
    """
    rat = r.rat if isinstance(r, RationalInterpolant) else r
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    dq = rat.den.derivative()
    zeros = np.roots(rat.num.coeffs[::-1]) if rat.num.degree > 0 else np.array([])
    poles = []
    for x, mult in real_roots_with_multiplicity(rat.den, lo, hi):
        if mult == 1:
            res = rat.num(x) / dq(x)
            sign = int(np.sign(res))
        else:
            res, sign = math.nan, 0
        dist = float(np.min(np.abs(zeros - x))) if zeros.size else math.inf
        poles.append(Pole(x, mult, sign, float(res), dist))
    return poles


def read_series(text: str) -> tuple[PowerSeries, AsymptoticSeries]:
    """Parse the two-line exchange format.

    ::

        small: c0 c1 ... cK
        large: p e0 e1 ... eK
    """
    small = large = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, rest = line.partition(":")
        if not sep:
            raise ValueError(f"line {lineno}: expected 'small:' or 'large:'")
        try:
            vals = [float(t) for t in rest.split()]
        except ValueError as exc:
            raise ValueError(f"line {lineno}: {exc}") from None
        key = key.strip().lower()
        if key == "small":
            small = PowerSeries(vals)
        elif key == "large":
            if len(vals) < 2 or vals[0] != int(vals[0]):
                raise ValueError(f"line {lineno}: 'large:' needs an integer power then e0..eK")
            large = AsymptoticSeries(vals[1:], int(vals[0]))
        else:
            raise ValueError(f"line {lineno}: unknown key {key!r}")
    if small is None or large is None:
        raise ValueError("series file needs both a 'small:' and a 'large:' line")
    return small, large


def write_series(small: PowerSeries, large: AsymptoticSeries) -> str:
    s = " ".join(repr(c) for c in small.coeffs)
    l = " ".join(repr(e) for e in large.coeffs)
    return f"small: {s}\nlarge: {large.leading_power} {l}\n"
