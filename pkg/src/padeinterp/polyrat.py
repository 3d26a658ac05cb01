"""Dense real polynomials and rational functions.

Coefficients are stored in ascending power order, ``coeffs[k]`` multiplies
``x**k``.  Everything here is immutable and side-effect free.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

# Coefficients below TRIM_RTOL * max|coeff| at the top end are dropped.
TRIM_RTOL = 1e-14
# |den(x)| below POLE_RTOL * max|den coeff| * max(1, |x|)**deg(den) is a pole.
POLE_RTOL = 1e-12
ROOT_RTOL = 1e-12
# Euclid remainders below this (relative) end a Sturm chain built without a
# known gcd degree.
GCD_RTOL = 1e-8
# Roots closer than this (relative) are one multiple root.
CLUSTER_RTOL = 1e-4


class PoleError(ZeroDivisionError):
    """Raised when a rational function is evaluated on (or next to) a pole."""


def _trim(coeffs: Sequence[float]) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    if not c:
        return (0.0,)
    scale = max(abs(v) for v in c)
    if scale == 0.0:
        return (0.0,)
    while len(c) > 1 and abs(c[-1]) <= TRIM_RTOL * scale:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class Polynomial:
    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float]):
        c = _trim(list(coeffs))
        if not all(math.isfinite(v) for v in c):
            raise ValueError(f"non-finite polynomial coefficients: {c}")
        object.__setattr__(self, "coeffs", c)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def is_zero(self) -> bool:
        return self.coeffs == (0.0,)

    def __call__(self, x):
        return poly_eval(self, x)

    def __len__(self) -> int:
        return len(self.coeffs)

    def __neg__(self) -> Polynomial:
        return Polynomial([-c for c in self.coeffs])

    def __add__(self, other: Polynomial) -> Polynomial:
        n = max(len(self), len(other))
        a = list(self.coeffs) + [0.0] * (n - len(self))
        b = list(other.coeffs) + [0.0] * (n - len(other))
        return Polynomial([x + y for x, y in zip(a, b)])

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            return Polynomial(np.convolve(self.coeffs, other.coeffs))
        return Polynomial([c * float(other) for c in self.coeffs])

    __rmul__ = __mul__

    def __divmod__(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        rem = list(self.coeffs)
        dd = other.degree
        lead = other.coeffs[-1]
        if self.degree < dd:
            return Polynomial([0.0]), self
        quot = [0.0] * (self.degree - dd + 1)
        for k in range(self.degree - dd, -1, -1):
            q = rem[k + dd] / lead
            quot[k] = q
            for j in range(dd + 1):
                rem[k + j] -= q * other.coeffs[j]
        return Polynomial(quot), Polynomial(rem[:dd] or [0.0])

    def derivative(self) -> Polynomial:
        if self.degree == 0:
            return Polynomial([0.0])
        return Polynomial([k * c for k, c in enumerate(self.coeffs) if k > 0])

    def scale(self) -> float:
        return max(abs(c) for c in self.coeffs)

    @classmethod
    def from_roots(cls, roots: Iterable[float], lead: float = 1.0) -> Polynomial:
        p = cls([lead])
        for r in roots:
            p = p * cls([-r, 1.0])
        return p


def poly_eval(p: Polynomial, x):
    """Horner evaluation; ``x`` may be a scalar or a numpy array."""
    acc = 0.0 * x
    for c in reversed(p.coeffs):
        acc = acc * x + c
    return acc


@dataclass(frozen=True)
class RationalFn:
    num: Polynomial
    den: Polynomial

    def __post_init__(self):
        if self.den.is_zero():
            raise ValueError("denominator is the zero polynomial")

    @property
    def asymptotic_power(self) -> int:
        return self.num.degree - self.den.degree

    def __call__(self, x):
        return rational_eval(self, x)


def rational_eval(r: RationalFn, x: float) -> float:
    d = poly_eval(r.den, x)
    tol = POLE_RTOL * r.den.scale() * max(1.0, abs(x)) ** r.den.degree
    if abs(d) < tol:
        raise PoleError(f"denominator vanishes at x={x!r} (|den|={abs(d):.3g})")
    return poly_eval(r.num, x) / d


# ---------------------------------------------------------------------------
# real root isolation


def _normalized(p: Polynomial) -> Polynomial:
    return p * (1.0 / p.scale())


def sturm_sequence(p: Polynomial, gcd_degree: int | None = None) -> list[Polynomial]:
    """Sturm chain p, p', -rem(p, p'), ... with every member scaled to unit max-norm.

    If ``gcd_degree`` is given the chain stops at the member of that degree,
    which is then gcd(p, p').  Otherwise it stops when a remainder drops
    below GCD_RTOL relative to the previous member.
    """
    seq = [_normalized(p)]
    d = p.derivative()
    if d.is_zero():
        return seq
    seq.append(_normalized(d))
    while seq[-1].degree > 0:
        if gcd_degree and seq[-1].degree <= gcd_degree:
            break
        _, rem = divmod(seq[-2], seq[-1])
        if gcd_degree is None and rem.scale() <= GCD_RTOL * seq[-2].scale():
            break
        if rem.is_zero():
            break
        seq.append(_normalized(-rem))
    return seq


def _sign_changes(seq: list[Polynomial], x: float) -> int:
    signs = [v for v in (poly_eval(q, x) for q in seq) if v != 0.0]
    return sum(1 for a, b in zip(signs, signs[1:]) if (a < 0) != (b < 0))


def sturm_count(seq: list[Polynomial], lo: float, hi: float) -> int:
    """Number of distinct real roots of seq[0] in (lo, hi]."""
    return _sign_changes(seq, lo) - _sign_changes(seq, hi)


def _cauchy_bound(p: Polynomial) -> float:
    lead = abs(p.coeffs[-1])
    return 1.0 + max(abs(c) / lead for c in p.coeffs[:-1])


def _bisect_sign(p: Polynomial, a: float, b: float) -> float:
    fa = poly_eval(p, a)
    while b - a > ROOT_RTOL * max(abs(a), abs(b), 1e-300):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        fm = poly_eval(p, m)
        if fm == 0.0:
            return m
        if (fm < 0) == (fa < 0):
            a, fa = m, fm
        else:
            b = m
    return 0.5 * (a + b)


def _bisect_count(seq: list[Polynomial], a: float, b: float) -> float:
    # (a, b] holds exactly one distinct root
    while b - a > ROOT_RTOL * max(abs(a), abs(b), 1e-300):
        m = 0.5 * (a + b)
        if m <= a or m >= b:
            break
        if sturm_count(seq, a, m) >= 1:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def _sturm_isolate(seq, lo, hi, depth=0) -> list[float]:
    n = sturm_count(seq, lo, hi)
    if n == 0:
        return []
    if n == 1 or depth > 200 or hi - lo <= ROOT_RTOL * max(abs(lo), abs(hi)):
        p = seq[0]
        flo, fhi = poly_eval(p, lo), poly_eval(p, hi)
        if flo != 0.0 and fhi != 0.0 and (flo < 0) != (fhi < 0):
            return [_bisect_sign(p, lo, hi)]
        return [_bisect_count(seq, lo, hi)]
    mid = 0.5 * (lo + hi)
    return _sturm_isolate(seq, lo, mid, depth + 1) + _sturm_isolate(seq, mid, hi, depth + 1)


def root_clusters(p: Polynomial) -> list[tuple[complex, int]]:
    """Companion-matrix roots grouped into clusters as (centre, size).

    A root of multiplicity m splits into m roots ~eps^(1/m) apart under
    rounding; roots within CLUSTER_RTOL * max(1, |z|) of each other are
    merged (single linkage).
    """
    z = np.roots(np.asarray(p.coeffs[::-1], dtype=float))
    groups: list[list[complex]] = []
    for r in sorted(z, key=lambda v: (v.real, v.imag)):
        for g in groups:
            if any(abs(r - o) <= CLUSTER_RTOL * max(1.0, abs(o)) for o in g):
                g.append(r)
                break
        else:
            groups.append([r])
    return [(complex(np.mean(g)), len(g)) for g in groups]


def _multiplicity(clusters: list[tuple[complex, int]], x: float) -> int:
    centre, size = min(clusters, key=lambda c: abs(c[0] - x))
    return size if abs(centre - x) <= CLUSTER_RTOL * max(1.0, abs(x)) else 1


def squarefree_part(p: Polynomial, clusters: list[tuple[complex, int]] | None = None) -> Polynomial:
    """p / gcd(p, p'); the gcd degree comes from the root clusters."""
    clusters = root_clusters(p) if clusters is None else clusters
    gcd_degree = p.degree - len(clusters)
    if gcd_degree <= 0:
        return p
    g = sturm_sequence(p, gcd_degree)[-1]
    if g.degree != gcd_degree:
        return p
    quot, _ = divmod(p, g)
    return quot


def real_roots_with_multiplicity(
    p: Polynomial, lo: float, hi: float, n_samples: int | None = None
) -> list[tuple[float, int]]:
    """Real roots of ``p`` in ``(lo, hi]`` as ``(root, multiplicity)`` pairs.

    Roots are isolated on the square-free part, where every root is simple
    and shows up as a sign change.  A root within ~1e-12 of ``hi`` counts as
    ``hi``; one that close to ``lo`` is excluded.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got ({lo}, {hi})")
    if p.is_zero():
        raise ValueError("zero polynomial has no isolated roots")
    if p.degree == 0:
        return []
    bound = _cauchy_bound(p)
    a, b = max(lo, -bound), min(hi, bound)
    if not a < b:
        return []
    slack = ROOT_RTOL * max(1.0, abs(a), abs(b))
    a, b = a - slack, b + slack
    clusters = root_clusters(p)
    q = squarefree_part(p, clusters)
    seq = sturm_sequence(q)
    expected = sturm_count(seq, a, b)
    if expected == 0:
        return []

    # Chebyshev-spaced sampling, then bisection on every sign change
    m = n_samples or 32 * (q.degree + 1)
    t = np.cos(np.pi * np.arange(m, -1, -1) / m)
    xs = 0.5 * (a + b) + 0.5 * (b - a) * t
    xs[0], xs[-1] = a, b
    fs = poly_eval(q, xs)
    roots = []
    for i in range(m):
        f0, f1 = fs[i], fs[i + 1]
        if f0 == 0.0:
            continue
        if f1 == 0.0:
            roots.append(float(xs[i + 1]))
        elif (f0 < 0) != (f1 < 0):
            roots.append(_bisect_sign(q, float(xs[i]), float(xs[i + 1])))
    if len(roots) != expected:
        # clustered roots escaped the sign-change scan
        roots = _sturm_isolate(seq, a, b)
    roots = sorted(float(hi) if abs(r - hi) <= slack else r for r in roots)
    return [(r, _multiplicity(clusters, r)) for r in roots if lo + slack < r <= hi]


def real_roots_in_interval(p: Polynomial, lo: float, hi: float) -> list[float]:
    """Distinct real roots of ``p`` in ``(lo, hi]``, refined to ~1e-12 relative."""
    return [r for r, _ in real_roots_with_multiplicity(p, lo, hi)]
