"""S-wave radial bound states of  -c u'' + (-a/r + b r) u = E u,  u(0) = 0.

Units are whatever the caller uses consistently; the quarkonium layer works
in GeV with hbar = c = 1.  Levels are found by Numerov outward shooting,
bracketed by node counting and polished by Brent's method on u(r_max).  The
returned wavefunction is the matching eigenvector of the discrete Numerov
pencil, obtained with one step of inverse iteration, so its tail is clean
even deep in the classically forbidden region.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Literal, TextIO

import numpy as np
from scipy.linalg import solve_banded
from scipy.optimize import brentq
from scipy.special import ai_zeros

DEFAULT_POINTS = 20_000
TURNING_POINT_FACTOR = 2.5
NATURAL_LENGTH_FLOOR = 30.0
# a solved level is rejected when r_max < MIN_TURNING_MARGIN * outer turning point
MIN_TURNING_MARGIN = 2.0
ENERGY_RTOL = 1e-13


class GridTooSmallError(ValueError):
    pass


class NoBracketError(RuntimeError):
    pass


@dataclass(frozen=True)
class RadialProblem:
    """-kinetic * d^2/dr^2 - coulomb / r + linear * r."""

    kinetic: float
    coulomb: float = 0.0
    linear: float = 0.0

    def __post_init__(self):
        if not self.kinetic > 0:
            raise ValueError(f"kinetic coefficient must be positive, got {self.kinetic}")
        if self.coulomb < 0 or self.linear < 0:
            raise ValueError("coulomb and linear strengths must be non-negative")
        if self.coulomb == 0 and self.linear == 0:
            raise ValueError("no binding potential: coulomb and linear both zero")

    def potential(self, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            v = self.linear * r - np.where(r > 0, self.coulomb / np.where(r > 0, r, 1.0), np.inf)
        return v

    def bohr_radius(self) -> float:
        return 2 * self.kinetic / self.coulomb if self.coulomb > 0 else math.inf

    def linear_length(self) -> float:
        return (self.kinetic / self.linear) ** (1 / 3) if self.linear > 0 else math.inf

    def natural_length(self, n: int = 1) -> float:
        """Decay length of level n: n a_B for Coulomb, the linear length otherwise.

        With both terms present the shorter one wins, since adding a binding
        term can only pull the state in.
        """
        lengths = (n * self.bohr_radius(), self.linear_length())
        return min(l for l in lengths if math.isfinite(l))

    def energy_upper_bound(self, n: int) -> float:
        """A value no lower than the n-th level (the level of the potential with a = 0)."""
        if self.linear > 0:
            return (self.kinetic * self.linear**2) ** (1 / 3) * airy_zero(n)
        return coulomb_level(self.kinetic, self.coulomb, n)

    def energy_lower_bound(self) -> float:
        if self.coulomb > 0:
            return -self.coulomb**2 / (4 * self.kinetic)
        return 0.0

    def outer_turning_point(self, energy: float) -> float:
        a, b = self.coulomb, self.linear
        if b == 0:
            return a / -energy if energy < 0 else math.inf
        return (energy + math.sqrt(energy * energy + 4 * a * b)) / (2 * b)


@dataclass(frozen=True)
class Grid:
    r_max: float
    n_points: int = DEFAULT_POINTS

    def __post_init__(self):
        if not self.r_max > 0:
            raise ValueError(f"r_max must be positive, got {self.r_max}")
        if self.n_points < 1000:
            raise ValueError(f"need at least 1000 grid points, got {self.n_points}")

    @property
    def h(self) -> float:
        return self.r_max / self.n_points

    @property
    def r(self) -> np.ndarray:
        return self.h * np.arange(self.n_points + 1)

    @classmethod
    def default(cls, problem: RadialProblem, n: int, n_points: int = DEFAULT_POINTS) -> Grid:
        r_turn = problem.outer_turning_point(problem.energy_upper_bound(n))
        r_max = max(TURNING_POINT_FACTOR * r_turn, NATURAL_LENGTH_FLOOR * problem.natural_length(n))
        return cls(r_max, n_points)


@dataclass(frozen=True)
class RadialState:
    problem: RadialProblem
    grid: Grid
    u: np.ndarray = field(repr=False)
    energy: float
    nodes: int
    cusp: bool = False

    @property
    def r(self) -> np.ndarray:
        return self.grid.r

    def inner(self, f: np.ndarray, g: np.ndarray | None = None) -> float:
        g = self.u if g is None else g
        return float(self.grid.h * np.dot(f, g))


def airy_zero(n: int) -> float:
    """|a_n|, the magnitude of the n-th zero of Ai."""
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    return float(-ai_zeros(n)[0][-1])


def coulomb_level(kinetic: float, coulomb: float, n: int) -> float:
    return -coulomb**2 / (4 * kinetic * n * n)


def coulomb_energy_closed_form(m_eff: float, alpha: float, n: int) -> float:
    """-m alpha^2 / (2 n^2), the n-th S level of -(1/2m) d^2/dr^2 - alpha/r."""
    if m_eff <= 0 or alpha <= 0 or n < 1:
        raise ValueError("need m_eff > 0, alpha > 0, n >= 1")
    return -m_eff * alpha**2 / (2 * n * n)


def linear_energy_airy(m_eff: float, lam: float, n: int) -> float:
    """(lam^2 / 2m)^(1/3) |a_n|, the n-th S level of -(1/2m) d^2/dr^2 + lam r."""
    if m_eff <= 0 or lam <= 0:
        raise ValueError("need m_eff > 0 and lam > 0")
    return (lam * lam / (2 * m_eff)) ** (1 / 3) * airy_zero(n)


# ---------------------------------------------------------------------------
# Numerov machinery


def _cusp_term(problem: RadialProblem, h: float) -> float:
    # w_0 u_0 replaced by its r -> 0 limit, expressed as a multiple of u_1
    a, c = problem.coulomb, problem.kinetic
    if a == 0:
        return 0.0
    return h * a / (12 * c) / (1 - a * h / (2 * c))


def _numerov_weights(problem: RadialProblem, grid: Grid, energy: float) -> np.ndarray:
    r = grid.r
    v = np.empty_like(r)
    v[1:] = problem.potential(r[1:])
    v[0] = 0.0
    return 1.0 - grid.h**2 * (v - energy) / (12 * problem.kinetic)


def shoot(problem: RadialProblem, grid: Grid, energy: float, cusp: bool = False) -> tuple[int, float]:
    """Outward Numerov at fixed energy: (sign changes on u_1..u_N, scaled u_N)."""
    w = _numerov_weights(problem, grid, energy).tolist()
    n = grid.n_points
    u_prev, u = 0.0, grid.h
    wu_prev = _cusp_term(problem, grid.h) * u if cusp else 0.0
    changes = 0
    for i in range(1, n):
        u_next = ((12.0 - 10.0 * w[i]) * u - wu_prev) / w[i + 1]
        if (u_next < 0) != (u < 0) and u_next != 0.0:
            changes += 1
        wu_prev = w[i] * u
        u_prev, u = u, u_next
        if abs(u) > 1e200:
            scale = 1e-200
            u *= scale
            wu_prev *= scale
    return changes, u


def _banded_operator(problem: RadialProblem, grid: Grid, energy: float, cusp: bool) -> np.ndarray:
    """(A - E B) on interior points 1..N-1 in solve_banded (1, 1) layout.

    A u = -c D2 u + B (V u) and B = tridiag(1, 10, 1)/12 is the Numerov mass matrix.
    """
    h, c = grid.h, problem.kinetic
    r = grid.r[1:-1]
    ve = problem.potential(r) - energy
    ab = np.zeros((3, r.size))
    ab[0, 1:] = -c / h**2 + ve[1:] / 12
    ab[1] = 2 * c / h**2 + 10 * ve / 12
    ab[2, :-1] = -c / h**2 + ve[:-1] / 12
    if cusp:
        ab[1, 0] -= c / h**2 * _cusp_term(problem, h)
    return ab


def mass_apply(f: np.ndarray) -> np.ndarray:
    """B f for interior vectors (zero Dirichlet values outside)."""
    out = 10.0 * f
    out[1:] += f[:-1]
    out[:-1] += f[1:]
    return out / 12.0


def _eigenvector(problem, grid, energy, cusp, guess) -> np.ndarray:
    ab = _banded_operator(problem, grid, energy, cusp)
    x = guess[1:-1]
    for _ in range(2):
        x = solve_banded((1, 1), ab, mass_apply(x))
        x /= np.max(np.abs(x))
    u = np.zeros(grid.n_points + 1)
    u[1:-1] = x
    if u[1] < 0:
        u = -u
    return u / math.sqrt(grid.h * np.dot(u, u))


def _initial_guess(problem, grid, energy) -> np.ndarray:
    # WKB-flavoured envelope: ones inside the turning point, decaying outside
    r = grid.r
    rt = problem.outer_turning_point(energy)
    g = np.where(r < rt, 1.0, np.exp(-(r - rt) / problem.natural_length()))
    g[0] = g[-1] = 0.0
    return g


def solve_bound_state(
    problem: RadialProblem,
    n: int,
    grid: Grid | None = None,
    cusp: bool = True,
) -> RadialState:
    """The n-th S level (n - 1 interior nodes) and its unit-normalized u(r).

    ``cusp`` replaces the undefined product w_0 u_0 at r = 0 by its Coulomb
    limit; with ``cusp=False`` it is taken as zero, which is what the
    perturbation module needs for a symmetric discrete Hamiltonian.
    """
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    grid = grid or Grid.default(problem, n)

    def count(e):
        return shoot(problem, grid, e, cusp)[0]

    span = max(abs(problem.energy_upper_bound(n)), abs(problem.energy_lower_bound()), 1e-300)
    lo = problem.energy_lower_bound() - 0.5 * span
    hi = max(problem.energy_upper_bound(n), 0.0) + 0.1 * span
    for _ in range(60):
        if count(lo) <= n - 1:
            break
        lo -= span
        span *= 2
    else:
        raise NoBracketError(f"could not find an energy below level {n}")
    for _ in range(60):
        if count(hi) >= n:
            break
        hi += span
        span *= 2
    else:
        raise NoBracketError(f"could not find an energy above level {n}")

    # bisection on the node count until the bracket holds level n alone
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        c = count(mid)
        if c >= n:
            hi = mid
        else:
            lo = mid
        if count(hi) == n and count(lo) == n - 1:
            flo, fhi = shoot(problem, grid, lo, cusp)[1], shoot(problem, grid, hi, cusp)[1]
            if flo != 0 and fhi != 0 and (flo < 0) != (fhi < 0):
                break
        if hi - lo <= ENERGY_RTOL * max(abs(lo), abs(hi)):
            break
    else:
        raise NoBracketError(f"bisection did not isolate level {n}")

    f = lambda e: shoot(problem, grid, e, cusp)[1]
    if f(lo) == 0.0:
        energy = lo
    elif f(hi) == 0.0 or (f(lo) < 0) == (f(hi) < 0):
        energy = 0.5 * (lo + hi)
    else:
        energy = brentq(f, lo, hi, xtol=1e-300, rtol=4 * np.finfo(float).eps, maxiter=200)

    r_turn = problem.outer_turning_point(energy)
    if grid.r_max < MIN_TURNING_MARGIN * r_turn:
        raise GridTooSmallError(
            f"r_max={grid.r_max:.4g} is below {MIN_TURNING_MARGIN} x turning point {r_turn:.4g}"
        )

    u = _eigenvector(problem, grid, energy, cusp, _initial_guess(problem, grid, energy))
    nodes = int(np.count_nonzero(np.diff(np.sign(u[1:-1])[np.abs(u[1:-1]) > 0]) != 0))
    if nodes != n - 1:
        raise NoBracketError(f"level {n} came back with {nodes} nodes")
    return RadialState(problem, grid, u, float(energy), nodes, cusp)


def expectation(
    state: RadialState, observable: Literal["r", "inverse_r", "kinetic", "kinetic_half"]
) -> float:
    """Trapezoid-rule expectation value in a normalized state.

    ``kinetic`` is the expectation of the state's own kinetic operator,
    obtained as E - <V> so that no derivative of u is taken.  In the split
    quarkonium Hamiltonians that operator is half of the full kinetic term,
    hence the alias ``kinetic_half``.
    """
    r, u = state.r, state.u
    if observable == "r":
        return state.inner(u * r)
    if observable == "inverse_r":
        # u^2/r has slope u'(0)^2 at the origin: Euler-Maclaurin endpoint term
        h = state.grid.h
        return state.inner(np.divide(u, r, out=np.zeros_like(u), where=r > 0)) + u[1] ** 2 / 12
    if observable in ("kinetic", "kinetic_half"):
        p = state.problem
        v_mean = p.linear * expectation(state, "r") - p.coulomb * expectation(state, "inverse_r")
        return state.energy - v_mean
    raise ValueError(f"unknown observable {observable!r}")


def write_wavefunction(state: RadialState, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["r", "u"])
    for r, u in zip(state.r, state.u):
        w.writerow([repr(float(r)), repr(float(u))])
