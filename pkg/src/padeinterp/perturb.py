"""Perturbation coefficients of E_n(beta) for H(beta) = H_C + beta H_L.

H_C = -(1/2m) d^2/dr^2 - alpha/r and H_L = -(1/2m) d^2/dr^2 + lam r each
carry half of the kinetic energy of the full radial Hamiltonian.

Small beta:  E = c_0 + c_1 beta + c_2 beta^2 + ...     (H_C unperturbed)
Large beta:  E = e_0 beta + e_1 + e_2/beta + ...       (H_L unperturbed, eps = 1/beta)

Both sides are computed once in reference units and rescaled.  With
zeta = lam / (m^2 alpha^3) and eta = alpha (m^2/lam)^(1/3) = zeta^(-1/3),

    c_k = m alpha^2     * sum_j kappa_small[k][j] * zeta^j
    e_k = (lam^2/m)^(1/3) * sum_j kappa_large[k][j] * eta^j

(each correction is a polynomial of degree k because the perturbation is
the sum of a kinetic piece and a potential piece).

Two routes are offered for the small-beta side beyond first order:

``"dalgarno-lewis"``
    Exact at grid resolution: the first-order wavefunction is obtained from
    an inhomogeneous boundary-value problem, so continuum intermediate
    states are included.
``"bound-states"``
    Sum over the discrete Coulomb bound states only (``n_states`` of them,
    tail estimated by epsilon acceleration over the truncation size).  The
    continuum is left out.  This is the classic sum-over-states estimate
    and is what reproduces the published second-order quarkonium numbers.

The large-beta side always uses Dalgarno-Lewis; the linear potential has a
purely discrete spectrum, so there the two routes coincide.
"""
from __future__ import annotations

import math
import threading
from dataclasses import dataclass, field
from typing import Callable, Literal

import numpy as np
from scipy.integrate import simpson
from scipy.linalg import solve_banded
from scipy.special import eval_genlaguerre

from . import accel
from .pade2p import AsymptoticSeries, PowerSeries
from .radial import (
    Grid,
    RadialProblem,
    RadialState,
    airy_zero,
    mass_apply,
    solve_bound_state,
)

Method = Literal["dalgarno-lewis", "bound-states"]
METHODS = ("dalgarno-lewis", "bound-states")
MAX_ORDER = 3
DL_POINTS = 40_000
# the first-order wavefunction reaches further out than psi0
DL_RANGE_FACTOR = 1.6
N_BOUND_STATES = 40
PROJECTION_RTOL = 1e-8


class ProjectionError(ArithmeticError):
    pass


@dataclass(frozen=True)
class DLResult:
    E0: float
    E1: float
    E2: float
    E3: float
    psi1: np.ndarray = field(repr=False)

    def coefficients(self, order: int = MAX_ORDER) -> list[float]:
        return [self.E0, self.E1, self.E2, self.E3][: order + 1]


def dl_corrections(
    h0: RadialProblem,
    psi0: RadialState,
    perturbation: Callable[[np.ndarray], np.ndarray],
    order: int = MAX_ORDER,
    kinetic: float = 0.0,
) -> DLResult:
    """Rayleigh-Schrodinger corrections for H0 + g (kinetic * T + W).

    T is the kinetic operator of ``h0``.  Its action on psi0 is replaced by
    (E0 - V0) psi0, so no derivative of the wavefunction is taken.  psi0
    must be an eigenvector of the cusp-free Numerov discretisation
    (``solve_bound_state(..., cusp=False)``); the correction formulas are
    then exact for that discrete operator.  Results use intermediate
    normalisation, <psi0|psi1> = 0.
    """
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    if psi0.cusp:
        raise ValueError("dl_corrections needs a state solved with cusp=False")
    if psi0.problem != h0:
        raise ValueError("psi0 was not solved for h0")
    grid = psi0.grid
    h = grid.h
    r = grid.r[1:-1]
    u0 = psi0.u[1:-1]
    E0 = psi0.energy
    v0 = h0.potential(r)
    w = np.broadcast_to(np.asarray(perturbation(r), dtype=float), r.shape)

    hp_diag = kinetic * (E0 - v0) + w  # H' acting on psi0
    hpsi0 = hp_diag * u0
    E1 = h * np.dot(u0, hpsi0)
    if order == 1:
        return DLResult(E0, E1, 0.0, 0.0, np.zeros_like(psi0.u))
    f = E1 * u0 - hpsi0

    scale = math.sqrt(h * np.dot(hpsi0, hpsi0)) or 1.0
    residual = abs(h * np.dot(u0, f))
    if residual > PROJECTION_RTOL * scale:
        raise ProjectionError(f"source not orthogonal to psi0 (residual {residual:.3g})")

    ab = _dl_operator(h0, grid, E0)
    rhs = mass_apply(f)
    # (H0 - E0) is singular along psi0: pin psi1 at the peak of psi0, then project
    p = int(np.argmax(np.abs(u0)))
    ab[1, p] = 1.0
    if p + 1 < r.size:
        ab[0, p + 1] = 0.0
    if p > 0:
        ab[2, p - 1] = 0.0
    rhs[p] = 0.0
    psi1 = solve_banded((1, 1), ab, rhs)
    if not np.all(np.isfinite(psi1)):
        raise ProjectionError("singular first-order system; is E0 converged?")
    psi1 -= h * np.dot(u0, psi1) * u0

    E2 = h * np.dot(psi1, hpsi0)
    E3 = 0.0
    if order >= 3:
        # T psi1 = E0 psi1 + f - V0 psi1, so <psi1|T|psi1> = <psi1|(E0-V0)|psi1> - E2
        E3 = h * np.dot(psi1, (hp_diag - E1) * psi1) - kinetic * E2
    full = np.zeros_like(psi0.u)
    full[1:-1] = psi1
    return DLResult(E0, E1, E2, E3, full)


def _dl_operator(h0: RadialProblem, grid: Grid, energy: float) -> np.ndarray:
    from .radial import _banded_operator

    return _banded_operator(h0, grid, energy, cusp=False)


# ---------------------------------------------------------------------------
# reference-unit problems


def _coulomb_reference_state(n: int, n_points: int = DL_POINTS) -> RadialState:
    h0 = RadialProblem(0.5, 1.0, 0.0)
    g = Grid.default(h0, n)
    return solve_bound_state(h0, n, Grid(DL_RANGE_FACTOR * g.r_max, n_points), cusp=False)


def _linear_reference_state(n: int, n_points: int = DL_POINTS) -> RadialState:
    h0 = RadialProblem(0.5, 0.0, 1.0)
    g = Grid.default(h0, n)
    return solve_bound_state(h0, n, Grid(DL_RANGE_FACTOR * g.r_max, n_points), cusp=False)


def _poly_in_coupling(evaluate: Callable[[float], list[float]], order: int) -> list[list[float]]:
    """Recover kappa[k][j] from E_k(s) = sum_j kappa[k][j] s^j, degree k in s."""
    nodes = np.array([-1.0, -1 / 3, 1 / 3, 1.0])[: order + 1] if order else np.array([0.0])
    values = np.array([evaluate(s) for s in nodes])  # values[node, k]
    out = []
    for k in range(order + 1):
        V = np.vander(nodes[: k + 1], k + 1, increasing=True)
        out.append(list(np.linalg.solve(V, values[: k + 1, k])))
    return out


def _dl_table(state: RadialState, partner_potential: Callable, order: int) -> list[list[float]]:
    # H' = T + s * partner_potential, the kinetic half travels with the partner
    h0 = state.problem

    def evaluate(s):
        res = dl_corrections(h0, state, lambda r: s * partner_potential(r), order, kinetic=1.0)
        return res.coefficients(order)

    return _poly_in_coupling(evaluate, order)


# ---------------------------------------------------------------------------
# discrete Coulomb spectrum (reference units: -1/2 d^2/dx^2 - 1/x)


def hydrogen_u(k: int, x: np.ndarray) -> np.ndarray:
    """Normalized radial function u_k(x) = x R_k0(x) of the k-th S level."""
    rho = 2.0 * x / k
    log_norm = 1.5 * math.log(2.0 / k) + 0.5 * (
        math.lgamma(k) - math.log(2 * k) - math.lgamma(k + 1)
    )
    return x * math.exp(log_norm) * np.exp(-rho / 2) * eval_genlaguerre(k - 1, 1, rho)


@dataclass(frozen=True)
class HydrogenBasis:
    energies: np.ndarray  # E_k = -1/(2k^2)
    kinetic: np.ndarray  # <k|T|l>
    position: np.ndarray  # <k|x|l>


def hydrogen_basis(n_states: int = N_BOUND_STATES, points: int = 60_001) -> HydrogenBasis:
    """Matrix elements among the lowest ``n_states`` hydrogen S levels.

    Integrals use Simpson's rule in s = sqrt(x), in which the radial
    oscillations are nearly uniform.
    """
    x_max = 2.0 * n_states**2 + 60.0 * n_states
    s = np.linspace(0.0, math.sqrt(x_max), points)
    x = s * s
    jac = 2.0 * s
    U = np.array([hydrogen_u(k, x) for k in range(1, n_states + 1)])
    E = -0.5 / np.arange(1, n_states + 1) ** 2

    def gram(weight):
        return simpson((U[:, None, :] * U[None, :, :]) * (weight * jac), x=s, axis=-1)

    inv_x = np.divide(1.0, x, out=np.zeros_like(x), where=x > 0)
    overlap = gram(np.ones_like(x))
    if np.max(np.abs(overlap - np.eye(n_states))) > 1e-9:
        raise ArithmeticError("hydrogen basis quadrature is not orthonormal")
    # T|l> = (E_l + 1/x)|l>
    kinetic = gram(inv_x) + np.diag(E)
    kinetic = 0.5 * (kinetic + kinetic.T)
    position = gram(x)
    return HydrogenBasis(E, kinetic, 0.5 * (position + position.T))


def bound_state_sums(M: np.ndarray, E: np.ndarray, n: int, order: int) -> list[float]:
    """E1..E_order from a truncated discrete spectrum; level n is 1-based."""
    i = n - 1
    mask = np.arange(E.size) != i
    d = E[i] - E[mask]
    col = M[mask, i]
    out = [M[i, i]]
    if order >= 2:
        out.append(float(np.sum(col**2 / d)))
    if order >= 3:
        t = col / d
        sub = M[np.ix_(mask, mask)]
        out.append(float(t @ sub @ t - M[i, i] * np.sum(col**2 / d**2)))
    return out


def _bound_table(n: int, order: int, basis: HydrogenBasis) -> list[list[float]]:
    n_states = basis.energies.size
    sizes = list(range(n + 1, n_states + 1))

    def evaluate(s):
        M = basis.kinetic + s * basis.position
        seq = np.array(
            [bound_state_sums(M[:N, :N], basis.energies[:N], n, order) for N in sizes]
        )
        vals = [float(basis.energies[n - 1]), float(seq[-1, 0])]
        for k in range(1, order):
            vals.append(_accelerate(seq[:, k]))
        return vals

    return _poly_in_coupling(evaluate, order)


def _accelerate(partial: np.ndarray) -> float:
    tail = partial[-20:]
    try:
        return accel.wynn_epsilon(tail)
    except accel.NumericalBreakdownError:
        return float(tail[-1])


# ---------------------------------------------------------------------------
# universal constants and rescaling


@dataclass(frozen=True)
class UniversalConstants:
    n: int
    order: int
    method: str
    small: tuple[tuple[float, ...], ...]
    large: tuple[tuple[float, ...], ...]

    def truncated(self, order: int) -> UniversalConstants:
        if order > self.order:
            raise ValueError(f"constants only available to order {self.order}")
        return UniversalConstants(self.n, order, self.method, self.small[: order + 1], self.large[: order + 1])


@dataclass(frozen=True)
class BetaExpansionPair:
    n: int
    order: int
    small: PowerSeries
    large: AsymptoticSeries
    m_q: float
    alpha: float
    lam: float


_cache: dict[tuple[int, str], UniversalConstants] = {}
_cache_lock = threading.Lock()
_basis: HydrogenBasis | None = None


def _check_method(method: str) -> None:
    if method not in METHODS:
        raise ValueError(f"unknown method {method!r}; choose from {METHODS}")


def _compute_constants(n: int, method: str) -> UniversalConstants:
    global _basis
    small = _dl_table(_coulomb_reference_state(n), lambda r: r, MAX_ORDER)
    if method == "bound-states":
        if _basis is None:
            _basis = hydrogen_basis()
        bound = _bound_table(n, MAX_ORDER, _basis)
        small = small[:2] + bound[2:]
    large = _dl_table(_linear_reference_state(n), lambda r: -1.0 / r, MAX_ORDER)
    # zeroth order from closed forms
    small[0] = [-0.5 / n**2]
    large[0] = [2.0 ** (-1 / 3) * airy_zero(n)]
    return UniversalConstants(
        n, MAX_ORDER, method, tuple(map(tuple, small)), tuple(map(tuple, large))
    )


def universal_constants(n: int, order: int = MAX_ORDER, method: Method = "dalgarno-lewis") -> UniversalConstants:
    """Dimensionless coefficient tables for level n, computed once per process."""
    _check_method(method)
    if n < 1:
        raise ValueError(f"level index must be >= 1, got {n}")
    if not 1 <= order <= MAX_ORDER:
        raise ValueError(f"order must be in 1..{MAX_ORDER}, got {order}")
    key = (n, method)
    with _cache_lock:
        if key not in _cache:
            _cache[key] = _compute_constants(n, method)
        uc = _cache[key]
    return uc.truncated(order)


def rescale(uc: UniversalConstants, m_q: float, alpha: float, lam: float) -> BetaExpansionPair:
    if m_q <= 0 or alpha <= 0 or lam <= 0:
        raise ValueError("m_q, alpha and lam must be positive")
    zeta = lam / (m_q**2 * alpha**3)
    eta = alpha * (m_q**2 / lam) ** (1 / 3)
    e_small = m_q * alpha**2
    e_large = (lam**2 / m_q) ** (1 / 3)
    c = [e_small * np.polyval(row[::-1], zeta) for row in uc.small]
    e = [e_large * np.polyval(row[::-1], eta) for row in uc.large]
    return BetaExpansionPair(
        uc.n, uc.order, PowerSeries(c), AsymptoticSeries(e, 1), m_q, alpha, lam
    )


def beta_expansion(
    m_q: float, alpha: float, lam: float, n: int, order: int, method: Method = "dalgarno-lewis"
) -> BetaExpansionPair:
    return rescale(universal_constants(n, order, method), m_q, alpha, lam)


def small_beta_coeffs(
    m_q: float, alpha: float, lam: float, n: int, order: int, method: Method = "dalgarno-lewis"
) -> PowerSeries:
    """c_0..c_order, computed directly in physical units (no cached constants)."""
    _check_method(method)
    h0 = RadialProblem(1 / (2 * m_q), alpha, 0.0)
    g = Grid.default(h0, n)
    state = solve_bound_state(h0, n, Grid(DL_RANGE_FACTOR * g.r_max, DL_POINTS), cusp=False)
    res = dl_corrections(h0, state, lambda r: lam * r, order, kinetic=1.0)
    c = res.coefficients(order)
    c[0] = -m_q * alpha**2 / (2 * n * n)
    if method == "bound-states" and order >= 2:
        uc = universal_constants(n, order, method)
        c[2:] = rescale(uc, m_q, alpha, lam).small.coeffs[2:]
    return PowerSeries(c)


def large_beta_coeffs(
    m_q: float, alpha: float, lam: float, n: int, order: int, method: Method = "dalgarno-lewis"
) -> AsymptoticSeries:
    """e_0..e_order with E(beta) = sum_k e_k beta^(1-k), computed in physical units."""
    _check_method(method)
    h0 = RadialProblem(1 / (2 * m_q), 0.0, lam)
    g = Grid.default(h0, n)
    state = solve_bound_state(h0, n, Grid(DL_RANGE_FACTOR * g.r_max, DL_POINTS), cusp=False)
    res = dl_corrections(h0, state, lambda r: -alpha / r, order, kinetic=1.0)
    e = res.coefficients(order)
    e[0] = (lam * lam / (2 * m_q)) ** (1 / 3) * airy_zero(n)
    return AsymptoticSeries(e, 1)
