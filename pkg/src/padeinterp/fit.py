"""Fitting (alpha, lam, m_c, m_b, V_c, V_b) to measured S levels.

The objective is fit_quality plus a flat penalty wherever an interpolant has
a genuine pole near beta = 1 or a parameter leaves the physical region.
Parameters are optimized in relative coordinates ``x = ref * (1 + z)`` so the
simplex sees O(1) scales for couplings and MeV masses alike.
"""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence, TextIO

import numpy as np
from scipy.optimize import minimize

from .pade2p import SingularSystemError
from .perturb import Method
from .quarkonium import (
    DEFAULT_METHOD,
    REFERENCE_FITS,
    LevelDatum,
    PoleInRangeError,
    QuarkoniumParams,
    fit_quality,
    spectrum_report,
)

PENALTY = 1e9  # MeV^2
N_PERTURBED_STARTS = 8
START_SPREAD = 0.10
DEFAULT_SEED = 1729
UNSTABLE_ORDERS = frozenset({3})
PARAM_NAMES = ("alpha", "lam", "m_c", "m_b", "V_c", "V_b")


class AllStartsPenalizedError(RuntimeError):
    pass


@dataclass(frozen=True)
class NelderMeadResult:
    x: np.ndarray
    fun: float
    n_iter: int
    n_fev: int
    reason: str  # "converged", "max_iter" or "max_fev"
    trace: tuple[float, ...] = ()


def nelder_mead(
    objective: Callable[[np.ndarray], float],
    x0: Sequence[float],
    max_iter: int | None = None,
    x_tol: float = 1e-8,
    f_tol: float = 1e-8,
    initial_scale: float | Sequence[float] = 0.05,
    max_fev: int | None = None,
    record_trace: bool = False,
) -> NelderMeadResult:
    """Adaptive Nelder-Mead simplex search.

    The starting simplex is x0 plus ``initial_scale`` along each axis (zero
    coordinates get the bare step).  Convergence needs both the simplex
    diameter below x_tol and the value spread below f_tol.
    """
    x0 = np.asarray(x0, dtype=float)
    step = np.broadcast_to(np.asarray(initial_scale, dtype=float), x0.shape)
    simplex = np.vstack([x0] + [x0 + np.eye(x0.size)[i] * step[i] for i in range(x0.size)])
    trace: list[float] = []
    best = [math.inf]

    def wrapped(x):
        f = float(objective(x))
        best[0] = min(best[0], f)
        return f

    def callback(_xk):
        if record_trace:
            trace.append(best[0])

    opts = dict(xatol=x_tol, fatol=f_tol, adaptive=True, initial_simplex=simplex)
    if max_iter is not None:
        opts["maxiter"] = max_iter
    if max_fev is not None:
        opts["maxfev"] = max_fev
    res = minimize(wrapped, x0, method="Nelder-Mead", callback=callback, options=opts)
    reason = {0: "converged", 1: "max_fev", 2: "max_iter"}.get(res.status, res.message)
    return NelderMeadResult(res.x, float(res.fun), int(res.nit), int(res.nfev), reason, tuple(trace))


@dataclass(frozen=True)
class StartRecord:
    index: int
    start: QuarkoniumParams
    final: QuarkoniumParams
    quality: float
    n_evaluations: int
    reason: str
    penalized: bool
    trace: tuple[float, ...] = ()


@dataclass(frozen=True)
class FitResult:
    best: QuarkoniumParams
    quality: float
    levels: dict
    order: int
    constrained: bool
    n_evaluations: int
    starts_used: int
    seed: int
    method: str
    best_start: int
    starts: tuple[StartRecord, ...] = field(default=(), repr=False)

    @property
    def unstable(self) -> bool:
        return self.order in UNSTABLE_ORDERS

    @property
    def constraint_residual(self) -> float:
        p = self.best
        return abs((p.V_b - p.V_c) - 2.0 * (p.m_b - p.m_c))

    def to_json(self) -> dict:
        return {
            "best": self.best.as_dict(),
            "quality_mev2": self.quality,
            "levels": self.levels["levels"],
            "order": self.order,
            "constrained": self.constrained,
            "constraint_residual_mev": self.constraint_residual,
            "unstable": self.unstable,
            "method": self.method,
            "seed": self.seed,
            "n_evaluations": self.n_evaluations,
            "starts_used": self.starts_used,
            "best_start": self.best_start,
            "starts": [
                {
                    "index": s.index,
                    "start": s.start.as_dict(),
                    "final": s.final.as_dict(),
                    "quality_mev2": s.quality,
                    "n_evaluations": s.n_evaluations,
                    "reason": s.reason,
                    "penalized": s.penalized,
                }
                for s in self.starts
            ],
        }


def result_from_json(doc: dict) -> FitResult:
    """Rebuild a FitResult from ``to_json`` output (traces are not kept)."""
    starts = tuple(
        StartRecord(
            s["index"], QuarkoniumParams(**s["start"]), QuarkoniumParams(**s["final"]), s["quality_mev2"],
            s["n_evaluations"], s["reason"], s["penalized"],
        )
        for s in doc["starts"]
    )
    return FitResult(
        best=QuarkoniumParams(**doc["best"]),
        quality=doc["quality_mev2"],
        levels={"levels": doc["levels"]},
        order=doc["order"],
        constrained=doc["constrained"],
        n_evaluations=doc["n_evaluations"],
        starts_used=doc["starts_used"],
        seed=doc["seed"],
        method=doc["method"],
        best_start=doc["best_start"],
        starts=starts,
    )


def apply_constraint(p: QuarkoniumParams) -> QuarkoniumParams:
    """Replace V_b by V_c + 2 (m_b - m_c)."""
    return QuarkoniumParams(p.alpha, p.lam, p.m_c, p.m_b, p.V_c, p.V_c + 2.0 * (p.m_b - p.m_c))


def pack(p: QuarkoniumParams, constrained: bool) -> np.ndarray:
    v = np.array([p.alpha, p.lam, p.m_c, p.m_b, p.V_c, p.V_b])
    return v[:5] if constrained else v


def unpack(v: Sequence[float], constrained: bool) -> QuarkoniumParams:
    v = [float(x) for x in v]
    if constrained:
        alpha, lam, m_c, m_b, V_c = v
        return QuarkoniumParams(alpha, lam, m_c, m_b, V_c, V_c + 2.0 * (m_b - m_c))
    return QuarkoniumParams(*v)


def penalized_quality(
    p: QuarkoniumParams, data: Sequence[LevelDatum], order: int, method: Method = DEFAULT_METHOD
) -> float:
    if not p.alpha > 0:
        return PENALTY
    try:
        p.validate()
        q = fit_quality(p, data, order, method)
    except (PoleInRangeError, SingularSystemError, ValueError, ArithmeticError):
        return PENALTY
    return q if math.isfinite(q) else PENALTY


def default_starts(order: int, constrained: bool, seed: int = DEFAULT_SEED) -> list[QuarkoniumParams]:
    """Published columns for the mode, nearest order first, then seeded perturbations."""
    mode = "constrained" if constrained else "unconstrained"
    keys = sorted((k for k in REFERENCE_FITS if k.startswith(mode + "-")),
                  key=lambda k: (abs(int(k.rsplit("-", 1)[1]) - order), k))
    published = [REFERENCE_FITS[k] for k in keys]
    if constrained:
        published = [apply_constraint(p) for p in published]
    rng = np.random.default_rng(seed)
    base = pack(published[0], constrained)
    perturbed = [
        unpack(base * (1.0 + rng.uniform(-START_SPREAD, START_SPREAD, base.size)), constrained)
        for _ in range(N_PERTURBED_STARTS)
    ]
    return published + perturbed


def fit_spectrum(
    data: Sequence[LevelDatum],
    order: int = 2,
    constrained: bool = False,
    starts: Iterable[QuarkoniumParams] | None = None,
    seed: int = DEFAULT_SEED,
    method: Method = DEFAULT_METHOD,
    max_iter: int = 3000,
    restarts: int = 2,
    record_trace: bool = False,
) -> FitResult:
    """Multistart Nelder-Mead on the penalized fit quality.

    Each start runs ``1 + restarts`` simplex searches, each restarted from the
    previous optimum with a fresh simplex.  The best start wins, ties going to
    the lower start index.
    """
    data = list(data)
    if not data:
        raise ValueError("no levels to fit")
    if order not in (1, 2, 3):
        raise ValueError(f"order must be 1, 2 or 3, got {order}")
    starts = list(starts) if starts is not None else default_starts(order, constrained, seed)
    if not starts:
        raise ValueError("need at least one start")

    records: list[StartRecord] = []
    for i, start in enumerate(starts):
        ref = pack(start, constrained)
        if np.any(ref <= 0):
            raise ValueError(f"start {i} has non-positive parameters")

        def objective(z, ref=ref):
            return penalized_quality(unpack(ref * (1.0 + z), constrained), data, order, method)

        z = np.zeros(ref.size)
        n_fev = 0
        trace: list[float] = []
        res = None
        for _ in range(1 + restarts):
            res = nelder_mead(objective, z, max_iter=max_iter, x_tol=1e-9, f_tol=1e-9,
                              initial_scale=0.02, record_trace=record_trace)
            n_fev += res.n_fev
            trace.extend(res.trace)
            if res.fun >= PENALTY:
                break
            z = res.x
        assert res is not None
        final = unpack(ref * (1.0 + res.x), constrained)
        records.append(
            StartRecord(i, start, final, res.fun, n_fev, res.reason, res.fun >= PENALTY, tuple(trace))
        )

    ok = [r for r in records if not r.penalized]
    if not ok:
        raise AllStartsPenalizedError(f"all {len(records)} starts ended in penalized territory")
    winner = min(ok, key=lambda r: (r.quality, r.index))
    best = winner.final
    return FitResult(
        best=best,
        quality=winner.quality,
        levels=spectrum_report(best, data, order, method, with_oracle=False),
        order=order,
        constrained=constrained,
        n_evaluations=sum(r.n_evaluations for r in records),
        starts_used=len(records),
        seed=seed,
        method=method,
        best_start=winner.index,
        starts=tuple(records),
    )


def flat_direction(
    p: QuarkoniumParams,
    data: Sequence[LevelDatum],
    order: int = 2,
    method: Method = DEFAULT_METHOD,
    rel_step: float = 1e-4,
) -> np.ndarray:
    """Unit vector (relative coordinates) along which the residuals stay put.

    With six parameters and five levels the residual Jacobian has a null
    direction.  Numerically it is the generator (-1, 1, 2, 2, 0, 0)/sqrt(10)
    of ``scaling_orbit``.  Returned with a positive m_c component.
    """
    data = list(data)
    ref = pack(p, False)

    def residuals(z):
        q = unpack(ref * (1.0 + z), False)
        return np.array([spectrum_report(q, data, order, method, with_oracle=False)
                         ["levels"][i]["residual_mev"] for i in range(len(data))])

    J = np.empty((len(data), ref.size))
    for j in range(ref.size):
        dz = np.zeros(ref.size)
        dz[j] = rel_step
        J[:, j] = (residuals(dz) - residuals(-dz)) / (2 * rel_step)
    v = np.linalg.svd(J)[2][-1]
    return v if v[2] >= 0 else -v


def scaling_orbit(p: QuarkoniumParams, s: float) -> QuarkoniumParams:
    """(alpha, lam, m_Q) -> (alpha/s, lam s, m_Q s^2) with V_Q fixed.

    Levels depend on the couplings only through m_Q alpha^2 and
    lam/(m_Q^2 alpha^3), both invariant here, so every prediction (and the
    fit quality) is unchanged: the unconstrained minimum is a line.
    """
    if not s > 0:
        raise ValueError(f"scale must be positive, got {s}")
    return QuarkoniumParams(p.alpha / s, p.lam * s, p.m_c * s * s, p.m_b * s * s, p.V_c, p.V_b)


def move_along(p: QuarkoniumParams, direction: np.ndarray, dm_c: float) -> QuarkoniumParams:
    """Step along a relative-coordinate direction so that m_c moves by ``dm_c`` MeV."""
    ref = pack(p, False)
    if direction[2] == 0:
        raise ValueError("direction does not move m_c")
    t = dm_c / (ref[2] * direction[2])
    return unpack(ref * (1.0 + t * np.asarray(direction)), False)


TRACE_COLUMNS = ("start", "iteration", "best_quality_mev2")


def write_trace(result: FitResult, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(TRACE_COLUMNS)
    for s in result.starts:
        for k, v in enumerate(s.trace):
            w.writerow([s.index, k, repr(v)])


def dump_json(result: FitResult, fh: TextIO) -> None:
    json.dump(result.to_json(), fh, indent=2)
    fh.write("\n")
