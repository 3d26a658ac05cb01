"""Upper level of the two-state Hamiltonian H = sigma_x + lambda * sigma_z.

The exact level is sqrt(1 + lambda^2).  Second-order perturbation theory
gives 1 + lambda^2/2 for small coupling and lambda + 1/(2 lambda) for large
coupling; the two-point Padé built from those two truncated series is

    (l^3 + 1.5 l^2 + 1.5 l + 1) / (l^2 + 1.5 l + 1).
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterable, TextIO

from .pade2p import AsymptoticSeries, PowerSeries, RationalInterpolant, build_two_point_pade

# literal coefficients, used only as a cross-check on the runtime construction
REFERENCE_NUMERATOR = (1.0, 1.5, 1.5, 1.0)
REFERENCE_DENOMINATOR = (1.0, 1.5, 1.0)

CSV_COLUMNS = ("lambda", "exact", "pade", "pert_small", "pert_large", "rel_err_pct")

SMALL_SERIES = PowerSeries([1.0, 0.0, 0.5])
LARGE_SERIES = AsymptoticSeries([1.0, 0.0, 0.5], leading_power=1)


@dataclass(frozen=True)
class TwoStateResult:
    lam: float
    exact: float
    pade: float
    small_pert: float
    large_pert: float
    relative_error_pct: float

    def row(self) -> dict[str, float]:
        return dict(zip(CSV_COLUMNS, asdict(self).values()))


def _check_coupling(lam: float) -> None:
    if not lam >= 0.0 or not math.isfinite(lam):
        raise ValueError(f"coupling must be finite and non-negative, got {lam}")


def exact_energy(lam: float) -> float:
    _check_coupling(lam)
    return math.hypot(lam, 1.0)


def pert_small(lam: float) -> float:
    _check_coupling(lam)
    return 1.0 + 0.5 * lam * lam


def pert_large(lam: float) -> float:
    _check_coupling(lam)
    if lam == 0.0:
        raise ZeroDivisionError("strong-coupling expansion is singular at lambda = 0")
    return lam + 0.5 / lam


@lru_cache(maxsize=1)
def pade_interpolant() -> RationalInterpolant:
    r = build_two_point_pade(SMALL_SERIES, LARGE_SERIES)
    ok = all(
        len(got) == len(ref) and all(abs(a - b) < 1e-12 for a, b in zip(got, ref))
        for got, ref in ((r.num.coeffs, REFERENCE_NUMERATOR), (r.den.coeffs, REFERENCE_DENOMINATOR))
    )
    if not ok:
        raise AssertionError(f"two-state Padé coefficients drifted: {r.num.coeffs} / {r.den.coeffs}")
    return r


def pade_energy(lam: float) -> float:
    _check_coupling(lam)
    return pade_interpolant()(lam)


def error_table(lambdas: Iterable[float]) -> list[TwoStateResult]:
    rows = []
    for lam in lambdas:
        lam = float(lam)
        exact = exact_energy(lam)
        pade = pade_energy(lam)
        large = pert_large(lam) if lam > 0 else math.inf
        rows.append(
            TwoStateResult(lam, exact, pade, pert_small(lam), large, 100.0 * (pade - exact) / exact)
        )
    return rows


def write_csv(rows: Iterable[TwoStateResult], fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([repr(v) for v in r.row().values()])


def read_csv(fh: TextIO | str) -> list[TwoStateResult]:
    if isinstance(fh, str):
        fh = io.StringIO(fh)
    reader = csv.DictReader(fh)
    if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
        raise ValueError(f"unexpected header {reader.fieldnames}, want {CSV_COLUMNS}")
    return [TwoStateResult(*(float(row[c]) for c in CSV_COLUMNS)) for row in reader]
