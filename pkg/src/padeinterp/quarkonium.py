"""Heavy-quarkonium S levels from two-point Padé interpolation in beta.

The radial Hamiltonian -(1/m_Q) d^2/dr^2 - alpha/r + lam r is split into a
Coulomb half and a linear half sharing the kinetic term equally; the level
E_n(beta) of H_C + beta H_L is interpolated between its small- and
large-beta expansions and evaluated at beta = 1.  A meson mass is

    M = V_Q + E_n(1)

with V_Q a per-flavour zero-point energy.  Energies are GeV inside the
radial/perturbation code and MeV here and in every file format.
"""
from __future__ import annotations

import csv
import io
import os
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Iterable, Literal

from .pade2p import Pole, RationalInterpolant, build_two_point_pade, pole_report
from .perturb import Method, beta_expansion
from .radial import Grid, RadialProblem, linear_energy_airy, solve_bound_state

Flavor = Literal["charm", "bottom"]
FLAVORS = ("charm", "bottom")
MEV_PER_GEV = 1000.0
POLE_GUARD = 0.05  # interpolant must be pole free on (0, 1 + POLE_GUARD]
# A pole/zero pair closer than this in beta, whose term shifts E(1) by less
# than DOUBLET_SHIFT_MEV, is a cancelled doublet rather than a singularity.
DOUBLET_DISTANCE = 1e-3
DOUBLET_SHIFT_MEV = 0.1
DEFAULT_METHOD: Method = "bound-states"
DATA_DIR_ENV = "PADEINTERP_DATA_DIR"
LEVEL_COLUMNS = ("name", "flavor", "n", "mass_mev")


class PoleInRangeError(ArithmeticError):
    def __init__(self, message: str, poles=()):
        super().__init__(message)
        self.poles = list(poles)


class LevelFileError(ValueError):
    pass


@dataclass(frozen=True)
class QuarkoniumParams:
    alpha: float
    lam: float  # GeV^2
    m_c: float  # MeV
    m_b: float  # MeV
    V_c: float  # MeV
    V_b: float  # MeV

    def validate(self) -> None:
        """All positive, except that alpha = 0 (pure linear potential) is allowed."""
        for name, v in asdict(self).items():
            if not (v > 0 or (name == "alpha" and v == 0)):
                raise ValueError(f"{name} must be positive, got {v}")
        if not self.m_b > self.m_c:
            raise ValueError("m_b must exceed m_c")

    def mass(self, flavor: Flavor) -> float:
        return {"charm": self.m_c, "bottom": self.m_b}[flavor]

    def zero_point(self, flavor: Flavor) -> float:
        return {"charm": self.V_c, "bottom": self.V_b}[flavor]

    def as_dict(self) -> dict[str, float]:
        return asdict(self)


# Parameter sets reported alongside the measured levels, keyed by fit mode and
# interpolation order.
REFERENCE_FITS = {
    "unconstrained-1": QuarkoniumParams(0.4600, 0.1834, 1719, 5538, 2767, 9573),
    "unconstrained-2": QuarkoniumParams(0.4984, 0.1771, 1521, 5046, 2765, 9585),
    "unconstrained-3": QuarkoniumParams(0.7510, 0.1344, 1253, 4143, 2953, 9761),
    "constrained-1": QuarkoniumParams(0.4850, 0.1741, 1560, 4960, 2770, 9571),
    "constrained-2": QuarkoniumParams(0.4964, 0.1784, 1572, 4972, 2773, 9574),
}


@dataclass(frozen=True)
class LevelDatum:
    name: str
    flavor: Flavor
    n: int
    mass: float  # MeV


def default_levels_path() -> Path:
    override = os.environ.get(DATA_DIR_ENV)
    if override:
        return Path(override) / "levels.csv"
    return Path(str(resources.files("padeinterp") / "data" / "levels.csv"))


def parse_levels(text: str) -> list[LevelDatum]:
    rows = list(csv.reader(io.StringIO(text)))
    rows = [(i, r) for i, r in enumerate(rows, 1) if any(c.strip() for c in r)]
    if not rows:
        raise LevelFileError("level file is empty")
    lineno, header = rows[0]
    if tuple(c.strip() for c in header) != LEVEL_COLUMNS:
        raise LevelFileError(f"line {lineno}: header must be {','.join(LEVEL_COLUMNS)}")
    out: list[LevelDatum] = []
    seen = set()
    for lineno, row in rows[1:]:
        if len(row) != len(LEVEL_COLUMNS):
            raise LevelFileError(f"line {lineno}: expected {len(LEVEL_COLUMNS)} fields, got {len(row)}")
        name, flavor, n, mass = (c.strip() for c in row)
        if flavor not in FLAVORS:
            raise LevelFileError(f"line {lineno}: unknown flavor {flavor!r}")
        try:
            n_i = int(n)
            mass_f = float(mass)
        except ValueError as exc:
            raise LevelFileError(f"line {lineno}: {exc}") from None
        if n_i < 1 or not mass_f > 0:
            raise LevelFileError(f"line {lineno}: need n >= 1 and mass > 0")
        if (flavor, n_i) in seen:
            raise LevelFileError(f"line {lineno}: duplicate level ({flavor}, n={n_i})")
        seen.add((flavor, n_i))
        out.append(LevelDatum(name, flavor, n_i, mass_f))
    if not out:
        raise LevelFileError("level file has a header but no levels")
    return out


def load_levels(path: str | os.PathLike | None = None) -> list[LevelDatum]:
    path = Path(path) if path is not None else default_levels_path()
    return parse_levels(path.read_text())


def level_interpolant(
    p: QuarkoniumParams, flavor: Flavor, n: int, order: int, method: Method = DEFAULT_METHOD
) -> RationalInterpolant:
    """Two-point Padé of E_n(beta) in GeV."""
    pair = beta_expansion(p.mass(flavor) / MEV_PER_GEV, p.alpha, p.lam, n, order, method)
    return build_two_point_pade(pair.small, pair.large)


def is_cancelled_doublet(pole: Pole) -> bool:
    """True for a pole that is numerically cancelled by a nearby zero.

    Such pairs sit anywhere on the beta axis and come and go with tiny
    changes of the series coefficients; the function is smooth outside a
    window of width ~residue around them and E(1) is unaffected.
    """
    return (
        pole.multiplicity == 1
        and pole.zero_distance <= DOUBLET_DISTANCE
        and MEV_PER_GEV * pole.shift_at(1.0) <= DOUBLET_SHIFT_MEV
    )


def guarded_poles(r: RationalInterpolant) -> list[Pole]:
    """Poles on (0, 1 + POLE_GUARD] that are not cancelled doublets."""
    return [q for q in pole_report(r, 0.0, 1.0 + POLE_GUARD) if not is_cancelled_doublet(q)]


def predict_level(
    p: QuarkoniumParams,
    flavor: Flavor,
    n: int,
    order: int = 2,
    method: Method = DEFAULT_METHOD,
    pole_guard: bool = True,
) -> float:
    """Predicted meson mass in MeV from the interpolant at beta = 1.

    With ``pole_guard`` a genuine pole on (0, 1.05] raises PoleInRangeError;
    switching it off evaluates the interpolant regardless.
    """
    if p.alpha == 0:
        # E(beta) ~ beta^(2/3) near 0, so there is nothing to interpolate;
        # the linear problem is solved exactly by the Airy zeros
        m_q = p.mass(flavor) / MEV_PER_GEV
        return p.zero_point(flavor) + MEV_PER_GEV * linear_energy_airy(m_q / 2.0, p.lam, n)
    r = level_interpolant(p, flavor, n, order, method)
    poles = guarded_poles(r) if pole_guard else []
    if poles:
        where = ", ".join(f"{q.location:.4g}" for q in poles)
        raise PoleInRangeError(f"{flavor} n={n}: interpolant has a pole at beta = {where}", poles)
    return p.zero_point(flavor) + MEV_PER_GEV * r(1.0)


def fit_quality(
    p: QuarkoniumParams,
    data: Iterable[LevelDatum],
    order: int = 2,
    method: Method = DEFAULT_METHOD,
    pole_guard: bool = True,
) -> float:
    """Sum of squared residuals, MeV^2."""
    return sum(
        (d.mass - predict_level(p, d.flavor, d.n, order, method, pole_guard)) ** 2 for d in data
    )


def oracle_level(p: QuarkoniumParams, flavor: Flavor, n: int, grid: Grid | None = None) -> float:
    """Meson mass in MeV from direct integration of the full radial equation."""
    m_q = p.mass(flavor) / MEV_PER_GEV
    problem = RadialProblem(1.0 / m_q, p.alpha, p.lam)
    return p.zero_point(flavor) + MEV_PER_GEV * solve_bound_state(problem, n, grid).energy


def spectrum_report(
    p: QuarkoniumParams,
    data: Iterable[LevelDatum],
    order: int = 2,
    method: Method = DEFAULT_METHOD,
    with_oracle: bool = True,
) -> dict:
    """Per-level predictions, oracle values and residuals as a JSON-ready dict."""
    levels = []
    quality = 0.0
    for d in data:
        pred = predict_level(p, d.flavor, d.n, order, method)
        entry = {
            "name": d.name,
            "flavor": d.flavor,
            "n": d.n,
            "measured_mev": d.mass,
            "predicted_mev": pred,
            "oracle_mev": oracle_level(p, d.flavor, d.n) if with_oracle else None,
            "residual_mev": d.mass - pred,
        }
        quality += entry["residual_mev"] ** 2
        levels.append(entry)
    return {
        "levels": levels,
        "fit_quality_mev2": quality,
        "params": p.as_dict(),
        "order": order,
        "method": method,
    }
