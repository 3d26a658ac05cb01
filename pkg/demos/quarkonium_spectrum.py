"""S levels of charmonium and bottomonium at the published parameter sets.

For each set, the Padé value at beta = 1 is printed next to direct
integration of the radial equation and the measured mass.
"""
from padeinterp.pade2p import pole_report
from padeinterp.quarkonium import (
    REFERENCE_FITS,
    PoleInRangeError,
    fit_quality,
    level_interpolant,
    load_levels,
    oracle_level,
    predict_level,
)

levels = load_levels()

for key in ("unconstrained-1", "unconstrained-2", "constrained-2"):
    p = REFERENCE_FITS[key]
    order = int(key[-1])
    print(f"{key}: alpha={p.alpha} lam={p.lam} GeV^2 m_c={p.m_c} m_b={p.m_b} V_c={p.V_c} V_b={p.V_b}")
    print(f"  {'level':<13}{'measured':>9}{'pade':>10}{'direct':>10}")
    for d in levels:
        try:
            pade = f"{predict_level(p, d.flavor, d.n, order):10.1f}"
        except PoleInRangeError:
            pade = f"{'pole':>10}"
        print(f"  {d.name:<13}{d.mass:9.0f}{pade}{oracle_level(p, d.flavor, d.n):10.1f}")
    q = fit_quality(p, levels, order, pole_guard=False)
    print(f"  fit quality (pole guard off) {q:.2f} MeV^2\n")

# the first-order set hides a pole just above beta = 1/3 in the Upsilon(2S) interpolant
r = level_interpolant(REFERENCE_FITS["unconstrained-1"], "bottom", 2, 1)
for pole in pole_report(r, 0.0, 1.05):
    print(f"Upsilon(2S), first order: pole at beta = {pole.location:.4f}, residue {pole.residue:.3g} GeV")
