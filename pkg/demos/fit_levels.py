"""Fit the potential to the five measured S levels.

Runs one start from each published second-order column, so it finishes in
seconds; ``fit_spectrum`` without ``starts`` uses the full multistart set.
The unconstrained minimum is a line (see ``scaling_orbit``), which is why
two very different parameter sets can fit equally well.
"""
from padeinterp.fit import apply_constraint, fit_spectrum, scaling_orbit
from padeinterp.quarkonium import REFERENCE_FITS, fit_quality, load_levels

levels = load_levels()


def show(title, result):
    b = result.best
    print(f"{title}: quality {result.quality:.3g} MeV^2 after {result.n_evaluations} evaluations")
    print(f"  alpha {b.alpha:.4f}  lam {b.lam:.4f}  m_c {b.m_c:.1f}  m_b {b.m_b:.1f}  "
          f"V_c {b.V_c:.1f}  V_b {b.V_b:.1f}")
    for lv in result.levels["levels"]:
        print(f"  {lv['name']:<13}{lv['measured_mev']:9.0f}{lv['predicted_mev']:10.2f}")


free = fit_spectrum(levels, 2, constrained=False, starts=[REFERENCE_FITS["unconstrained-2"]])
show("unconstrained", free)

tied = fit_spectrum(levels, 2, constrained=True, starts=[apply_constraint(REFERENCE_FITS["constrained-2"])])
show("constrained", tied)
print(f"  constraint residual {tied.constraint_residual:.1e} MeV\n")

print("walking along the flat line of the unconstrained fit:")
for s in (0.95, 1.0, 1.05):
    q = scaling_orbit(free.best, s)
    print(f"  s={s:4.2f}  alpha {q.alpha:.4f}  m_c {q.m_c:7.1f}  quality {fit_quality(q, levels):.3g}")
