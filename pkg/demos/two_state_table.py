"""Two-state model: exact level against the two-point Padé and both expansions."""
import numpy as np

from padeinterp.twostate import error_table, pade_interpolant

r = pade_interpolant()
print("numerator  ", np.round(r.num.coeffs, 12))
print("denominator", np.round(r.den.coeffs, 12))
print()
print(f"{'lambda':>7} {'exact':>9} {'pade':>9} {'small':>9} {'large':>9} {'err %':>7}")
for row in error_table([0.0, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0]):
    print(f"{row.lam:7.2f} {row.exact:9.5f} {row.pade:9.5f} {row.small_pert:9.5f} "
          f"{row.large_pert:9.5f} {row.relative_error_pct:7.3f}")

dense = error_table(np.linspace(0, 50, 10_001))
worst = max(dense, key=lambda row: row.relative_error_pct)
print(f"\nlargest error on [0, 50]: {worst.relative_error_pct:.3f} % at lambda = {worst.lam:.3f}")
