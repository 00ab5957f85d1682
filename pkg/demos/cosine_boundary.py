"""Example C: u(0, t) = cos t and a Robin right end u + u_x = 0.

Time-dependent boundary data enter only through their time transforms, so
nothing changes in the solver.  The script prints the temperature jump and
flux jump at each interface, which should vanish for perfect contact, and
the temperature just inside the left end.
"""
import math

import numpy as np

from layerheat import evaluate_flux, evaluate_solution, example_problem, spectral_tables, validate

vp = validate(example_problem("C"))
xb = vp.x[1:-1]
left, right = np.arange(1, vp.n + 1), np.arange(2, vp.n + 2)
for t in (0.1, 0.5, 1.0):
    tabs = spectral_tables(vp, t)
    du = evaluate_solution(vp, tabs, xb, t, left) - evaluate_solution(vp, tabs, xb, t, right)
    dq = evaluate_flux(vp, tabs, xb, t, left) - evaluate_flux(vp, tabs, xb, t, right)
    near = evaluate_solution(vp, tabs, 1e-3, t)
    print(f"t = {t}: max |[u]| = {np.abs(du).max():.1e}, max |[flux]| = {np.abs(dq).max():.1e}, "
          f"u(1e-3) - cos t = {near - math.cos(t):.2e}")
