"""Imperfect contact approaches perfect contact as H grows.

Uses the Example B stack and prints the sup distance between the two fields
at t = 0.1 for a range of contact coefficients.
"""
import numpy as np

from layerheat import example_problem, make_problem, solve, validate

perfect = validate(example_problem("B"))
ref = solve(perfect, times=(0.1,), flux=False)
inside = (ref.x > 0) & (ref.x < 1)
for H in (1.0, 1e2, 1e4, 1e6, 1e8):
    vp = make_problem(perfect.x, perfect.sigma, perfect.beta, perfect.f_left, perfect.f_right,
                      perfect.initial, (H,) * perfect.n)
    u = solve(vp, times=(0.1,), flux=False)
    print(f"H = {H:8.0e}: sup |u_H - u_perfect| = {np.abs(u.values - ref.values)[0, inside].max():.2e}")
