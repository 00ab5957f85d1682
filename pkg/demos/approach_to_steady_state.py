"""How fast do Examples A and D reach their steady profiles?

Example A relaxes within t ~ 1.  Example D has nine resistive contacts and
an insulated end, so its slowest mode decays at a rate near 0.1 and the
field is still far from steady at t = 5.
"""
import numpy as np

from layerheat import example_problem, solve
from layerheat.oracles import steady_state_field

for name, times in (("A", (1.0, 5.0)), ("D", (5.0, 20.0, 60.0))):
    problem = example_problem(name)
    steady = steady_state_field(problem)
    u = solve(problem, times=times, flux=False)
    inside = (u.x > u.x.min()) & (u.x < u.x.max())
    for k, t in enumerate(times):
        d = np.abs(u.values[k] - steady.values[0])[inside].max()
        print(f"Example {name}, t = {t:>4}: sup distance to steady state {d:.2e}")
