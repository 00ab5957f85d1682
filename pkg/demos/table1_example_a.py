"""Example A: three equal layers, u0 = x**3, u(0) = 0, u(1) = 1.

All layers share sigma = 1, so the problem is a single slab and the sine
series is exact.  The relative error excludes the two end points, where the
contour representation is not valid for nonzero boundary data.
"""
from layerheat import example_problem, fourier_reference, relative_error, solve

times = (0.01, 0.1, 1.0)
problem = example_problem("A")
field = solve(problem, times=times)
reference = fourier_reference(problem, times=times)

print(f"{'t':>6}  {'E':>10}  points")
for t in times:
    r = relative_error(field, reference, t, exclude_endpoints=True)
    print(f"{t:>6}  {r.E:10.2e}  {r.N}")

mid = len(field.x) // 2
print(f"\nu(0.5, t) = {field.values[:, mid]}")
print(f"flux sigma^2 u_x(0.5, t) = {field.flux[:, mid]}")
