"""Examples B and D: ten layers with alternating diffusivity.

B has perfect contact; D has contact coefficient H = 1/2 at each interface
and an insulated right end.  The spectral solution is compared with the
Crank-Nicolson oracle (200 cells per layer, dt = 1e-4).
"""
import time

from layerheat import crank_nicolson, example_problem, relative_error, solve

times = (0.02, 0.1, 0.5)
for name in ("B", "D"):
    problem = example_problem(name)
    t0 = time.perf_counter()
    u = solve(problem, times=times, flux=False)
    t1 = time.perf_counter()
    fd = crank_nicolson(problem, times=times)
    t2 = time.perf_counter()
    errs = [relative_error(u, fd, t, exclude_endpoints=True).E for t in times]
    print(f"Example {name}: E = {', '.join(f'{e:.1e}' for e in errs)}"
          f"  (spectral {t1 - t0:.2f} s, finite differences {t2 - t1:.2f} s)")
