# %% [markdown]
# Continuation in the exponent of the potential: each alpha starts from the
# previous solution. The shape changes smoothly, so neighbouring coefficient
# vectors stay close.

# %%
import time

from choreo.functionals import ProblemParams
from choreo.pipeline import run_sweep

t0 = time.perf_counter()
res = run_sweep([0.5, 0.75, 1.0, 1.25, 1.5], ProblemParams(), modes=16, rk4_steps=50_000)
print(f"sweep finished in {time.perf_counter() - t0:.0f}s")
for traj in res.trajectories:
    c = traj.certificate
    print(f"alpha={traj.alpha:<5} F={traj.F:.8f} iters={traj.iterations:3d} rho={c.rho:.6f} "
          f"newton={c.newton_residual_sup:.1e} closure={c.closure_error:.1e} min dist={c.min_mutual_distance:.3f}")
print("adjacent coefficient distances:", [round(d, 4) for d in res.distances])

# %%
# every orbit passes a collinear configuration at t = 0
print("collinear times:", [t.collinear_time for t in res.trajectories])
