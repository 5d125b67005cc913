# %% [markdown]
# Kinetic and potential terms scale like lambda^2 and lambda^-alpha under
# homotheties. Minimizing the action over the scale gives the envelope
# C_alpha * F with F = K^p V^q, which no longer depends on the size of the loop.

# %%
import numpy as np

from choreo.functionals import ProblemParams, scale_envelope, scale_invariant_F
from choreo.loop import SymmetricLoop

loop = SymmetricLoop.from_modes(8, {2: 1.0, 4: 0.05}, {1: 1.0, 5: -0.02})
for alpha in (0.5, 1.0, 1.5):
    p = ProblemParams(alpha=alpha)
    rep = scale_invariant_F(loop, p)
    Fs = [scale_invariant_F(loop.scaled(lam), p).F for lam in (0.1, 1.0, 10.0)]
    print(f"alpha={alpha}: F at scales 0.1, 1, 10 -> {Fs}")

# %% [markdown]
# The envelope is convex in lambda, its minimum sits at lambda*, and the
# minimum equals C_alpha F.

# %%
p = ProblemParams(alpha=1.0)
rep = scale_invariant_F(loop, p)
lam = rep.lambda_star * np.logspace(-1, 1, 9)
for l in lam:
    print(f"lambda={l:8.4f}  phi={scale_envelope(loop, p, l):.10f}")
print(f"lambda*={rep.lambda_star:.6f}  phi(lambda*)={scale_envelope(loop, p, rep.lambda_star):.12f}  "
      f"C F={rep.C_alpha * rep.F:.12f}")
