# %% [markdown]
# Near a binary collision the separation behaves like t^(2/(2+alpha)). The
# action spent on the last eps of such an arc is then finite and shrinks
# like eps^((2-alpha)/(2+alpha)), which is why collisions cost finite action
# and must be excluded by other means.

# %%
import numpy as np

from choreo.pipeline import collision_scaling_probe

for alpha in (0.5, 1.0, 1.5):
    probe = collision_scaling_probe(alpha, np.logspace(-1, -6, 6))
    print(f"alpha={alpha}: fitted {probe.fitted_exponent:.6f}  expected {probe.expected_exponent:.6f}")
    for eps, k, v, a in probe.rows[::2]:
        print(f"    eps={eps:.0e}  K={k:.4e}  V={v:.4e}  action={a:.4e}")
