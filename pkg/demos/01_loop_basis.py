# %% [markdown]
# Loops in the figure-eight class are sine series: even wavenumbers in x,
# odd ones in y. Every such curve carries both symmetries and crosses the
# origin at t = 0 and t = pi, so the optimizer never has to enforce them.

# %%
import numpy as np

from choreo.loop import SymmetricLoop, check_symmetries, evaluate, parseval_norms, poincare_check, sample

seed = SymmetricLoop.from_modes(12, {2: 1.0}, {1: 1.0})
print("gamma(0), gamma(pi/2), gamma(pi):")
print(evaluate(seed, np.array([0.0, np.pi / 2, np.pi])))
print(check_symmetries(seed))

# %%
# a random member of the class, and one with a stray cosine
rng = np.random.default_rng(0)
k = seed.wavenumbers
loop = SymmetricLoop.from_vector(rng.normal(size=24) / k**2)
print("random loop symmetric:", check_symmetries(loop).all)


def bent(t):
    p = evaluate(loop, t)
    p[..., 0] += 0.05 * np.cos(t)
    return p


print("with cos t added to x:", check_symmetries(bent))

# %% [markdown]
# Norms come straight from the coefficients. The trapezoid rule on a grid
# finer than 4M agrees to rounding.

# %%
g2, dg2 = parseval_norms(loop)
cs = sample(loop, 4 * loop.modes + 1)
w = 2 * np.pi / cs.nodes
print(f"int |g|^2  : parseval {g2:.15f}  trapezoid {w * np.sum(cs.positions**2):.15f}")
print(f"int |g'|^2 : parseval {dg2:.15f}  trapezoid {w * np.sum(cs.velocities**2):.15f}")

# %%
pc = poincare_check(loop)
print(f"|g|^2 = {pc.lhs:.4f} <= |g'|^2 = {pc.rhs:.4f}")
print("x with constant 1/4:", pc.x_pair)
print("seed saturates both:", poincare_check(seed).x_pair, poincare_check(seed).y_pair)
