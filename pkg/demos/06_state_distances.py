"""Distances between states, bracketed from both sides.

A lower bound comes from supergradient ascent over the seminorm unit ball
(every iterate is feasible, so the value is certified); for the distance
between an averaging state and the counit on the scalar sector there is
an explicit closed-form upper surrogate.  On a classical two-point space
the machinery reproduces the metric exactly.
"""

import numpy as np

import crossedqm as cq

# classical check: point evaluations on a two-point space at distance 2
triple = cq.lip_triple(np.array([[0.0, 2.0], [2.0, 0.0]]))
space = cq.base_sector(triple)
phi = lambda a: triple.function_of(a)[0]
psi = lambda a: triple.function_of(a)[1]
cert = cq.mk_lower(phi, psi, space, budget=4000, seed=0)
print("two-point space at distance 2: ascent reaches", round(cert.lower, 9))

# the scalar sector over Z: averaging states versus the counit
z1 = cq.free_abelian(1)
wl = cq.word_length_function(z1)
scalars = cq.CrossedProduct.scalars(z1)

print("\naveraging state over ball(n) vs counit, support radius 2:")
for n in (2, 4, 8):
    cert = cq.mk_certificate(scalars, wl, z1.ball(n), 2, budget=1500, seed=3)
    print(f"  n={n}: {cert.lower:.6f} <= distance <= {cert.upper:.6f}")

cert_tau = cq.mk_certificate(scalars, wl, None, 2, budget=1500, seed=3)
print(f"trace vs counit: {cert_tau.lower:.6f} <= distance <= {cert_tau.upper:.6f}"
      f"   (upper = sqrt(2.5) = {np.sqrt(2.5):.6f})")

# kernel audit of the finite systems: the seminorm should vanish exactly
# on multiples of the unit and nowhere else
S = cq.difference_set(z1, z1.ball(2))
basis = [scalars.lam(g) for g in S]
report = cq.cqms_finite_check(basis, [lambda b: cq.d_vertical(b, wl, 4).matrix])
print("\nscalar system on F F^{-1}: kernel dimension =", report["kernel_dim"],
      "(expected 1: the unit)")

space2 = cq.base_sector(triple)
report2 = cq.cqms_finite_check(
    list(triple.basis), [triple.commutator],
    space=space2, state_pairs=[(phi, psi)], budget=1500,
)
print("two-point base system: kernel dimension =", report2["kernel_dim"],
      ", diameter bound =", round(report2["diameter_bound"], 6))
