"""Groups, word metrics and averaging sets.

Walks through the three shipped group families, BFS word lengths, ball
enumeration and the exact overlap ratios that drive the averaging
machinery.
"""

from fractions import Fraction

import crossedqm as cq

# Z^2 with the standard generators: the word length is the taxicab norm
z2 = cq.free_abelian(2)
g = z2.element((3, -4))
print("word length of (3,-4) in Z^2:", z2.word_length(g))

# the discrete Heisenberg group: the central element needs a commutator
heis = cq.heisenberg3()
x, y = heis.element((1, 0, 0)), heis.element((0, 1, 0))
comm = heis.multiply(heis.multiply(x, y), heis.multiply(heis.invert(x), heis.invert(y)))
print("commutator [x, y] =", comm.coords, "with length", heis.word_length(comm))

print("\nball growth:")
for r in range(5):
    print(f"  r={r}:  |Z^2 ball| = {len(z2.ball(r)):4d}   |Heis ball| = {len(heis.ball(r)):4d}")

# balls are nested prefix-compatibly, so truncated matrices are reproducible
b2, b3 = z2.ball(2), z2.ball(3)
print("\nball(2) is a prefix of ball(3):", b3.elements[: len(b2)] == b2.elements)

# overlap ratios |F intersect gF| / |F| are exact rationals
print("\noverlap ratios on Z (F = ball(n), g = +1):")
z1 = cq.free_abelian(1)
for n in (1, 2, 4, 8, 16):
    ratio = cq.folner_overlap(z1, z1.ball(n), z1.element((1,)))
    assert ratio == Fraction(2 * n, 2 * n + 1)
    print(f"  n={n:2d}: {ratio}  ~ {float(ratio):.4f}")

# the same ratios go to 1 for every fixed element: the averaging sets are
# asymptotically invariant, which is what all approximation arguments use
print("\nHeisenberg overlaps for the generator x:")
for n in (2, 4, 6, 8):
    ratio = cq.folner_overlap(heis, heis.ball(n), x)
    print(f"  n={n}: {float(ratio):.4f}")
