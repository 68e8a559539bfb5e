"""Tensor-sum Dirac operators in all four parity patterns.

The length Dirac operator and the base Dirac operator combine into a
single selfadjoint operator on the crossed-product module; its commutator
with an element splits into a vertical part (seeing only the group
directions) and a horizontal part (seeing only the base), and its norm is
equivalent to the max of the two parts within a factor of two -- at every
truncation radius.
"""

import numpy as np

import crossedqm as cq

z2 = cq.free_abelian(2)
word = cq.word_length_function(z2)   # parity 1
torus = cq.torus_length(z2)          # parity 0

rng = np.random.default_rng(11)

for p, q in [(1, 1), (0, 0), (0, 1), (1, 0)]:
    length = torus if p == 0 else word
    triple = cq.lip_triple(np.array([[0.0, 2.0], [2.0, 0.0]]), graded=(q == 0))
    action = cq.permutation_action(z2, triple, [1, 0], [1, 0])
    cp = cq.CrossedProduct(z2, triple, action)

    op = cq.tensor_sum_dirac(length, triple, 2)
    label = f"(p, q) = ({p}, {q})"
    print(f"{label}: space dim {op.matrix.shape[0]}, doubled: {op.doubled}, "
          f"graded: {op.grading is not None}")

    audit = cq.parity_audit(length, triple, 2,
                            [cp.random_element(rng, 1, terms=2)])
    print(f"  selfadjointness defect {audit['selfadjoint_defect']:.1e}, "
          f"per-site block defect {audit['block_selfadjoint_defect']:.1e}")

    z = cp.random_element(rng, 2, terms=3)
    for radius in (2, 3):
        dv = cq.spectral_norm(cq.d_vertical(z, length, radius).matrix)
        dh = cq.spectral_norm(cq.d_horizontal(z, length, radius).matrix)
        tens = cq.spectral_norm(cq.tensor_commutator(z, length, radius).matrix)
        print(f"  radius {radius}: max(dV, dH) = {max(dv, dh):.4f} "
              f"<= tensor = {tens:.4f} <= 2 max = {2 * max(dv, dh):.4f}")
    print()

# the combined seminorm: vertical part plus coefficientwise base seminorms
triple = cq.lip_triple(np.array([[0.0, 2.0], [2.0, 0.0]]))
action = cq.permutation_action(z2, triple, [1, 0], [1, 0])
cp = cq.CrossedProduct(z2, triple, action)
z = cp.random_element(rng, 2, terms=3)
rep = cq.combined_seminorm(z, word, [2, 3], order="sup")
print("combined seminorm of a random element:", round(rep.value, 6))
print("coefficient part:", round(cq.coefficient_seminorm(z), 6),
      "/ vertical part:", round(cq.vertical_seminorm(z, word, [2, 3]).value, 6))
