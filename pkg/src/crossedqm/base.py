"""Finite-dimensional base data: spectral triples, group actions on them,
and operator-system subspaces.

Everything here is a dense matrix on a fixed finite-dimensional Hilbert
space, so commutator seminorms are exact eigenproblems.  Two concrete
families are shipped:

* ``lip_triple`` -- the standard triple over a finite metric space whose
  commutator seminorm is the Lipschitz constant, acted on by isometric
  point permutations;
* ``matrix_triple`` -- a full matrix algebra with an inner action by a
  commuting family of unitaries (one per generator, factoring through the
  abelianisation).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ValidationError
from .groups import GroupElement, GroupModel
from .linalg import hermitian_defect, spectral_norm


@dataclass(frozen=True)
class FiniteSpectralTriple:
    """Algebra basis, Dirac matrix and optional grading on H = C^dim."""

    dim: int
    basis: tuple[np.ndarray, ...]
    dirac: np.ndarray
    parity: int
    grading: np.ndarray | None = None
    name: str = "triple"

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValidationError("parity must be 0 or 1")
        if self.dirac.shape != (self.dim, self.dim):
            raise ValidationError("Dirac matrix has wrong shape")
        if hermitian_defect(self.dirac) > 1e-12 * max(1.0, spectral_norm(self.dirac)):
            raise ValidationError("Dirac matrix must be selfadjoint")
        if self.parity == 0:
            if self.grading is None:
                raise ValidationError("even triple requires a grading")
            g = self.grading
            if hermitian_defect(g) > 1e-12 or spectral_norm(g @ g - np.eye(self.dim)) > 1e-12:
                raise ValidationError("grading must be a selfadjoint unitary")
            if spectral_norm(g @ self.dirac + self.dirac @ g) > 1e-12:
                raise ValidationError("grading must anticommute with the Dirac matrix")
            for a in self.basis:
                if spectral_norm(g @ a - a @ g) > 1e-12:
                    raise ValidationError("grading must commute with the algebra")
        elif self.grading is not None:
            raise ValidationError("odd triple must not carry a grading")

    # -- algebra span -------------------------------------------------

    def _basis_stack(self) -> np.ndarray:
        return np.stack([a.reshape(-1) for a in self.basis])

    def coefficients(self, a: np.ndarray, tol: float = 1e-9) -> np.ndarray:
        """Coordinates of ``a`` in the basis; raises if outside the span."""
        stack = self._basis_stack()
        coeffs, *_ = np.linalg.lstsq(stack.T, np.asarray(a, dtype=complex).reshape(-1), rcond=None)
        resid = stack.T @ coeffs - np.asarray(a, dtype=complex).reshape(-1)
        if np.linalg.norm(resid) > tol * max(1.0, np.linalg.norm(a)):
            raise ValidationError("matrix does not lie in the algebra span")
        return coeffs

    def contains(self, a: np.ndarray, tol: float = 1e-9) -> bool:
        try:
            self.coefficients(a, tol)
            return True
        except ValidationError:
            return False

    def combine(self, coeffs: Sequence[complex]) -> np.ndarray:
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for c, a in zip(coeffs, self.basis):
            out += c * a
        return out

    def unit(self) -> np.ndarray:
        return np.eye(self.dim, dtype=complex)

    def random_element(self, rng: np.random.Generator, hermitian: bool = False) -> np.ndarray:
        coeffs = rng.standard_normal(len(self.basis)) + 1j * rng.standard_normal(len(self.basis))
        a = self.combine(coeffs)
        if hermitian:
            a = (a + a.conj().T) / 2.0
            if not self.contains(a):
                # span not *-closed for hermitian projection: fall back to real coeffs
                a = self.combine(rng.standard_normal(len(self.basis)))
        return a

    # -- seminorm -----------------------------------------------------

    def commutator(self, a: np.ndarray) -> np.ndarray:
        """``D a - a D``; closure is vacuous in finite dimension."""
        return self.dirac @ a - a @ self.dirac

    def seminorm(self, a: np.ndarray) -> float:
        """Commutator seminorm ``||[D, a]||``."""
        return spectral_norm(self.commutator(a))


@dataclass(frozen=True)
class FiniteMetricTriple(FiniteSpectralTriple):
    """Triple over a finite metric space: one 2x2 block per point pair.

    The Hilbert space is the direct sum of C^2 over pairs ``x < y``, the
    Dirac block is ``[[0, 1], [1, 0]] / rho(x, y)``, and a function acts
    blockwise as ``diag(a(x), a(y))``.  Its commutator seminorm is then
    the Lipschitz constant of the function.
    """

    points: int = 0
    distance: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    pairs: tuple[tuple[int, int], ...] = ()

    def function_of(self, a: np.ndarray) -> np.ndarray:
        """Recover the point function from its blockwise matrix."""
        vals = np.zeros(self.points, dtype=complex)
        if self.points == 1:
            vals[0] = a[0, 0]
            return vals
        seen = [False] * self.points
        for k, (x, y) in enumerate(self.pairs):
            if not seen[x]:
                vals[x] = a[2 * k, 2 * k]
                seen[x] = True
            if not seen[y]:
                vals[y] = a[2 * k + 1, 2 * k + 1]
                seen[y] = True
        return vals

    def matrix_of(self, values: Sequence[complex]) -> np.ndarray:
        values = np.asarray(values, dtype=complex)
        if values.shape != (self.points,):
            raise ValidationError("function has wrong number of values")
        if self.points == 1:
            return values.reshape(1, 1)
        out = np.zeros((self.dim, self.dim), dtype=complex)
        for k, (x, y) in enumerate(self.pairs):
            out[2 * k, 2 * k] = values[x]
            out[2 * k + 1, 2 * k + 1] = values[y]
        return out

    def lipschitz_constant(self, values: Sequence[complex]) -> float:
        """Brute-force Lipschitz constant over all point pairs."""
        values = np.asarray(values, dtype=complex)
        best = 0.0
        for x in range(self.points):
            for y in range(x + 1, self.points):
                best = max(best, abs(values[x] - values[y]) / self.distance[x, y])
        return best


def _validate_metric(distance: np.ndarray) -> np.ndarray:
    d = np.asarray(distance, dtype=float)
    n = d.shape[0]
    if d.shape != (n, n):
        raise ValidationError("distance matrix must be square")
    if np.max(np.abs(d - d.T)) > 0:
        raise ValidationError("distance matrix must be symmetric")
    if np.any(np.diag(d) != 0):
        raise ValidationError("distance matrix must vanish on the diagonal")
    for x in range(n):
        for y in range(n):
            if x != y and d[x, y] <= 0:
                raise ValidationError("off-diagonal distances must be positive")
            for z in range(n):
                if d[x, y] > d[x, z] + d[z, y] + 1e-12:
                    raise ValidationError("distance matrix violates the triangle inequality")
    return d


def lip_triple(distance: np.ndarray, graded: bool = False) -> FiniteMetricTriple:
    """Spectral triple over a finite metric space (see module docstring).

    With ``graded=True`` the triple is equipped with the blockwise
    ``diag(1, -1)`` grading, which anticommutes with the Dirac blocks and
    commutes with the diagonal algebra.
    """
    d = _validate_metric(distance)
    npts = d.shape[0]
    if npts == 1:
        basis = (np.eye(1, dtype=complex),)
        triple = FiniteMetricTriple(
            dim=1, basis=basis, dirac=np.zeros((1, 1), dtype=complex),
            parity=1, grading=None, name="finite_metric",
            points=1, distance=d, pairs=(),
        )
        return triple
    pairs = tuple((x, y) for x in range(npts) for y in range(x + 1, npts))
    dim = 2 * len(pairs)
    dirac = np.zeros((dim, dim), dtype=complex)
    for k, (x, y) in enumerate(pairs):
        dirac[2 * k, 2 * k + 1] = 1.0 / d[x, y]
        dirac[2 * k + 1, 2 * k] = 1.0 / d[x, y]
    basis = []
    for p in range(npts):
        e = np.zeros(npts)
        e[p] = 1.0
        mat = np.zeros((dim, dim), dtype=complex)
        for k, (x, y) in enumerate(pairs):
            mat[2 * k, 2 * k] = e[x]
            mat[2 * k + 1, 2 * k + 1] = e[y]
        basis.append(mat)
    grading = None
    parity = 1
    if graded:
        grading = np.kron(np.eye(len(pairs)), np.diag([1.0, -1.0])).astype(complex)
        parity = 0
    return FiniteMetricTriple(
        dim=dim, basis=tuple(basis), dirac=dirac, parity=parity, grading=grading,
        name="finite_metric", points=npts, distance=d, pairs=pairs,
    )


def matrix_triple(k: int, dirac: np.ndarray | None = None, grading: np.ndarray | None = None) -> FiniteSpectralTriple:
    """Full matrix algebra M_k with an optional Dirac matrix (default 0)."""
    if k < 1:
        raise ValidationError("matrix size must be at least 1")
    dirac = np.zeros((k, k), dtype=complex) if dirac is None else np.asarray(dirac, dtype=complex)
    basis = []
    for i in range(k):
        for j in range(k):
            e = np.zeros((k, k), dtype=complex)
            e[i, j] = 1.0
            basis.append(e)
    parity = 0 if grading is not None else 1
    return FiniteSpectralTriple(
        dim=k, basis=tuple(basis), dirac=dirac, parity=parity, grading=grading, name="matrix",
    )


def scalar_triple() -> FiniteSpectralTriple:
    """The one-dimensional base used for scalar-coefficient crossed products."""
    return FiniteSpectralTriple(
        dim=1, basis=(np.eye(1, dtype=complex),), dirac=np.zeros((1, 1), dtype=complex),
        parity=1, name="scalar",
    )


# ---------------------------------------------------------------------------
# group actions
# ---------------------------------------------------------------------------


def _abelianized_exponents(model: GroupModel, g: GroupElement) -> tuple[int, ...]:
    """Coordinates of ``g`` in the abelianisation (drops the centre for the
    Heisenberg family)."""
    if model.family == "heisenberg3":
        return g.coords[:2]
    return g.coords


class GroupAction:
    """Action of a group model on the algebra of a finite spectral triple.

    Realisations:

    * ``trivial``      -- every element acts as the identity;
    * ``permutation``  -- points of a finite metric space are permuted by
      ``sigma^{c(g)}`` where ``c`` is an integer character of the
      abelianisation (weights per abelianised coordinate);
    * ``inner``        -- ``Ad(u_g)`` for a commuting family of unitaries,
      one per abelianised coordinate.
    """

    def __init__(self, model: GroupModel, triple: FiniteSpectralTriple, kind: str = "trivial",
                 permutation: Sequence[int] | None = None,
                 weights: Sequence[int] | None = None,
                 unitaries: Sequence[np.ndarray] | None = None):
        self.model = model
        self.triple = triple
        self.kind = kind
        n_ab = len(_abelianized_exponents(model, model.identity()))
        if kind == "trivial":
            pass
        elif kind == "permutation":
            if not isinstance(triple, FiniteMetricTriple):
                raise ValidationError("permutation actions require a finite-metric triple")
            perm = tuple(int(p) for p in (permutation or ()))
            if sorted(perm) != list(range(triple.points)):
                raise ValidationError("permutation must be a bijection of the points")
            d = triple.distance
            for x in range(triple.points):
                for y in range(triple.points):
                    if abs(d[perm[x], perm[y]] - d[x, y]) > 1e-12:
                        raise ValidationError("permutation must be an isometry of the metric")
            self.permutation = perm
            self.weights = tuple(int(w) for w in (weights if weights is not None else [1] * n_ab))
            if len(self.weights) != n_ab:
                raise ValidationError(f"expected {n_ab} character weights")
            self._perm_cache: dict[int, tuple[int, ...]] = {0: tuple(range(triple.points))}
            if model.is_finite():
                order = model.params[0]
                if self._perm_power(order * self.weights[0]) != tuple(range(triple.points)):
                    raise ValidationError(
                        "character is not well defined: sigma^(weight*order) != id"
                    )
        elif kind == "inner":
            us = [np.asarray(u, dtype=complex) for u in (unitaries or ())]
            if len(us) != n_ab:
                raise ValidationError(f"expected {n_ab} unitaries (one per abelianised coordinate)")
            for u in us:
                if u.shape != (triple.dim, triple.dim):
                    raise ValidationError("unitary has wrong shape")
                if spectral_norm(u @ u.conj().T - np.eye(triple.dim)) > 1e-10:
                    raise ValidationError("matrix is not unitary")
            for i in range(len(us)):
                for j in range(i + 1, len(us)):
                    if spectral_norm(us[i] @ us[j] - us[j] @ us[i]) > 1e-10:
                        raise ValidationError("inner-action unitaries must commute")
            if model.is_finite():
                order = model.params[0]
                if spectral_norm(np.linalg.matrix_power(us[0], order) - np.eye(triple.dim)) > 1e-8:
                    raise ValidationError("unitary order does not divide the cyclic order")
            self.unitaries = us
            self._unitary_cache: dict[tuple[int, ...], np.ndarray] = {}
        else:
            raise ValidationError(f"unknown action kind: {kind!r}")

    # -- permutation helpers -------------------------------------------

    def _perm_power(self, k: int) -> tuple[int, ...]:
        base = self.permutation
        npts = len(base)
        if self.model.is_finite():
            # reduce exponent by the permutation order to keep cache small
            order = 1
            cur = base
            while cur != tuple(range(npts)):
                cur = tuple(base[p] for p in cur)
                order += 1
            k = k % order
        if k in getattr(self, "_perm_cache", {}):
            return self._perm_cache[k]
        ident = tuple(range(npts))
        inv = tuple(base.index(i) for i in range(npts))
        step = base if k > 0 else inv
        out = ident
        for _ in range(abs(k)):
            out = tuple(step[p] for p in out)
        self._perm_cache[k] = out
        return out

    def _unitary_of(self, g: GroupElement) -> np.ndarray:
        exps = _abelianized_exponents(self.model, g)
        if exps in self._unitary_cache:
            return self._unitary_cache[exps]
        u = np.eye(self.triple.dim, dtype=complex)
        for e, base in zip(exps, self.unitaries):
            if e >= 0:
                u = u @ np.linalg.matrix_power(base, e)
            else:
                u = u @ np.linalg.matrix_power(base.conj().T, -e)
        self._unitary_cache[exps] = u
        return u

    # -- the action -----------------------------------------------------

    def apply(self, g: GroupElement, a: np.ndarray) -> np.ndarray:
        self.model.check_member(g)
        if self.kind == "trivial":
            return np.asarray(a, dtype=complex)
        if self.kind == "permutation":
            exps = _abelianized_exponents(self.model, g)
            c = sum(w * e for w, e in zip(self.weights, exps))
            perm = self._perm_power(c)
            values = self.triple.function_of(np.asarray(a, dtype=complex))
            inv = tuple(perm.index(i) for i in range(len(perm)))
            return self.triple.matrix_of(values[list(inv)])
        u = self._unitary_of(g)
        return u @ np.asarray(a, dtype=complex) @ u.conj().T

    def equicontinuity_sup(self, a: np.ndarray, radius: int) -> float:
        """Max commutator seminorm over the orbit of ``a`` under the ball."""
        ball = self.model.ball(radius)
        return max(self.triple.seminorm(self.apply(g, a)) for g in ball)

    def equicontinuity_profile(self, a: np.ndarray, radii: Sequence[int]) -> dict:
        """Per-radius orbit suprema, with a closed-form tag when available.

        Isometric permutations preserve Lipschitz constants and inner
        actions by Dirac-commuting unitaries preserve the commutator
        seminorm, so those profiles are constant by construction.
        """
        tag = "sampled"
        if self.kind == "trivial":
            tag = "trivial"
        elif self.kind == "permutation":
            tag = "isometric"
        elif self.kind == "inner":
            if all(spectral_norm(u @ self.triple.dirac - self.triple.dirac @ u) <= 1e-12
                   for u in self.unitaries):
                tag = "dirac-commuting"
        values = [(int(r), self.equicontinuity_sup(a, r)) for r in radii]
        return {"profile": values, "tag": tag}


def trivial_action(model: GroupModel, triple: FiniteSpectralTriple) -> GroupAction:
    return GroupAction(model, triple, "trivial")


def permutation_action(model: GroupModel, triple: FiniteMetricTriple,
                       permutation: Sequence[int], weights: Sequence[int] | None = None) -> GroupAction:
    return GroupAction(model, triple, "permutation", permutation=permutation, weights=weights)


def inner_action(model: GroupModel, triple: FiniteSpectralTriple,
                 unitaries: Sequence[np.ndarray]) -> GroupAction:
    return GroupAction(model, triple, "inner", unitaries=unitaries)


# ---------------------------------------------------------------------------
# operator systems
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OperatorSystemSpec:
    """Unital *-invariant subspace of the base algebra, given by a basis."""

    basis: tuple[np.ndarray, ...]
    action_invariant: bool = False

    def _rank(self, stack: np.ndarray, tol: float = 1e-9) -> int:
        if stack.size == 0:
            return 0
        s = np.linalg.svd(stack, compute_uv=False)
        return int(np.sum(s > tol * s[0])) if s.size else 0

    def validate(self, triple: FiniteSpectralTriple, action: GroupAction | None = None) -> dict:
        stack = np.stack([b.reshape(-1) for b in self.basis])
        rank = self._rank(stack)
        with_unit = np.vstack([stack, triple.unit().reshape(1, -1)])
        contains_unit = self._rank(with_unit) == rank
        with_adj = np.vstack([stack] + [b.conj().T.reshape(1, -1) for b in self.basis])
        star_closed = self._rank(with_adj) == rank
        invariant = None
        if self.action_invariant and action is not None:
            invariant = True
            for s in action.model.generators:
                moved = np.vstack([stack] + [action.apply(s, b).reshape(1, -1) for b in self.basis])
                invariant = invariant and self._rank(moved) == rank
        return {
            "dimension": rank,
            "contains_unit": contains_unit,
            "star_closed": star_closed,
            "action_invariant": invariant,
            "pass": contains_unit and star_closed and (invariant in (None, True)),
        }
