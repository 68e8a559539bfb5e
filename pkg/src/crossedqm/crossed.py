"""The algebraic crossed product of a finite base triple by a group model.

Elements are finitely supported maps from the group into the base algebra,
multiplied through the covariance rule: a generator ``pi(x) lam_g`` acts on
the module of square-summable algebra-valued sequences by

    ``(pi(x) lam_g xi)(t) = alpha_t^{-1}(x) xi(g^{-1} t)``.

Truncating to a word-metric ball gives a dense matrix (a pure compression,
never a periodisation), so per-radius operator norms are monotone lower
bounds of the true reduced norm.
"""

from __future__ import annotations

import weakref
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .errors import ModelMismatchError, ValidationError
from .groups import Ball, GroupElement, GroupModel
from .base import FiniteSpectralTriple, GroupAction, scalar_triple, trivial_action
from .linalg import spectral_norm


@dataclass(frozen=True)
class TruncatedOperator:
    """Dense compression of a crossed-product operator to a ball.

    ``site_dim`` is the per-site fibre dimension (``m`` for plain
    elements, ``n*m`` once a matrix-length leg is present).
    """

    ball: Ball
    matrix: np.ndarray
    site_dim: int
    provenance: str

    def norm(self, tol: float = 1e-10, seed: int = 0) -> float:
        return spectral_norm(self.matrix, tol, seed)


@dataclass(frozen=True)
class SeminormReport:
    """Value of a truncation-based seminorm together with its radius trace."""

    value: float
    converged: bool
    trace: tuple[tuple[int, float], ...]
    tol: float
    name: str = ""

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "converged": self.converged,
            "trace": [[r, v] for r, v in self.trace],
        }


class CrossedProduct:
    """Bundles a group model, a base triple and an action of the former on
    the latter; the factory for crossed-product elements."""

    def __init__(self, group: GroupModel, triple: FiniteSpectralTriple, action: GroupAction):
        if action.model is not group or action.triple is not triple:
            raise ValidationError("action must connect exactly this group and triple")
        self.group = group
        self.triple = triple
        self.action = action

    _scalar_cache: "weakref.WeakKeyDictionary[GroupModel, CrossedProduct]" = weakref.WeakKeyDictionary()

    @classmethod
    def scalars(cls, group: GroupModel) -> "CrossedProduct":
        """The group algebra: trivial one-dimensional base.

        Cached per group model so that scalar elements produced by
        different operations remain combinable.
        """
        ctx = cls._scalar_cache.get(group)
        if ctx is None:
            triple = scalar_triple()
            ctx = CrossedProduct(group, triple, trivial_action(group, triple))
            cls._scalar_cache[group] = ctx
        return ctx

    # -- element construction -------------------------------------------

    def element(self, terms: Mapping[GroupElement, np.ndarray]) -> "CrossedElement":
        clean: dict[GroupElement, np.ndarray] = {}
        m = self.triple.dim
        for g, x in terms.items():
            self.group.check_member(g)
            x = np.asarray(x, dtype=complex)
            if np.isscalar(terms[g]) or x.shape == ():
                x = complex(terms[g]) * np.eye(m, dtype=complex)
            if x.shape != (m, m):
                raise ValidationError(f"coefficient at {g.coords} has wrong shape")
            if np.any(x != 0):
                clean[g] = x
        return CrossedElement(self, clean)

    def zero(self) -> "CrossedElement":
        return CrossedElement(self, {})

    def unit(self) -> "CrossedElement":
        return self.element({self.group.identity(): self.triple.unit()})

    def lam(self, g: GroupElement) -> "CrossedElement":
        """The canonical unitary attached to a group element."""
        return self.element({g: self.triple.unit()})

    def embed(self, x: np.ndarray) -> "CrossedElement":
        """The base algebra sitting at the identity."""
        return self.element({self.group.identity(): np.asarray(x, dtype=complex)})

    def random_element(self, rng: np.random.Generator, support_radius: int,
                       terms: int = 3, hermitian_coeffs: bool = False) -> "CrossedElement":
        """Seeded random element with support in the given ball."""
        ball = self.group.ball(support_radius)
        count = min(terms, len(ball))
        picks = rng.choice(len(ball), size=count, replace=False)
        data = {}
        for i in sorted(int(p) for p in picks):
            data[ball.elements[i]] = self.triple.random_element(rng, hermitian=hermitian_coeffs)
        return self.element(data)

    def element_from_json(self, payload: Sequence[dict]) -> "CrossedElement":
        """Inverse of ``CrossedElement.to_json``."""
        m = self.triple.dim
        data = {}
        for term in payload:
            g = self.group.element(tuple(term["coords"]))
            entries = [complex(re, im) for re, im in term["matrix"]]
            if len(entries) != m * m:
                raise ValidationError("serialized coefficient has wrong size")
            data[g] = np.array(entries, dtype=complex).reshape(m, m)
        return self.element(data)


class CrossedElement:
    """Finitely supported ``sum_g pi(x_g) lam_g``; immutable."""

    def __init__(self, ctx: CrossedProduct, terms: dict[GroupElement, np.ndarray]):
        self.ctx = ctx
        self._terms = dict(terms)
        self.support = tuple(sorted(self._terms, key=lambda g: g.coords))

    def coefficient(self, g: GroupElement) -> np.ndarray:
        """Slice map: the coefficient at ``g`` (zero matrix off-support)."""
        self.ctx.group.check_member(g)
        m = self.ctx.triple.dim
        return self._terms.get(g, np.zeros((m, m), dtype=complex)).copy()

    def expectation(self) -> np.ndarray:
        """Coefficient at the identity (conditional expectation onto the base)."""
        return self.coefficient(self.ctx.group.identity())

    def support_radius(self) -> int:
        if not self.support:
            return 0
        return max(self.ctx.group.word_length(g) for g in self.support)

    def is_scalar(self, tol: float = 0.0) -> bool:
        """True if every coefficient is a multiple of the unit."""
        m = self.ctx.triple.dim
        eye = np.eye(m)
        for x in self._terms.values():
            c = np.trace(x) / m
            if np.max(np.abs(x - c * eye)) > tol:
                return False
        return True

    def scalar_coefficients(self) -> dict[GroupElement, complex]:
        m = self.ctx.triple.dim
        return {g: complex(np.trace(x) / m) for g, x in self._terms.items()}

    # -- *-algebra structure --------------------------------------------

    def _check_same(self, other: "CrossedElement") -> None:
        if self.ctx is not other.ctx:
            if (self.ctx.group.signature != other.ctx.group.signature
                    or self.ctx.triple is not other.ctx.triple
                    or self.ctx.action is not other.ctx.action):
                raise ModelMismatchError("elements live over different crossed products")

    def __add__(self, other: "CrossedElement") -> "CrossedElement":
        self._check_same(other)
        data = {g: x.copy() for g, x in self._terms.items()}
        for g, y in other._terms.items():
            data[g] = data.get(g, 0) + y
        return self.ctx.element(data)

    def __sub__(self, other: "CrossedElement") -> "CrossedElement":
        return self + (-1.0) * other

    def __rmul__(self, scalar: complex) -> "CrossedElement":
        return self.ctx.element({g: scalar * x for g, x in self._terms.items()})

    def __mul__(self, other):
        if not isinstance(other, CrossedElement):
            return self.ctx.element({g: other * x for g, x in self._terms.items()})
        self._check_same(other)
        mul = self.ctx.group.multiply
        act = self.ctx.action.apply
        data: dict[GroupElement, np.ndarray] = {}
        for g, x in self._terms.items():
            for h, y in other._terms.items():
                k = mul(g, h)
                contrib = x @ act(g, y)
                data[k] = data.get(k, 0) + contrib
        return self.ctx.element(data)

    def adjoint(self) -> "CrossedElement":
        """Involution: the coefficient at ``h`` becomes ``alpha_h(x_{h^{-1}}^*)``."""
        inv = self.ctx.group.invert
        act = self.ctx.action.apply
        data = {}
        for g, x in self._terms.items():
            h = inv(g)
            data[h] = act(h, x.conj().T)
        return self.ctx.element(data)

    # -- truncated covariant representation ------------------------------

    def truncated_matrix(self, radius: int) -> TruncatedOperator:
        """Compression to the ball: block ``(t, s)`` is ``alpha_t^{-1}(x_g)``
        whenever ``t = g s`` and both sites lie in the ball."""
        ball = self.ctx.group.ball(radius)
        m = self.ctx.triple.dim
        dim = len(ball) * m
        out = np.zeros((dim, dim), dtype=complex)
        mul = self.ctx.group.multiply
        inv = self.ctx.group.invert
        act = self.ctx.action.apply
        for g, x in self._terms.items():
            twisted: dict[GroupElement, np.ndarray] = {}
            for j, s in enumerate(ball.elements):
                t = mul(g, s)
                i = ball.index.get(t)
                if i is None:
                    continue
                if t not in twisted:
                    twisted[t] = act(inv(t), x)
                out[i * m:(i + 1) * m, j * m:(j + 1) * m] += twisted[t]
        return TruncatedOperator(ball, out, m, "covariant")

    def operator_norm(self, schedule: Sequence[int], tol: float = 1e-8,
                      seed: int = 0) -> SeminormReport:
        """Per-radius compressions of the element itself."""
        return norm_schedule(lambda r: self.truncated_matrix(r).matrix, schedule,
                             tol=tol, seed=seed, name="operator_norm")

    def to_json(self) -> list[dict]:
        """Support list with row-major ``[re, im]`` coefficient entries."""
        out = []
        for g in self.support:
            flat = self._terms[g].reshape(-1)
            out.append({
                "coords": list(g.coords),
                "matrix": [[float(c.real), float(c.imag)] for c in flat],
            })
        return out

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"CrossedElement(support={[g.coords for g in self.support]})"


def norm_schedule(matrix_at, schedule: Sequence[int], tol: float = 1e-8,
                  seed: int = 0, name: str = "") -> SeminormReport:
    """Run ``spectral_norm`` over a strictly increasing radius schedule.

    The final value is flagged as converged when the last two radii agree
    to a relative change below ``tol``.
    """
    radii = [int(r) for r in schedule]
    if not radii or any(b <= a for a, b in zip(radii, radii[1:])):
        raise ValidationError("schedule must be a nonempty strictly increasing radius list")
    trace = []
    for r in radii:
        trace.append((r, spectral_norm(matrix_at(r), 1e-12, seed)))
    value = trace[-1][1]
    converged = False
    if len(trace) >= 2:
        prev = trace[-2][1]
        converged = abs(value - prev) <= tol * max(value, np.finfo(float).tiny)
    return SeminormReport(value=value, converged=converged, trace=tuple(trace), tol=tol, name=name)
