"""Countable discrete groups of polynomial growth with word metrics.

Three families are provided, each with an integer normal form:

* ``free_abelian(d)`` -- Z^d with componentwise addition,
* ``heisenberg3()``   -- the discrete Heisenberg group on upper-triangular
  coordinates ``(a, b, c)`` with product
  ``(a, b, c)(a', b', c') = (a + a', b + b', c + c' + a*b')``,
* ``finite_cyclic(m)`` -- Z/mZ on residues ``0..m-1``.

Word lengths come from a finite symmetric generating set via breadth-first
search on the Cayley graph; balls are enumerated deterministically (BFS
layer, then lexicographic coordinates) so that every matrix truncation
built on top of them is reproducible bit for bit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .errors import BallSizeError, ModelMismatchError, ValidationError

DEFAULT_BALL_CAP = 200_000


@dataclass(frozen=True)
class GroupElement:
    """Group element in normal form: integer coordinates plus the signature
    of the model it belongs to."""

    coords: tuple[int, ...]
    signature: tuple

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"g{self.coords}"


@dataclass(frozen=True)
class ElementSet:
    """Ordered finite set of group elements with a position lookup.

    Used both for word-metric balls and for arbitrary finite subsets
    (e.g. one-sided intervals used as averaging sets).
    """

    elements: tuple[GroupElement, ...]
    index: Mapping[GroupElement, int] = field(repr=False)

    @staticmethod
    def of(elements: Iterable[GroupElement]) -> "ElementSet":
        elems = tuple(elements)
        idx = {g: i for i, g in enumerate(elems)}
        if len(idx) != len(elems):
            raise ValidationError("element set contains duplicates")
        return ElementSet(elems, idx)

    def __len__(self) -> int:
        return len(self.elements)

    def __contains__(self, g: GroupElement) -> bool:
        return g in self.index

    def __iter__(self):
        return iter(self.elements)


@dataclass(frozen=True)
class Ball(ElementSet):
    """Word-metric ball of a given radius, ordered by (layer, coords)."""

    radius: int = 0


class GroupModel:
    """A finitely generated group with fixed generators and BFS machinery.

    Instances are immutable apart from internal BFS memoisation, which is
    append-only; all public operations are pure and safe to share across
    threads.
    """

    def __init__(
        self,
        family: str,
        params: tuple,
        generators: Sequence[tuple[int, ...]] | None = None,
        ball_cap: int = DEFAULT_BALL_CAP,
    ):
        if family not in ("z", "heisenberg3", "cyclic"):
            raise ValidationError(f"unknown group family: {family!r}")
        self.family = family
        self.params = params
        self.signature = (family,) + params
        self.ball_cap = int(ball_cap)
        gens = tuple(generators) if generators is not None else self._default_generators()
        self.generators = tuple(self._wrap(c) for c in gens)
        self._validate_generators()
        # BFS state: layers[r] = sorted tuple of elements at word length r
        self._layers: list[tuple[GroupElement, ...]] = [(self.identity(),)]
        self._word_length: dict[GroupElement, int] = {self.identity(): 0}
        self._seen_count = 1
        self._exhausted = False  # finite groups: BFS closed

    # -- normal forms -------------------------------------------------

    def _arity(self) -> int:
        if self.family == "z":
            return self.params[0]
        if self.family == "heisenberg3":
            return 3
        return 1

    def _default_generators(self) -> tuple[tuple[int, ...], ...]:
        if self.family == "z":
            d = self.params[0]
            gens = []
            for i in range(d):
                e = [0] * d
                e[i] = 1
                gens.append(tuple(e))
                e2 = list(e)
                e2[i] = -1
                gens.append(tuple(e2))
            return tuple(gens)
        if self.family == "heisenberg3":
            return ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0))
        m = self.params[0]
        if m == 1:
            raise ValidationError("cyclic group of order 1 has no generators")
        if m == 2:
            return ((1,),)
        return ((1,), (m - 1,))

    def _normalize(self, coords: Sequence[int]) -> tuple[int, ...]:
        coords = tuple(int(c) for c in coords)
        if len(coords) != self._arity():
            raise ValidationError(
                f"{self.family} expects {self._arity()} coordinates, got {len(coords)}"
            )
        if self.family == "cyclic":
            m = self.params[0]
            return (coords[0] % m,)
        return coords

    def _wrap(self, coords: Sequence[int]) -> GroupElement:
        return GroupElement(self._normalize(coords), self.signature)

    def element(self, coords: Sequence[int]) -> GroupElement:
        """Element from raw coordinates, reduced to normal form."""
        return self._wrap(coords)

    def _validate_generators(self) -> None:
        if not self.generators:
            raise ValidationError("generator list is empty")
        gen_set = set(self.generators)
        ident = self.identity()
        if ident in gen_set:
            raise ValidationError("identity is not allowed as a generator")
        for g in self.generators:
            if self.invert(g) not in gen_set:
                raise ValidationError(f"generator set is not inverse-closed at {g.coords}")

    # -- arithmetic ----------------------------------------------------

    def check_member(self, g: GroupElement) -> None:
        if g.signature != self.signature:
            raise ModelMismatchError(
                f"element of model {g.signature} used with model {self.signature}"
            )

    def identity(self) -> GroupElement:
        return GroupElement((0,) * self._arity(), self.signature)

    def multiply(self, g: GroupElement, h: GroupElement) -> GroupElement:
        self.check_member(g)
        self.check_member(h)
        a, b = g.coords, h.coords
        if self.family == "z":
            return GroupElement(tuple(x + y for x, y in zip(a, b)), self.signature)
        if self.family == "heisenberg3":
            return GroupElement(
                (a[0] + b[0], a[1] + b[1], a[2] + b[2] + a[0] * b[1]), self.signature
            )
        m = self.params[0]
        return GroupElement(((a[0] + b[0]) % m,), self.signature)

    def invert(self, g: GroupElement) -> GroupElement:
        self.check_member(g)
        a = g.coords
        if self.family == "z":
            return GroupElement(tuple(-x for x in a), self.signature)
        if self.family == "heisenberg3":
            return GroupElement((-a[0], -a[1], -a[2] + a[0] * a[1]), self.signature)
        m = self.params[0]
        return GroupElement(((-a[0]) % m,), self.signature)

    # -- BFS / word metric ---------------------------------------------

    def _grow_one_layer(self) -> bool:
        """Extend BFS by one layer; returns False once the group is closed."""
        if self._exhausted:
            return False
        frontier = self._layers[-1]
        r_next = len(self._layers)
        fresh = set()
        for g in frontier:
            for s in self.generators:
                h = self.multiply(g, s)
                if h not in self._word_length:
                    fresh.add(h)
        if not fresh:
            self._exhausted = True
            return False
        if self._seen_count + len(fresh) > self.ball_cap:
            raise BallSizeError(
                f"ball of radius {r_next} exceeds cap of {self.ball_cap} elements"
            )
        layer = tuple(sorted(fresh, key=lambda e: e.coords))
        for h in layer:
            self._word_length[h] = r_next
        self._layers.append(layer)
        self._seen_count += len(layer)
        return True

    def _grow_to_radius(self, r: int) -> None:
        while len(self._layers) <= r:
            if not self._grow_one_layer():
                return

    def word_length(self, g: GroupElement) -> int:
        """Length of the shortest generator word equal to ``g`` (BFS)."""
        self.check_member(g)
        while g not in self._word_length:
            if not self._grow_one_layer():
                raise ValidationError(
                    f"element {g.coords} is not generated by the declared generators"
                )
        return self._word_length[g]

    def sphere(self, r: int) -> tuple[GroupElement, ...]:
        """Elements of word length exactly ``r`` (empty beyond a finite group)."""
        if r < 0:
            raise ValidationError("radius must be nonnegative")
        self._grow_to_radius(r)
        if r >= len(self._layers):
            return ()
        return self._layers[r]

    def ball(self, r: int) -> Ball:
        """Word-metric ball of radius ``r`` with deterministic ordering."""
        if r < 0:
            raise ValidationError("radius must be nonnegative")
        self._grow_to_radius(r)
        elems: list[GroupElement] = []
        for layer in self._layers[: r + 1]:
            elems.extend(layer)
        idx = {g: i for i, g in enumerate(elems)}
        return Ball(tuple(elems), idx, r)

    def is_finite(self) -> bool:
        return self.family == "cyclic"


def folner_overlap(model: GroupModel, F: ElementSet, g: GroupElement) -> Fraction:
    """Exact overlap ratio ``|F intersect gF| / |F|``.

    An element ``t`` lies in ``F intersect gF`` iff ``t in F`` and
    ``g^{-1} t in F``; both memberships are index lookups.
    """
    if len(F) == 0:
        raise ValidationError("overlap ratio of an empty set is undefined")
    g_inv = model.invert(g)
    count = sum(1 for t in F if model.multiply(g_inv, t) in F)
    return Fraction(count, len(F))


def difference_set(model: GroupModel, F: ElementSet) -> ElementSet:
    """The symmetric set ``F F^{-1}`` containing the identity, ordered by
    coordinates; supports of Berezin images land inside it."""
    seen = {model.multiply(s, model.invert(t)) for s in F for t in F}
    return ElementSet.of(sorted(seen, key=lambda g: g.coords))


def free_abelian(rank: int, generators=None, ball_cap: int = DEFAULT_BALL_CAP) -> GroupModel:
    if rank < 1:
        raise ValidationError("rank must be at least 1")
    return GroupModel("z", (int(rank),), generators, ball_cap)


def heisenberg3(generators=None, ball_cap: int = DEFAULT_BALL_CAP) -> GroupModel:
    return GroupModel("heisenberg3", (), generators, ball_cap)


def finite_cyclic(order: int, generators=None, ball_cap: int = DEFAULT_BALL_CAP) -> GroupModel:
    if order < 2:
        raise ValidationError("cyclic order must be at least 2")
    return GroupModel("cyclic", (int(order),), generators, ball_cap)
