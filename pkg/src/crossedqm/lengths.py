"""Matrix-valued length functions on discrete groups.

A length function assigns to every group element a selfadjoint ``n x n``
matrix that vanishes exactly at the identity and whose difference maps

    ``phi_g(s) = l(s) - l(g^{-1} s)``

stay bounded in ``s``.  Even-parity lengths additionally carry a grading:
a selfadjoint unitary anticommuting with every value.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Mapping

import numpy as np

from .errors import ValidationError
from .groups import GroupElement, GroupModel
from .linalg import hermitian_defect, smallest_singular_value, spectral_norm


@dataclass(frozen=True)
class MatrixLengthFunction:
    """Length function ``g -> M_n(C)`` with parity and optional grading."""

    model: GroupModel
    n: int
    eval_fn: Callable[[GroupElement], np.ndarray]
    parity: int
    grading: np.ndarray | None = None
    name: str = "length"

    def __post_init__(self):
        if self.parity not in (0, 1):
            raise ValidationError("parity must be 0 or 1")
        if self.parity == 0:
            if self.grading is None:
                raise ValidationError("even-parity length requires a grading matrix")
            g = np.asarray(self.grading)
            if g.shape != (self.n, self.n):
                raise ValidationError("grading has wrong shape")
            if hermitian_defect(g) > 1e-12 or spectral_norm(g @ g - np.eye(self.n)) > 1e-12:
                raise ValidationError("grading must be a selfadjoint unitary")
        elif self.grading is not None:
            raise ValidationError("odd-parity length must not carry a grading")

    def __call__(self, g: GroupElement) -> np.ndarray:
        self.model.check_member(g)
        return self.eval_fn(g)

    def phi(self, g: GroupElement, s: GroupElement) -> np.ndarray:
        """Difference map ``l(s) - l(g^{-1} s)``."""
        g_inv_s = self.model.multiply(self.model.invert(g), s)
        return self(s) - self(g_inv_s)

    def phi_sup(self, g: GroupElement, radius: int) -> float:
        """Max spectral norm of ``phi(g, .)`` over the ball of that radius."""
        ball = self.model.ball(radius)
        return max(spectral_norm(self.phi(g, s)) for s in ball)

    def properness_profile(self, r_max: int) -> list[tuple[int, float]]:
        """Per-radius minima of the smallest singular value on word spheres.

        A divergent profile over the computed range is the finite
        diagnostic for properness; for finite groups it simply
        stabilises.
        """
        if r_max < 1:
            raise ValidationError("r_max must be at least 1")
        profile = []
        for r in range(1, r_max + 1):
            sphere = self.model.sphere(r)
            if not sphere:
                break
            profile.append((r, min(smallest_singular_value(self(s)) for s in sphere)))
        return profile


def word_length_function(model: GroupModel) -> MatrixLengthFunction:
    """Scalar (1x1) length from the BFS word metric; parity 1."""

    def ev(g: GroupElement) -> np.ndarray:
        return np.array([[float(model.word_length(g))]], dtype=complex)

    return MatrixLengthFunction(model, 1, ev, parity=1, name="word")


_TORUS_GRADING = np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex)


def torus_length(model: GroupModel) -> MatrixLengthFunction:
    """The graded 2x2 length on Z^2 whose Dirac truncations carry the
    classical two-torus spectrum: off-diagonal entries ``a + ib`` and
    ``a - ib`` at coordinates ``(a, b)``, graded by ``diag(1, -1)``."""
    if model.family != "z" or model.params != (2,):
        raise ValidationError("torus length is defined on Z^2")

    def ev(g: GroupElement) -> np.ndarray:
        a, b = g.coords
        return np.array([[0.0, a + 1j * b], [a - 1j * b, 0.0]], dtype=complex)

    return MatrixLengthFunction(model, 2, ev, parity=0, grading=_TORUS_GRADING, name="torus_z2")


def tabulated_length(
    model: GroupModel,
    table: Mapping[tuple[int, ...], np.ndarray],
    parity: int = 1,
    grading: np.ndarray | None = None,
    name: str = "tabulated",
) -> MatrixLengthFunction:
    """Length given by an explicit coordinate table.

    Lookups outside the table raise; axiom checks therefore only ever
    cover the tabulated region.
    """
    if not table:
        raise ValidationError("tabulated length requires at least the identity entry")
    mats = {tuple(int(c) for c in k): np.asarray(v, dtype=complex) for k, v in table.items()}
    sizes = {m.shape for m in mats.values()}
    if len(sizes) != 1 or any(a != b for a, b in sizes):
        raise ValidationError("tabulated values must be square matrices of one size")
    n = next(iter(sizes))[0]

    def ev(g: GroupElement) -> np.ndarray:
        try:
            return mats[g.coords]
        except KeyError:
            raise ValidationError(f"length not tabulated at {g.coords}") from None

    return MatrixLengthFunction(model, n, ev, parity=parity, grading=grading, name=name)


def load_tabulated_length(model: GroupModel, path: str | Path, **kwargs) -> MatrixLengthFunction:
    """Read a JSON table ``{"a,b": [[re, im], ...row-major...]}``.

    Each matrix is a row-major list of ``[re, im]`` pairs.
    """
    raw = json.loads(Path(path).read_text())
    table = {}
    for key, flat in raw.items():
        coords = tuple(int(c) for c in key.split(","))
        entries = [complex(re, im) for re, im in flat]
        n = round(len(entries) ** 0.5)
        if n * n != len(entries):
            raise ValidationError(f"entry {key!r} is not a square matrix")
        table[coords] = np.array(entries, dtype=complex).reshape(n, n)
    return tabulated_length(model, table, **kwargs)


def check_length_axioms(length: MatrixLengthFunction, ball, tol: float = 1e-12) -> dict:
    """Finite-ball audit of the defining axioms.

    Checks selfadjointness, vanishing exactly at the identity, and (if
    graded) the anticommutation with the grading, over the given ball.
    Returns a report dict; raises nothing.
    """
    model = length.model
    ident = model.identity()
    worst_sa = 0.0
    worst_anti = 0.0
    vanishing_ok = True
    for g in ball:
        val = length(g)
        worst_sa = max(worst_sa, hermitian_defect(val))
        norm = spectral_norm(val)
        if g == ident:
            vanishing_ok = vanishing_ok and norm == 0.0
        else:
            vanishing_ok = vanishing_ok and norm > tol
        if length.grading is not None:
            anti = length.grading @ val + val @ length.grading
            worst_anti = max(worst_anti, float(np.max(np.abs(anti))) if anti.size else 0.0)
    return {
        "radius": getattr(ball, "radius", None),
        "selfadjoint_defect": worst_sa,
        "vanishes_only_at_identity": vanishing_ok,
        "grading_anticommutator": worst_anti if length.grading is not None else None,
        "pass": worst_sa <= tol and vanishing_ok and worst_anti <= tol,
    }
