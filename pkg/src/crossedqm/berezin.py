"""States, the Berezin transform, approximation inequalities and
Monge-Kantorovic distance estimation.

The Berezin transform attached to a finite set ``F`` damps the coefficient
at ``g`` by the exact overlap ratio ``c_g = |F intersect gF| / |F|``; it is
unital, positive, and never increases the vertical seminorm -- at every
truncation radius, because the damping acts on the assembled commutator as
a Schur multiplier with a positive semidefinite unit-diagonal symbol
(the Gram matrix of translated averaging vectors), and Schur multiplication
commutes with corner compression.

Distances between states on a seminormed system are bracketed from two
sides: a feasible-point lower bound found by supergradient ascent on the
homogeneous ratio, and a closed-form Cauchy-Schwarz upper surrogate for
the averaging-versus-counit distance on the scalar sector, valid because
evaluating the assembled commutator on the identity-site vector gives
orthogonal site components.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import DegenerateSeminormError, ValidationError
from .groups import ElementSet, GroupElement, GroupModel, folner_overlap
from .crossed import CrossedElement, CrossedProduct
from .base import FiniteMetricTriple, FiniteSpectralTriple
from .lengths import MatrixLengthFunction
from .linalg import hermitian_eigs, smallest_singular_value, spectral_norm
from .seminorms import d_vertical, vertical_seminorm

# ---------------------------------------------------------------------------
# states
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalarState:
    """State on the group algebra: counit, trace, or averaging over a set.

    Evaluates scalar-coefficient elements exactly; averaging weights are
    exact rationals.
    """

    kind: str
    model: GroupModel
    subset: ElementSet | None = None

    def weight(self, g: GroupElement) -> Fraction:
        if self.kind == "counit":
            return Fraction(1)
        if self.kind == "trace":
            return Fraction(1) if g == self.model.identity() else Fraction(0)
        return folner_overlap(self.model, self.subset, g)

    def __call__(self, z: CrossedElement) -> complex:
        if z.ctx.triple.dim != 1:
            raise ValidationError("scalar states evaluate scalar-coefficient elements only")
        total = 0j
        for g, c in z.scalar_coefficients().items():
            total += complex(float(self.weight(g))) * c
        return total


def counit(model: GroupModel) -> ScalarState:
    return ScalarState("counit", model)


def trace_state(model: GroupModel) -> ScalarState:
    return ScalarState("trace", model)


def averaging_state(model: GroupModel, F: ElementSet) -> ScalarState:
    if len(F) == 0:
        raise ValidationError("averaging set must be nonempty")
    return ScalarState("folner", model, F)


class VectorFunctional:
    """Contractive functional ``w -> <zeta, trunc(w, radius) zeta'>``.

    Both vectors must be unit vectors on the truncation space; the
    functional is then a compression of a vector functional of the full
    representation, hence genuinely contractive.  With ``zeta' = zeta``
    it is a state.
    """

    def __init__(self, ctx: CrossedProduct, zeta: np.ndarray, radius: int,
                 zeta_prime: np.ndarray | None = None):
        self.ctx = ctx
        self.radius = int(radius)
        dim = len(ctx.group.ball(self.radius)) * ctx.triple.dim
        zeta = np.asarray(zeta, dtype=complex).reshape(-1)
        zp = zeta if zeta_prime is None else np.asarray(zeta_prime, dtype=complex).reshape(-1)
        if zeta.shape != (dim,) or zp.shape != (dim,):
            raise ValidationError(f"vectors must have length {dim} for radius {self.radius}")
        for v in (zeta, zp):
            if abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValidationError("functional vectors must be unit vectors")
        self.zeta = zeta
        self.zeta_prime = zp

    def __call__(self, z: CrossedElement) -> complex:
        mat = z.truncated_matrix(self.radius).matrix
        return complex(np.vdot(self.zeta, mat @ self.zeta_prime))

    @staticmethod
    def random(ctx: CrossedProduct, radius: int, rng: np.random.Generator,
               state: bool = False) -> "VectorFunctional":
        dim = len(ctx.group.ball(radius)) * ctx.triple.dim
        zeta = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        zeta = zeta / np.linalg.norm(zeta)
        if state:
            return VectorFunctional(ctx, zeta, radius)
        zp = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
        zp = zp / np.linalg.norm(zp)
        return VectorFunctional(ctx, zeta, radius, zp)


def coaction_slice(eta: VectorFunctional, z: CrossedElement) -> CrossedElement:
    """Scalar-coefficient element with coefficient ``eta(pi(x_g) lam_g)``
    at ``g``: the functional applied on the left leg of the coaction."""
    scalars = CrossedProduct.scalars(z.ctx.group)
    coeffs = {}
    for g in z.support:
        term = z.ctx.element({g: z.coefficient(g)})
        coeffs[g] = np.array([[eta(term)]], dtype=complex)
    return scalars.element(coeffs)


# ---------------------------------------------------------------------------
# Berezin transform
# ---------------------------------------------------------------------------


def chi_coefficient(model: GroupModel, F: ElementSet, g: GroupElement) -> Fraction:
    """Exact coefficient ``|F intersect gF| / |F|``; equals the vector-state
    value of ``lam_g`` at the normalised averaging vector over ``F``."""
    return folner_overlap(model, F, g)


def averaging_vector(model: GroupModel, F: ElementSet, radius: int) -> np.ndarray:
    """Normalised indicator of ``F`` on the ball-truncation space (scalar
    fibre); ``F`` must sit inside the ball."""
    ball = model.ball(radius)
    vec = np.zeros(len(ball), dtype=complex)
    for s in F:
        idx = ball.index.get(s)
        if idx is None:
            raise ValidationError("averaging set does not fit in the truncation ball")
        vec[idx] = 1.0
    return vec / np.sqrt(len(F))


def berezin(F: ElementSet, z: CrossedElement) -> CrossedElement:
    """Coefficientwise damping by the exact overlap ratios."""
    model = z.ctx.group
    data = {}
    for g in z.support:
        c = folner_overlap(model, F, g)
        if c != 0:
            data[g] = float(c) * z.coefficient(g)
    return z.ctx.element(data)


def berezin_contraction_check(F: ElementSet, z: CrossedElement, length: MatrixLengthFunction,
                              radius: int, slack: float = 1e-10, seed: int = 0) -> dict:
    """Same-radius comparison of the vertical seminorm before and after
    the transform; holds per radius by the Schur-multiplier structure."""
    lhs = spectral_norm(d_vertical(berezin(F, z), length, radius).matrix, 1e-12, seed)
    rhs = spectral_norm(d_vertical(z, length, radius).matrix, 1e-12, seed)
    return {"check": "berezin-contraction", "lhs": lhs, "rhs": rhs,
            "radius": int(radius), "slack": slack, "pass": lhs <= rhs + slack}


def berezin_positivity_check(F: ElementSet, w: CrossedElement, radius: int,
                             slack: float = 1e-9) -> dict:
    """Minimum truncation eigenvalue of the transform of ``w* w``."""
    z = w.adjoint() * w
    mat = berezin(F, z).truncated_matrix(radius).matrix
    eigs = hermitian_eigs(mat, tol=1e-9)
    min_eig = float(eigs[0]) if eigs.size else 0.0
    return {"check": "berezin-positivity", "min_eigenvalue": min_eig,
            "radius": int(radius), "slack": slack, "pass": min_eig >= -slack}


def slice_contraction_check(eta: VectorFunctional, z: CrossedElement,
                            length: MatrixLengthFunction, radius: int,
                            converged_radius: int, slack: float = 1e-6,
                            seed: int = 0) -> dict:
    """Vertical seminorm of the slice against the vertical seminorm of the
    element; the right-hand side is evaluated at a larger radius and
    escalated once if the comparison fails."""
    sliced = coaction_slice(eta, z)
    lhs = spectral_norm(d_vertical(sliced, length, radius).matrix, 1e-12, seed)
    rhs_radius = int(converged_radius)
    rhs = spectral_norm(d_vertical(z, length, rhs_radius).matrix, 1e-12, seed)
    escalated = False
    if lhs > rhs + slack:
        rhs_radius += 2
        rhs = spectral_norm(d_vertical(z, length, rhs_radius).matrix, 1e-12, seed)
        escalated = True
    return {"check": "slice-contraction", "lhs": lhs, "rhs": rhs,
            "radius": int(radius), "rhs_radius": rhs_radius,
            "escalated": escalated, "slack": slack, "pass": lhs <= rhs + slack}


def approximation_identity_check(eta: VectorFunctional, F: ElementSet,
                                 z: CrossedElement, tol: float = 1e-10) -> dict:
    """Exact identity between the functional applied to the transform
    defect and the weight defect applied to the slice:

        ``eta(beta_F(z) - z) = (chi_F - counit)(slice)``.
    """
    model = z.ctx.group
    lhs = eta(berezin(F, z) - z)
    sliced = coaction_slice(eta, z)
    chi = averaging_state(model, F)
    eps = counit(model)
    rhs = chi(sliced) - eps(sliced)
    diff = abs(lhs - rhs)
    return {"check": "approximation-identity", "lhs_re": lhs.real, "lhs_im": lhs.imag,
            "rhs_re": rhs.real, "rhs_im": rhs.imag, "difference": diff,
            "slack": tol, "pass": diff <= tol}


# ---------------------------------------------------------------------------
# distance surrogates
# ---------------------------------------------------------------------------


def restricted_distance_upper(length: MatrixLengthFunction, r: int,
                              F: ElementSet | None = None) -> float:
    """Closed-form upper surrogate for the averaging-vs-counit distance on
    scalar elements supported in the radius-``r`` ball.

    ``sqrt(sum_{g != e} (1 - c_g)^2 / sigma_min(l(g))^2)`` with ``c_g`` the
    overlap ratios (``F = None`` means the trace state, all ``c_g = 0``).
    Requires every length value on the punctured ball to be invertible.
    """
    model = length.model
    ball = model.ball(r)
    ident = model.identity()
    total = 0.0
    for g in ball:
        if g == ident:
            continue
        smin = smallest_singular_value(length(g))
        if smin <= 0.0:
            raise ValidationError(f"length value at {g.coords} is singular inside the ball")
        c = Fraction(0) if F is None else folner_overlap(model, F, g)
        total += float(1 - c) ** 2 / smin ** 2
    return float(np.sqrt(total))


def approximation_bound_check(F: ElementSet, z: CrossedElement,
                              length: MatrixLengthFunction, radius: int,
                              schedule: Sequence[int], slack: float = 1e-8,
                              seed: int = 0) -> dict:
    """Transform defect in truncation norm against the surrogate distance
    times the vertical seminorm.  The left side is a lower bound of the
    true defect norm and the surrogate dominates the true restricted
    distance, so a pass is sound."""
    r = z.support_radius()
    upper = restricted_distance_upper(length, r, F)
    lip = vertical_seminorm(z, length, schedule, seed=seed)
    defect = berezin(F, z) - z
    lhs = spectral_norm(defect.truncated_matrix(radius).matrix, 1e-12, seed)
    rhs = upper * lip.value
    return {"check": "approximation-bound", "lhs": lhs, "rhs": rhs,
            "support_radius": int(r), "radius": int(radius),
            "distance_upper": upper, "seminorm": lip.value,
            "slack": slack, "pass": lhs <= rhs + slack}


def folner_convergence(model: GroupModel, length: MatrixLengthFunction,
                       r: int, n_values: Sequence[int]) -> dict:
    """Surrogate distances of the ball-averaging states to the counit.

    Expected to decrease strictly along the ball schedule; a violation is
    flagged in the report, not raised.
    """
    rows = []
    for n in n_values:
        F = model.ball(int(n))
        rho = restricted_distance_upper(length, r, F)
        rows.append({"n": int(n), "rho_hat": rho, "ball_size": len(F)})
    decreasing = all(rows[i]["rho_hat"] > rows[i + 1]["rho_hat"] for i in range(len(rows) - 1))
    return {"check": "folner-convergence", "r": int(r), "rows": rows,
            "strictly_decreasing": decreasing, "pass": decreasing}


# ---------------------------------------------------------------------------
# Monge-Kantorovic lower bounds by supergradient ascent
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class MKCertificate:
    """Two-sided bracket for a distance between states."""

    lower: float
    upper: float | None
    radius: int
    trace: tuple[float, ...]

    def __post_init__(self):
        if self.upper is not None and self.lower > self.upper + 1e-9:
            raise ValidationError("certificate bounds are inconsistent")


class MaxSpectralSeminorm:
    """``v -> max_c sigma_max(sum_i v_i mats[c][i])`` for real vectors ``v``.

    The direction matrices of each constituent are flattened and stacked
    once, so an assembly is a single matrix-vector product.  Supergradients
    come from the top singular pairs of the active constituent; a
    degenerate top singular space is averaged over, which keeps the ascent
    deterministic.
    """

    def __init__(self, mats: Sequence[Sequence[np.ndarray]]):
        if not mats or not mats[0]:
            raise ValidationError("seminorm model needs at least one constituent and direction")
        self.dim = len(mats[0])
        self.shapes = []
        self.stacks = []
        for group in mats:
            if len(group) != self.dim:
                raise ValidationError("constituents disagree on the basis size")
            self.shapes.append(group[0].shape)
            self.stacks.append(np.stack([np.asarray(m, dtype=complex).reshape(-1)
                                         for m in group]))

    def assemble(self, c: int, v: np.ndarray) -> np.ndarray:
        return (v @ self.stacks[c]).reshape(self.shapes[c])

    def value(self, v: np.ndarray) -> float:
        best = 0.0
        for c in range(len(self.stacks)):
            s = np.linalg.svd(self.assemble(c, v), compute_uv=False)
            if s.size and float(s[0]) > best:
                best = float(s[0])
        return best

    def value_and_supergradient(self, v: np.ndarray) -> tuple[float, np.ndarray]:
        best_val, best_u, best_vh = -1.0, None, None
        best_c = 0
        for c in range(len(self.stacks)):
            u, s, vh = np.linalg.svd(self.assemble(c, v))
            val = float(s[0]) if s.size else 0.0
            if val > best_val:
                best_val, best_c = val, c
                best_u, best_s, best_vh = u, s, vh
        grad = np.zeros(self.dim)
        if best_u is not None and best_s.size and best_val > 0.0:
            count = int(np.searchsorted(-best_s, -best_val * (1.0 - 1e-9), side="right"))
            count = max(count, 1)
            pair_avg = (best_u[:, :count].conj() @ best_vh[:count].conj()) / count
            grad = np.real(self.stacks[best_c] @ pair_avg.reshape(-1))
        return max(best_val, 0.0), grad

    def real_kernel_dim(self, tol: float = 1e-8) -> int:
        """Dimension of the real null space of all constituents."""
        rows = []
        for stacked in self.stacks:
            rows.append(stacked.T.real)
            rows.append(stacked.T.imag)
        big = np.vstack(rows)
        if big.size == 0:
            return self.dim
        s = np.linalg.svd(big, compute_uv=False)
        rank = int(np.sum(s > tol * max(s[0], 1.0)))
        return self.dim - rank


@dataclass(frozen=True)
class SearchSpace:
    """Real-parametrised selfadjoint sector with a seminorm model.

    ``basis`` holds the actual selfadjoint objects (crossed elements or
    algebra matrices); the constant direction is excluded by construction,
    which fixes the usual one-functional gauge without changing the
    homogeneous ratio being maximised.
    """

    basis: tuple
    seminorm: MaxSpectralSeminorm
    kind: str
    radius: int = 0

    def functional_difference(self, phi: Callable, psi: Callable) -> np.ndarray:
        vals = np.array([complex(phi(b)) - complex(psi(b)) for b in self.basis])
        if np.max(np.abs(vals.imag), initial=0.0) > 1e-9:
            raise ValidationError("state difference is not real on the selfadjoint basis")
        return vals.real


def scalar_sector(ctx: CrossedProduct, length: MatrixLengthFunction,
                  support_radius: int, norm_radius: int | None = None) -> SearchSpace:
    """Selfadjoint scalar elements supported in a ball, with the vertical
    seminorm evaluated at ``norm_radius``.

    ``norm_radius`` defaults to the support radius and may not be smaller:
    at that radius the identity-site witness lies inside the truncation,
    which is what keeps the closed-form upper surrogate dominant.
    """
    if ctx.triple.dim != 1:
        raise ValidationError("scalar sector requires the scalar crossed product")
    norm_radius = support_radius if norm_radius is None else int(norm_radius)
    if norm_radius < support_radius:
        raise ValidationError("norm radius must cover the support radius")
    model = ctx.group
    ball = model.ball(support_radius)
    ident = model.identity()
    basis = []
    seen = set()
    for g in ball:
        if g == ident or g in seen:
            continue
        g_inv = model.invert(g)
        seen.add(g)
        if g_inv == g:
            basis.append(ctx.lam(g))
            continue
        seen.add(g_inv)
        basis.append(ctx.lam(g) + ctx.lam(g_inv))
        basis.append(1j * ctx.lam(g) - 1j * ctx.lam(g_inv))
    mats = [[d_vertical(b, length, norm_radius).matrix for b in basis]]
    return SearchSpace(tuple(basis), MaxSpectralSeminorm(mats), "scalar", norm_radius)


def base_sector(triple: FiniteSpectralTriple, gauge_index: int = 0) -> SearchSpace:
    """Selfadjoint base-algebra sector modulo constants.

    For a finite-metric triple the basis consists of point indicators away
    from the gauge point; generic triples use hermitian symmetrisations of
    their basis with the unit direction projected out.
    """
    if isinstance(triple, FiniteMetricTriple):
        basis = tuple(
            triple.matrix_of(np.eye(triple.points)[p])
            for p in range(triple.points) if p != gauge_index
        )
    else:
        raw = []
        for b in triple.basis:
            raw.append((b + b.conj().T) / 2.0)
            raw.append((b - b.conj().T) / 2.0j)
        eye = triple.unit().reshape(-1)
        eye = eye / np.linalg.norm(eye)
        kept = []
        for mat in raw:
            flat = mat.reshape(-1)
            flat = flat - np.vdot(eye, flat) * eye
            red = flat.reshape(mat.shape)
            if np.linalg.norm(red) > 1e-12:
                kept.append(red)
        basis = tuple(kept)
    if not basis:
        raise ValidationError("sector is trivial modulo constants")
    mats = [[triple.commutator(b) for b in basis]]
    return SearchSpace(basis, MaxSpectralSeminorm(mats), "base")


def mk_lower(phi: Callable, psi: Callable, space: SearchSpace,
             budget: int = 10_000, seed: int = 0, restarts: int = 8,
             patience: int = 60) -> MKCertificate:
    """Certified lower bound for the state distance on the search space.

    Maximises the homogeneous ratio ``(phi - psi)(x) / L(x)`` by
    supergradient ascent with deterministic multi-starts; any iterate
    rescaled to seminorm one is feasible, so the reported maximum is a
    true lower bound.  A restart stops early once the running best has
    not improved for ``patience`` steps; since stopping never depends on
    the remaining budget, the reported maximum only ever grows with the
    budget.
    """
    diff = space.functional_difference(phi, psi)
    dim = diff.size
    if space.seminorm.real_kernel_dim() > 0:
        raise DegenerateSeminormError(
            "seminorm vanishes on a non-constant direction of the search space"
        )
    if not np.any(diff):
        return MKCertificate(0.0, None, space.radius, (0.0,))
    rng = np.random.default_rng(seed)
    starts = [diff / np.linalg.norm(diff)]
    for _ in range(max(0, restarts - 1)):
        v = rng.standard_normal(dim)
        starts.append(v / np.linalg.norm(v))
    steps_per_start = max(1, budget // max(1, len(starts)))
    best = 0.0
    trace = []
    for v0 in starts:
        v = v0.copy()
        local_best = 0.0
        stale = 0
        for t in range(steps_per_start):
            lval, grad = space.seminorm.value_and_supergradient(v)
            num = float(diff @ v)
            if lval <= 1e-14 * max(1.0, float(np.linalg.norm(v))):
                if abs(num) > 1e-12:
                    raise DegenerateSeminormError("seminorm degenerate along ascent direction")
                break
            ratio = abs(num) / lval
            # subgradient steps need not improve monotonically; only a long
            # plateau of the running best ends the restart early
            if ratio > local_best * (1.0 + 1e-10) + 1e-14:
                local_best = ratio
                stale = 0
            else:
                local_best = max(local_best, ratio)
                stale += 1
                if stale >= patience:
                    break
            # supergradient of the ratio; flip sign to chase |ratio|
            sign = 1.0 if num >= 0 else -1.0
            g = sign * diff / lval - (sign * num / lval ** 2) * grad
            gnorm = float(np.linalg.norm(g))
            if gnorm <= 1e-14:
                break
            v = v + (0.5 / np.sqrt(t + 1.0)) * g / gnorm
            # the ratio is scale-invariant: euclidean renormalisation keeps
            # the iterates conditioned without an extra seminorm evaluation
            v = v / float(np.linalg.norm(v))
        final = space.seminorm.value(v)
        if final > 1e-14:
            local_best = max(local_best, abs(float(diff @ v)) / final)
        trace.append(local_best)
        best = max(best, local_best)
    return MKCertificate(best, None, space.radius, tuple(trace))


def mk_certificate(ctx: CrossedProduct, length: MatrixLengthFunction,
                   F: ElementSet | None, r: int, budget: int = 10_000,
                   seed: int = 0) -> MKCertificate:
    """Two-sided bracket for the averaging-vs-counit distance on the scalar
    sector of support radius ``r``."""
    model = ctx.group
    space = scalar_sector(ctx, length, r)
    phi = averaging_state(model, F) if F is not None else trace_state(model)
    lower_cert = mk_lower(phi, counit(model), space, budget=budget, seed=seed)
    upper = restricted_distance_upper(length, r, F)
    return MKCertificate(lower_cert.lower, upper, r, lower_cert.trace)


# ---------------------------------------------------------------------------
# finite quantum-metric audit
# ---------------------------------------------------------------------------


def seminorm_kernel_dim(basis: Sequence, derivation_maps: Sequence[Callable],
                        tol: float = 1e-8) -> int:
    """Complex dimension of the joint kernel of the derivation maps on the
    span of the basis (rank test on stacked matrix columns)."""
    cols = []
    for b in basis:
        col = np.concatenate([np.asarray(m(b), dtype=complex).reshape(-1) for m in derivation_maps])
        cols.append(col)
    stacked = np.stack(cols).T
    if stacked.size == 0:
        return len(basis)
    s = np.linalg.svd(stacked, compute_uv=False)
    rank = int(np.sum(s > tol * max(float(s[0]), 1.0)))
    return len(basis) - rank


def cqms_finite_check(basis: Sequence, derivation_maps: Sequence[Callable],
                      space: SearchSpace | None = None,
                      state_pairs: Sequence[tuple[Callable, Callable]] = (),
                      budget: int = 4_000, seed: int = 0, tol: float = 1e-8) -> dict:
    """Kernel and diameter audit of a finite-dimensional seminormed system.

    The kernel of the seminorm should be exactly the span of the unit; a
    larger kernel is reported as a failure, not raised.  Total boundedness
    is automatic in finite dimension and recorded as such.  The diameter
    bound is half the largest certified state distance over the supplied
    pairs.
    """
    kdim = seminorm_kernel_dim(basis, derivation_maps, tol)
    diameter = None
    if space is not None and state_pairs:
        best = 0.0
        for k, (phi, psi) in enumerate(state_pairs):
            cert = mk_lower(phi, psi, space, budget=budget, seed=seed + k)
            best = max(best, cert.lower)
        diameter = best / 2.0
    return {
        "check": "cqms-finite",
        "kernel_dim": int(kdim),
        "totally_bounded": True,
        "diameter_bound": diameter,
        "pass": kdim == 1,
    }
