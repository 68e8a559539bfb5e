"""Deterministic dense complex linear algebra kernels.

All operator norms in this package are finite-dimensional eigenproblems;
this module keeps them deterministic (fixed seeds, fixed reduction order)
so that repeated runs produce bit-identical reports.
"""

from __future__ import annotations

import numpy as np

from .errors import ValidationError

HERMITIAN_TOL = 1e-12
# LAPACK is exact and fast up to this size; power iteration only pays off
# beyond it.  It converges like (s2/s1)^(2t), so clustered leading singular
# values stall it; the iteration budget is kept small and the dense
# eigensolver takes over on non-convergence.
_DENSE_CUTOFF = 512
_MAX_POWER_ITERATIONS = 300
_TINY = float(np.finfo(float).tiny)


def ensure_finite(mat: np.ndarray) -> np.ndarray:
    mat = np.asarray(mat, dtype=complex)
    if mat.size and not np.all(np.isfinite(mat.real)) or not np.all(np.isfinite(mat.imag)):
        raise ValidationError("matrix contains NaN or Inf entries")
    return mat


def hermitian_defect(mat: np.ndarray) -> float:
    """Max-entry deviation of ``mat`` from its own adjoint."""
    mat = np.asarray(mat)
    if mat.size == 0:
        return 0.0
    return float(np.max(np.abs(mat - mat.conj().T)))


def is_hermitian(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> bool:
    return hermitian_defect(mat) <= tol


def _seeded_start(dim: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(dim) + 1j * rng.standard_normal(dim)
    return v / np.linalg.norm(v)


def spectral_norm(mat: np.ndarray, tol: float = 1e-10, seed: int = 0) -> float:
    """Largest singular value of a dense complex matrix.

    Power iteration runs on the Gram matrix ``M* M`` from a seeded start
    vector and stops on the Rayleigh-quotient residual
    ``||G v - lam v|| < tol * lam``.  Small matrices (and any
    non-converged run) fall back to a dense Hermitian eigensolver, so the
    result is within ``tol * (1 + value)`` of the true norm either way.
    """
    if tol <= 0:
        raise ValidationError("tolerance must be positive")
    mat = ensure_finite(mat)
    if mat.size == 0:
        return 0.0
    if mat.ndim != 2:
        raise ValidationError("spectral_norm expects a 2d array")
    n, m = mat.shape
    if min(n, m) == 0:
        return 0.0
    if max(n, m) < _DENSE_CUTOFF:
        return float(np.linalg.norm(mat, 2))
    # iterate on the smaller Gram factor
    if m <= n:
        gram = mat.conj().T @ mat
    else:
        gram = mat @ mat.conj().T
    dim = gram.shape[0]
    v = _seeded_start(dim, seed)
    lam = 0.0
    for _ in range(_MAX_POWER_ITERATIONS):
        w = gram @ v
        lam = float(np.real(np.vdot(v, w)))
        residual = float(np.linalg.norm(w - lam * v))
        if residual <= tol * max(lam, _TINY):
            return float(np.sqrt(max(lam, 0.0)))
        norm_w = np.linalg.norm(w)
        if norm_w == 0.0:
            return 0.0
        v = w / norm_w
    # non-convergence: dense fallback
    eigs = np.linalg.eigvalsh(gram)
    return float(np.sqrt(max(float(eigs[-1]), 0.0)))


def hermitian_eigs(mat: np.ndarray, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix, sorted ascending.

    Rejects inputs whose Hermitian defect exceeds ``tol``.
    """
    mat = ensure_finite(mat)
    if mat.size == 0:
        return np.zeros(0)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise ValidationError("hermitian_eigs expects a square matrix")
    scale = max(1.0, float(np.max(np.abs(mat))))
    if hermitian_defect(mat) > tol * scale:
        raise ValidationError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh((mat + mat.conj().T) / 2.0)


def smallest_singular_value(mat: np.ndarray) -> float:
    mat = ensure_finite(mat)
    if mat.size == 0:
        return 0.0
    return float(np.linalg.svd(mat, compute_uv=False)[-1])


def top_singular_triplet(mat: np.ndarray) -> tuple[float, np.ndarray, np.ndarray]:
    """(sigma_max, left vector, right vector) with deterministic phases."""
    mat = ensure_finite(mat)
    u, s, vh = np.linalg.svd(mat)
    return float(s[0]), u[:, 0], vh[0].conj()


def top_singular_space(mat: np.ndarray, rel_gap: float = 1e-9):
    """All singular pairs within ``rel_gap`` of the top singular value."""
    mat = ensure_finite(mat)
    u, s, vh = np.linalg.svd(mat)
    if s.size == 0 or s[0] == 0.0:
        return 0.0, []
    keep = s >= s[0] * (1.0 - rel_gap)
    pairs = [(u[:, i], vh[i].conj()) for i in range(len(s)) if keep[i]]
    return float(s[0]), pairs
