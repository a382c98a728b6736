"""Tolerant dense linear algebra shared by every module.

All rank decisions use a single relative tolerance: singular values below
``tol * max(s)`` are treated as zero.  Subspaces are handled as stacks of
row vectors kept orthonormal with respect to the standard inner product
(which coincides with the Hilbert-Schmidt inner product once operators are
vectorized).
"""

from __future__ import annotations

import numpy as np

#: Global tolerance for rank decisions and residual checks.
TOL = 1e-9

#: Ambient operator spaces larger than this are refused by closure loops.
DIM_CAP = 4096


class DimensionCapExceeded(RuntimeError):
    """Raised when an ambient operator space exceeds the configured cap."""


def as_complex(a) -> np.ndarray:
    return np.asarray(a, dtype=np.complex128)


def check_finite(a, what: str = "matrix") -> np.ndarray:
    a = as_complex(a)
    if not np.all(np.isfinite(a.view(np.float64))):
        raise ValueError(f"{what} contains non-finite entries")
    return a


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def numerical_rank(rows: np.ndarray, tol: float = TOL) -> int:
    if rows.size == 0:
        return 0
    s = np.linalg.svd(rows, compute_uv=False)
    if s.size == 0 or s[0] <= tol:
        return 0
    return int(np.sum(s > tol * s[0]))


def orthonormal_rows(rows: np.ndarray, tol: float = TOL) -> np.ndarray:
    """SVD-based orthonormal basis of the row span of ``rows``.

    Returns a (rank, n) array with orthonormal rows; the empty span gives a
    (0, n) array.
    """
    rows = as_complex(rows)
    if rows.ndim != 2:
        raise ValueError("expected a 2-d stack of row vectors")
    if rows.shape[0] == 0:
        return rows
    u, s, vh = np.linalg.svd(rows, full_matrices=False)
    if s.size == 0 or s[0] <= tol:
        return np.zeros((0, rows.shape[1]), dtype=np.complex128)
    rank = int(np.sum(s > tol * s[0]))
    return vh[:rank]


def nullspace(mat: np.ndarray, tol: float = TOL) -> np.ndarray:
    """Orthonormal basis of the right null space of ``mat``.

    Each row ``v`` of the result satisfies ``mat @ v = 0``.
    """
    mat = as_complex(mat)
    if mat.shape[0] == 0:
        return np.eye(mat.shape[1], dtype=np.complex128)
    u, s, vh = np.linalg.svd(mat, full_matrices=True)
    if s.size == 0 or s[0] <= tol:
        return np.eye(mat.shape[1], dtype=np.complex128)
    rank = int(np.sum(s > tol * s[0]))
    return vh[rank:].conj()


def project_onto_rows(v: np.ndarray, basis: np.ndarray) -> np.ndarray:
    """Orthogonal projection of vector(s) ``v`` onto the row span of ``basis``."""
    if basis.shape[0] == 0:
        return np.zeros_like(v)
    coeff = v @ dagger(basis)
    return coeff @ basis


def residual_norm(v: np.ndarray, basis: np.ndarray) -> float:
    """Distance of ``v`` (a single vector) from the row span of ``basis``."""
    return float(np.linalg.norm(v - project_onto_rows(v, basis)))


def span_contains(basis: np.ndarray, vectors: np.ndarray, tol: float = TOL) -> bool:
    """True when every row of ``vectors`` lies in the row span of ``basis``."""
    vectors = np.atleast_2d(as_complex(vectors))
    if vectors.shape[0] == 0:
        return True
    scale = max(1.0, float(np.max(np.abs(vectors))))
    resid = vectors - project_onto_rows(vectors, basis)
    return float(np.max(np.abs(resid))) <= tol * scale * 10


def principal_angle_gap(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric subspace distance: sine of the largest principal angle
    between the row spans of ``a`` and ``b`` (both directions).

    0.0 for equal spans, 1.0 when some direction of one span is orthogonal
    to the other.  Spans of unequal dimension always return 1.0.
    """
    qa = orthonormal_rows(a)
    qb = orthonormal_rows(b)
    if qa.shape[0] != qb.shape[0]:
        return 1.0
    if qa.shape[0] == 0:
        return 0.0
    s = np.linalg.svd(qa @ dagger(qb), compute_uv=False)
    cos_min = min(1.0, float(np.min(s)))
    return float(np.sqrt(max(0.0, 1.0 - cos_min * cos_min)))


def spans_equal(a: np.ndarray, b: np.ndarray, tol: float = 1e-8) -> bool:
    return principal_angle_gap(a, b) <= tol


def is_hermitian(m: np.ndarray, tol: float = TOL) -> bool:
    scale = max(1.0, float(np.max(np.abs(m))) if m.size else 0.0)
    return float(np.max(np.abs(m - dagger(m)))) <= tol * scale * 10 if m.size else True


def is_psd(m: np.ndarray, tol: float = TOL) -> bool:
    if m.size == 0:
        return True
    if not is_hermitian(m, tol):
        return False
    w = np.linalg.eigvalsh((m + dagger(m)) / 2)
    scale = max(1.0, float(np.max(np.abs(w))))
    return bool(np.min(w) >= -tol * scale * 10)


def is_projection(m: np.ndarray, tol: float = TOL) -> bool:
    if m.size == 0:
        return True
    return (
        is_hermitian(m, tol)
        and float(np.max(np.abs(m @ m - m))) <= tol * max(1.0, float(np.max(np.abs(m)))) * 10
    )


def eig_clusters(values: np.ndarray, tol: float = 1e-7) -> list[list[int]]:
    """Group indices of (real) eigenvalues into clusters of nearly equal values."""
    order = np.argsort(values)
    clusters: list[list[int]] = []
    scale = max(1.0, float(np.max(np.abs(values))) if values.size else 0.0)
    for idx in order:
        if clusters and abs(values[idx] - values[clusters[-1][-1]]) <= tol * scale:
            clusters[-1].append(int(idx))
        else:
            clusters.append([int(idx)])
    return clusters


def random_hermitian(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return (m + dagger(m)) / 2


def random_unitary(n: int, rng: np.random.Generator) -> np.ndarray:
    m = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    q, r = np.linalg.qr(m)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def max_abs(a: np.ndarray) -> float:
    return float(np.max(np.abs(a))) if a.size else 0.0
