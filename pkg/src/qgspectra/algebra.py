"""Finite-dimensional C*-algebras as direct sums of full matrix blocks.

A :class:`MultiMatrixAlgebra` is a linear space ``⊕_j M_{n_j}`` together
with a fixed Hilbert-Schmidt-orthonormal basis of block matrix units.  All
elements, functionals and linear maps are handled in coordinates over that
basis; products and adjoints are computed through the faithful block
diagonal representation on ``C^N`` with ``N = Σ n_j``.

Tensor products of algebras are again multi-matrix algebras whose basis is
the Kronecker product of the factor bases in pair-major order, so that
``vec(x ⊗ y) = kron(vec(x), vec(y))`` holds exactly and coordinates of an
iterated tensor product reshape into one axis per factor.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

from .linalg import TOL, as_complex, check_finite, dagger, is_psd, max_abs


class MultiMatrixAlgebra:
    """A multi-matrix algebra with a distinguished matrix-unit basis.

    Parameters
    ----------
    blocks : block side lengths ``[n_1, ..., n_k]``.
    basis : (dim, N, N) array of basis matrices, HS-orthonormal and block
        diagonal.  If omitted, the canonical matrix units are used.
    block_of_basis : block index of each basis element.
    """

    def __init__(self, blocks: Sequence[int], basis: np.ndarray | None = None,
                 block_of_basis: np.ndarray | None = None, label: str = ""):
        blocks = tuple(int(n) for n in blocks)
        if any(n <= 0 for n in blocks):
            raise ValueError("block sizes must be positive")
        self.blocks = blocks
        self.num_blocks = len(blocks)
        self.dim = int(sum(n * n for n in blocks))
        self.rep_dim = int(sum(blocks))
        self.label = label
        if basis is None:
            basis, block_of_basis = self._canonical_basis(blocks)
        self.basis = as_complex(basis)
        self.block_of_basis = np.asarray(block_of_basis, dtype=np.intp)
        if self.basis.shape != (self.dim, self.rep_dim, self.rep_dim):
            raise ValueError("basis shape mismatch")
        self._flat = self.basis.reshape(self.dim, -1)
        self.unit_vec = self.from_matrix(np.eye(self.rep_dim))
        self._mult_tensor: np.ndarray | None = None
        self._star_matrix: np.ndarray | None = None

    @staticmethod
    def _canonical_basis(blocks):
        n_total = sum(blocks)
        dim = sum(n * n for n in blocks)
        basis = np.zeros((dim, n_total, n_total), dtype=np.complex128)
        block_of = np.zeros(dim, dtype=np.intp)
        idx = 0
        offset = 0
        for j, n in enumerate(blocks):
            for r in range(n):
                for s in range(n):
                    basis[idx, offset + r, offset + s] = 1.0
                    block_of[idx] = j
                    idx += 1
            offset += n
        return basis, block_of

    # -- coordinates <-> matrices ------------------------------------

    def to_matrix(self, vec: np.ndarray) -> np.ndarray:
        return np.tensordot(as_complex(vec), self.basis, axes=(0, 0))

    def from_matrix(self, mat: np.ndarray, check: bool = False) -> np.ndarray:
        mat = as_complex(mat)
        vec = self._flat.conj() @ mat.reshape(-1)
        if check:
            resid = max_abs(self.to_matrix(vec) - mat)
            if resid > TOL * max(1.0, max_abs(mat)) * 10:
                raise ValueError(f"matrix is not in the algebra (residual {resid:.2e})")
        return vec

    # -- algebra operations on coordinate vectors ---------------------

    def mult(self, x: np.ndarray, y: np.ndarray) -> np.ndarray:
        return self.from_matrix(self.to_matrix(x) @ self.to_matrix(y))

    def star(self, x: np.ndarray) -> np.ndarray:
        return self.from_matrix(dagger(self.to_matrix(x)))

    def mult_tensor(self) -> np.ndarray:
        """m[p, q, r] with ``e_p e_q = Σ_r m[p,q,r] e_r``."""
        if self._mult_tensor is None:
            prods = np.einsum("pij,qjk->pqik", self.basis, self.basis)
            self._mult_tensor = np.einsum(
                "pqik,rik->pqr", prods, self.basis.conj())
        return self._mult_tensor

    def star_matrix(self) -> np.ndarray:
        """S with ``vec(x*) = S @ conj(vec(x))``."""
        if self._star_matrix is None:
            cols = [self.from_matrix(dagger(b)) for b in self.basis]
            self._star_matrix = np.stack(cols, axis=1)
        return self._star_matrix

    def star_batch(self, vecs: np.ndarray) -> np.ndarray:
        """Entrywise adjoint of a stack of coordinate vectors (last axis)."""
        return np.einsum("pq,...q->...p", self.star_matrix(), np.conj(vecs))

    def elem(self, vec) -> "AlgElem":
        return AlgElem(self, vec)

    def elem_from_matrix(self, mat, check: bool = True) -> "AlgElem":
        return AlgElem(self, self.from_matrix(mat, check=check))

    @property
    def unit(self) -> "AlgElem":
        return AlgElem(self, self.unit_vec)

    @property
    def zero(self) -> "AlgElem":
        return AlgElem(self, np.zeros(self.dim, dtype=np.complex128))

    def basis_elems(self) -> list["AlgElem"]:
        return [AlgElem(self, v) for v in np.eye(self.dim, dtype=np.complex128)]

    def block_indices(self, block: int) -> np.ndarray:
        return np.nonzero(self.block_of_basis == block)[0]

    def block_slices(self) -> list[np.ndarray]:
        return [self.block_indices(j) for j in range(self.num_blocks)]

    def ideal_coords(self, block_subset: Iterable[int]) -> np.ndarray:
        """Coordinate basis (rows) of the two-sided ideal of a block subset."""
        subset = sorted(set(int(j) for j in block_subset))
        rows = [np.eye(self.dim, dtype=np.complex128)[i]
                for j in subset for i in self.block_indices(j)]
        if not rows:
            return np.zeros((0, self.dim), dtype=np.complex128)
        return np.stack(rows)

    def trace_vec(self) -> np.ndarray:
        """The trace functional over the faithful block-diagonal representation."""
        return np.einsum("pii->p", self.basis)

    def __repr__(self):
        name = self.label or "MultiMatrixAlgebra"
        return f"<{name} blocks={list(self.blocks)} dim={self.dim}>"

    def __eq__(self, other):
        return (isinstance(other, MultiMatrixAlgebra)
                and self.blocks == other.blocks
                and self.basis.shape == other.basis.shape
                and np.allclose(self.basis, other.basis))

    def __hash__(self):
        return hash((self.blocks, self.basis.shape))


class AlgElem:
    """An element of a multi-matrix algebra, held in basis coordinates."""

    __slots__ = ("parent", "vec")

    def __init__(self, parent: MultiMatrixAlgebra, vec):
        self.parent = parent
        self.vec = check_finite(np.asarray(vec, dtype=np.complex128).reshape(-1), "element")
        if self.vec.shape != (parent.dim,):
            raise ValueError("coordinate length does not match the algebra dimension")

    def to_matrix(self) -> np.ndarray:
        return self.parent.to_matrix(self.vec)

    @property
    def block_matrices(self) -> list[np.ndarray]:
        mat = self.to_matrix()
        out = []
        offset = 0
        for n in self.parent.blocks:
            out.append(mat[offset:offset + n, offset:offset + n].copy())
            offset += n
        return out

    def adjoint(self) -> "AlgElem":
        return AlgElem(self.parent, self.parent.star(self.vec))

    def is_selfadjoint(self, tol: float = TOL) -> bool:
        return max_abs(self.vec - self.parent.star(self.vec)) <= tol * max(1.0, max_abs(self.vec)) * 10

    def is_positive(self, tol: float = TOL) -> bool:
        return all(is_psd(b, tol) for b in self.block_matrices)

    def is_projection(self, tol: float = TOL) -> bool:
        return (self.is_selfadjoint(tol)
                and max_abs((self * self).vec - self.vec) <= tol * max(1.0, max_abs(self.vec)) * 10)

    def norm(self) -> float:
        return float(np.linalg.norm(self.vec))

    def __add__(self, other):
        return AlgElem(self.parent, self.vec + other.vec)

    def __sub__(self, other):
        return AlgElem(self.parent, self.vec - other.vec)

    def __neg__(self):
        return AlgElem(self.parent, -self.vec)

    def __mul__(self, other):
        if isinstance(other, AlgElem):
            return AlgElem(self.parent, self.parent.mult(self.vec, other.vec))
        return AlgElem(self.parent, self.vec * complex(other))

    def __rmul__(self, scalar):
        return AlgElem(self.parent, self.vec * complex(scalar))

    def __repr__(self):
        return f"AlgElem({self.parent!r}, norm={self.norm():.4g})"


def tensor_algebra(x: MultiMatrixAlgebra, y: MultiMatrixAlgebra,
                   label: str = "") -> MultiMatrixAlgebra:
    """The tensor product algebra with Kronecker pair basis.

    Coordinates satisfy ``vec(a ⊗ b) = kron(vec(a), vec(b))``, so a
    coordinate vector reshapes to ``(x.dim, y.dim)``.
    """
    blocks = [nx * ny for nx in x.blocks for ny in y.blocks]
    block_of = (
        np.repeat(x.block_of_basis, y.dim) * len(y.blocks)
        + np.tile(y.block_of_basis, x.dim)
    )
    # kron of block r of x with block s of y sits at the diagonal slot for
    # the pair block (r, s); the flat kron of two block-diagonal matrices
    # would not be block diagonal, so re-embed explicitly.
    n_total = sum(blocks)
    dim = x.dim * y.dim
    basis = np.zeros((dim, n_total, n_total), dtype=np.complex128)
    x_off = np.concatenate([[0], np.cumsum(x.blocks)])
    y_off = np.concatenate([[0], np.cumsum(y.blocks)])
    pair_off = np.concatenate([[0], np.cumsum(blocks)])
    for p in range(x.dim):
        i = x.block_of_basis[p]
        xb = x.basis[p, x_off[i]:x_off[i + 1], x_off[i]:x_off[i + 1]]
        for q in range(y.dim):
            j = y.block_of_basis[q]
            yb = y.basis[q, y_off[j]:y_off[j + 1], y_off[j]:y_off[j + 1]]
            k = i * len(y.blocks) + j
            sl = slice(pair_off[k], pair_off[k + 1])
            basis[p * y.dim + q, sl, sl] = np.kron(xb, yb)
    alg = MultiMatrixAlgebra(blocks, basis=basis, block_of_basis=block_of,
                             label=label or f"{x.label}(x){y.label}")
    return alg


def tensor_vec(xvec: np.ndarray, yvec: np.ndarray) -> np.ndarray:
    return np.kron(as_complex(xvec), as_complex(yvec))


def matrix_algebra(d: int, label: str = "") -> MultiMatrixAlgebra:
    return MultiMatrixAlgebra([d], label=label or f"M{d}")


def scalar_algebra() -> MultiMatrixAlgebra:
    return MultiMatrixAlgebra([1], label="C")
