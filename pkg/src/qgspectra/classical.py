"""Finite groups, their unitary irreps, classical actions, and the
brute-force spectral oracle used to cross-check compiled group actions.

The oracle works entirely with group sums and isotypic decompositions of
the action; it never touches the quantum-side spectral machinery.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import AlgElem, MultiMatrixAlgebra
from .linalg import dagger, max_abs, nullspace, orthonormal_rows
from .subspaces import OperatorSubspace, wedderburn


class FiniteGroup:
    """A finite group given by labelled elements and a Cayley table."""

    def __init__(self, elements: list[str], table: np.ndarray, name: str = "group"):
        self.elements = list(elements)
        self.table = np.asarray(table, dtype=np.intp)
        self.name = name
        n = len(elements)
        if self.table.shape != (n, n):
            raise ValueError("Cayley table shape mismatch")
        self.identity = self._find_identity()
        self.inverse = np.array([self._find_inverse(i) for i in range(n)], dtype=np.intp)

    def __len__(self):
        return len(self.elements)

    def mult(self, i: int, j: int) -> int:
        return int(self.table[i, j])

    def _find_identity(self) -> int:
        n = len(self.elements)
        for e in range(n):
            if all(self.table[e, j] == j and self.table[j, e] == j for j in range(n)):
                return e
        raise ValueError("no identity element")

    def _find_inverse(self, i: int) -> int:
        n = len(self.elements)
        for j in range(n):
            if self.table[i, j] == self.identity and self.table[j, i] == self.identity:
                return j
        raise ValueError(f"element {i} has no inverse")

    @cached_property
    def irreps(self) -> list["GroupIrrep"]:
        """Unitary irreps from decomposing the left regular representation."""
        n = len(self.elements)
        reg = np.zeros((n, n, n))
        for g in range(n):
            for x in range(n):
                reg[g, self.table[g, x], x] = 1.0
        # commutant of the regular representation
        rows = []
        for g in range(n):
            k = np.kron(np.eye(n), reg[g]) - np.kron(reg[g].T, np.eye(n))
            rows.append(k)
        sols = nullspace(np.concatenate(rows, axis=0))
        mats = np.array([s.reshape(n, n).T for s in sols])
        comm = OperatorSubspace.from_matrices(n, mats)
        wd = wedderburn(comm, np.random.default_rng(5))
        out = []
        for j in range(wd.algebra.num_blocks):
            e_abs = np.zeros(wd.algebra.dim, dtype=np.complex128)
            e_abs[sum(b * b for b in wd.algebra.blocks[:j])] = 1.0
            e = wd.from_abstract_vec(e_abs)
            w_eig, v_eig = np.linalg.eigh((e + dagger(e)) / 2)
            w_cols = v_eig[:, w_eig > 0.5]
            pi = np.einsum("ia,gij,jb->gab", w_cols.conj(), reg, w_cols)
            out.append(GroupIrrep(self, pi))
        for pi in out:
            if not pi.is_representation():
                raise RuntimeError("regular decomposition produced a non-representation")
        if sum(p.d ** 2 for p in out) != n:
            raise RuntimeError("irrep dimensions do not sum to the group order")
        out.sort(key=lambda p: (p.d, np.round(p.character.real, 6).tobytes(),
                                np.round(p.character.imag, 6).tobytes()))
        for i, p in enumerate(out):
            p.label = i
        return out


class GroupIrrep:
    """A unitary irrep as an array pi[g] of d x d matrices."""

    def __init__(self, group: FiniteGroup, mats: np.ndarray, label: int | None = None):
        self.group = group
        self.mats = np.asarray(mats, dtype=np.complex128)
        self.d = self.mats.shape[1]
        self.label = label

    @property
    def character(self) -> np.ndarray:
        return np.einsum("gii->g", self.mats)

    def is_representation(self, tol: float = 1e-8) -> bool:
        g = self.group
        for a in range(len(g)):
            if max_abs(self.mats[a] @ dagger(self.mats[a]) - np.eye(self.d)) > tol:
                return False
            for b in range(len(g)):
                if max_abs(self.mats[a] @ self.mats[b] - self.mats[g.table[a, b]]) > tol:
                    return False
        return True

    def __repr__(self):
        return f"<GroupIrrep {self.label} d={self.d} of {self.group.name}>"


# -- builtin groups ---------------------------------------------------------

def cyclic_group(n: int) -> FiniteGroup:
    table = np.array([[(i + j) % n for j in range(n)] for i in range(n)])
    return FiniteGroup([f"g{i}" for i in range(n)], table, name=f"Z{n}")


def symmetric_group_3() -> FiniteGroup:
    perms = [(0, 1, 2), (1, 2, 0), (2, 0, 1), (0, 2, 1), (2, 1, 0), (1, 0, 2)]
    names = ["e", "r", "r2", "s12", "s02", "s01"]

    def compose(p, q):  # (p∘q)(i) = p(q(i))
        return tuple(p[q[i]] for i in range(3))

    table = np.array([[perms.index(compose(p, q)) for q in perms] for p in perms])
    return FiniteGroup(names, table, name="S3")


def dihedral_group_4() -> FiniteGroup:
    """D4 of order 8 as pairs r^i s^j with s r s = r^-1."""
    elems = [(i, j) for j in range(2) for i in range(4)]
    names = [f"r{i}" if j == 0 else f"r{i}s" for (i, j) in elems]

    def mul(a, b):
        i, j = a
        k, l = b
        # (r^i s^j)(r^k s^l) = r^(i + k*(-1)^j) s^(j+l)
        return ((i + (k if j == 0 else -k)) % 4, (j + l) % 2)

    table = np.array([[elems.index(mul(a, b)) for b in elems] for a in elems])
    return FiniteGroup(names, table, name="D4")


def builtin_group(name: str) -> FiniteGroup:
    key = name.lower()
    if key == "z2":
        return cyclic_group(2)
    if key == "z3":
        return cyclic_group(3)
    if key == "s3":
        return symmetric_group_3()
    if key == "d4":
        return dihedral_group_4()
    raise KeyError(f"unknown builtin group {name!r}")


# -- classical actions ------------------------------------------------------

@dataclass
class ClassicalAction:
    """An action of a finite group on a multi-matrix algebra by
    *-automorphisms, stored as linear maps over element coordinates."""

    group: FiniteGroup
    algebra: MultiMatrixAlgebra
    maps: np.ndarray        # (|G|, dim B, dim B)
    name: str = "action"

    def __post_init__(self):
        self.maps = np.asarray(self.maps, dtype=np.complex128)
        n = len(self.group)
        d = self.algebra.dim
        if self.maps.shape != (n, d, d):
            raise ValueError("action maps have wrong shape")
        self.validate()

    def validate(self, tol: float = 1e-8):
        g = self.group
        b = self.algebra
        if max_abs(self.maps[g.identity] - np.eye(b.dim)) > tol:
            raise ValueError("identity element does not act trivially")
        for i in range(len(g)):
            for j in range(len(g)):
                if max_abs(self.maps[i] @ self.maps[j] - self.maps[g.table[i, j]]) > tol:
                    raise ValueError("action is not a group homomorphism")
        sm = b.star_matrix()
        m3 = b.mult_tensor()
        for i in range(len(g)):
            sig = self.maps[i]
            if max_abs(sig @ b.unit_vec - b.unit_vec) > tol:
                raise ValueError("automorphism does not fix the unit")
            if max_abs(sig @ sm - sm @ sig.conj()) > tol:
                raise ValueError("automorphism does not commute with *")
            lhs = np.einsum("pqr,sr->pqs", m3, sig.T)
            rhs = np.einsum("ap,bq,abs->pqs", sig.T, sig.T, m3)
            if max_abs(lhs - rhs) > tol:
                raise ValueError("automorphism is not multiplicative")

    def apply(self, g_idx: int, x: AlgElem) -> AlgElem:
        return AlgElem(self.algebra, self.maps[g_idx] @ x.vec)

    @cached_property
    def fixed_coords(self) -> np.ndarray:
        """Orthonormal rows spanning the fixed-point algebra B^sigma."""
        rows = np.concatenate([m - np.eye(self.algebra.dim) for m in self.maps])
        return nullspace(rows)

    def isotypic_projection(self, pi: GroupIrrep) -> np.ndarray:
        """P_pi = (d_pi/|G|) Σ_g conj(χ_pi(g)) σ_g, over coordinates."""
        n = len(self.group)
        chi = pi.character
        return (pi.d / n) * np.einsum("g,gpq->pq", chi.conj(), self.maps)


def action_from_block_data(group: FiniteGroup, algebra: MultiMatrixAlgebra,
                           block_perms: dict[int, list[int]] | None,
                           unitaries: dict[int, list[np.ndarray]] | None,
                           name: str = "action") -> ClassicalAction:
    """Build an action from per-element block permutations and unitaries.

    ``σ_g(x)_j = U_{g,j} x_{perm_g^{-1}(j)} U_{g,j}^*``; omitted data
    defaults to trivial permutations / identity unitaries.
    """
    n = len(group)
    maps = np.zeros((n, algebra.dim, algebra.dim), dtype=np.complex128)
    k = algebra.num_blocks
    offsets = np.concatenate([[0], np.cumsum(algebra.blocks)])
    for g in range(n):
        perm = (block_perms or {}).get(g, list(range(k)))
        if sorted(perm) != list(range(k)):
            raise ValueError("block permutation is not a permutation")
        us = (unitaries or {}).get(g, None)
        for p in range(algebra.dim):
            src = int(algebra.block_of_basis[p])
            dst = perm[src]
            if algebra.blocks[src] != algebra.blocks[dst]:
                raise ValueError("permutation maps between different block sizes")
            bm = AlgElem(algebra, np.eye(algebra.dim)[p]).block_matrices[src]
            u = np.eye(algebra.blocks[dst]) if us is None else np.asarray(us[dst])
            big = np.zeros((algebra.rep_dim, algebra.rep_dim), dtype=np.complex128)
            sl = slice(offsets[dst], offsets[dst + 1])
            big[sl, sl] = u @ bm @ dagger(u)
            maps[g, :, p] = algebra.from_matrix(big)
    return ClassicalAction(group, algebra, maps, name=name)


# -- brute-force spectral oracle -------------------------------------------

def _amplified_fixed(action: ClassicalAction, pi: GroupIrrep) -> np.ndarray:
    """Fixed points of σ_g ⊗ Ad(pi(g)) on B ⊗ M_d, as orthonormal rows of
    coordinate space (dim B * d * d)."""
    b = action.algebra
    d = pi.d
    rows = []
    for g in range(len(action.group)):
        op = np.einsum("pq,ik,jl->pijqkl",
                       action.maps[g], pi.mats[g], pi.mats[g].conj())
        rows.append(op.reshape(b.dim * d * d, b.dim * d * d) - np.eye(b.dim * d * d))
    return nullspace(np.concatenate(rows))


def _spectral_matrix_space(action: ClassicalAction, pi: GroupIrrep) -> np.ndarray:
    """Solutions X in B ⊗ M_d of (σ_g ⊗ id)(X) = X (1 ⊗ pi(g)) for all g."""
    b = action.algebra
    d = pi.d
    rows = []
    eye_d = np.eye(d)
    for g in range(len(action.group)):
        lhs = np.einsum("pq,ik,jl->pijqkl", action.maps[g], eye_d, eye_d)
        rhs = np.einsum("pq,ik,lj->pijqkl", np.eye(b.dim), eye_d, pi.mats[g])
        rows.append((lhs - rhs).reshape(b.dim * d * d, b.dim * d * d))
    return nullspace(np.concatenate(rows))


def _mat_products_span(b: MultiMatrixAlgebra, d: int, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """Span of X* Y for X in xs, Y in ys (coordinates over B ⊗ M_d)."""
    m3 = b.mult_tensor()
    sm = b.star_matrix()
    xs = xs.reshape(-1, b.dim, d, d)
    ys = ys.reshape(-1, b.dim, d, d)
    xs_star = np.einsum("pq,aqij->apij", sm, xs.conj())
    # (X*Y)_ij = Σ_k (X_ki)* Y_kj with products in B
    prods = np.einsum("apki,bqkj,pqr->abrij", xs_star, ys, m3)
    return orthonormal_rows(prods.reshape(len(xs) * len(ys), b.dim * d * d))


def oracle_arveson(action: ClassicalAction) -> set[int]:
    """Classical Arveson spectrum: pi is in Sp iff span(C(pi)* C(pi)) equals
    the fixed algebra of the amplified action (finite dimensions collapse
    essential ideals to the whole algebra)."""
    out = set()
    for pi in action.group.irreps:
        c = _spectral_matrix_space(action, pi)
        fixed = _amplified_fixed(action, pi)
        if len(c) == 0:
            continue
        prods = _mat_products_span(action.algebra, pi.d, c, c)
        if len(prods) == len(fixed):
            out.add(pi.label)
    return out


def _fixed_projections(action: ClassicalAction,
                       rng: np.random.Generator) -> list[AlgElem]:
    """One representative projection per rank tuple over the blocks of the
    classical fixed-point algebra (excluding 0, including 1)."""
    b = action.algebra
    fixed_rows = action.fixed_coords
    mats = np.array([b.to_matrix(v) for v in fixed_rows])
    space = OperatorSubspace.from_matrices(b.rep_dim, mats)
    wd = wedderburn(space, rng)
    reps = []
    for tup in itertools.product(*[range(r + 1) for r in wd.algebra.blocks]):
        if all(t == 0 for t in tup):
            continue
        diag = []
        for r_block, t in zip(wd.algebra.blocks, tup):
            diag.extend([1.0] * t + [0.0] * (r_block - t))
        abstract = wd.algebra.elem_from_matrix(np.diag(diag).astype(complex), check=True)
        reps.append(b.elem_from_matrix(wd.from_abstract(abstract), check=True))
    return reps


def restrict_action(action: ClassicalAction, q: AlgElem) -> ClassicalAction:
    """Restrict to the corner qBq (q a fixed projection of the action)."""
    from .subspaces import corner as corner_of

    b = action.algebra
    cor = corner_of(b, q, np.random.default_rng(3))
    maps = []
    basis_ops = [cor.embed(cor.algebra.elem(v)) for v in np.eye(cor.algebra.dim)]
    for g in range(len(action.group)):
        cols = []
        for e in basis_ops:
            moved = AlgElem(b, action.maps[g] @ e.vec)
            cols.append(cor.restrict(moved).vec)
        maps.append(np.stack(cols, axis=1))
    return ClassicalAction(action.group, cor.algebra, np.array(maps),
                           name=f"{action.name}|corner")


def oracle_connes(action: ClassicalAction, rng: np.random.Generator | None = None) -> set[int]:
    """Classical Connes spectrum: intersection of Arveson spectra over the
    invariant hereditary corners enumerated from fixed projections."""
    if rng is None:
        rng = np.random.default_rng(17)
    gamma = set(p.label for p in action.group.irreps)
    for q in _fixed_projections(action, rng):
        sub = restrict_action(action, q)
        gamma &= oracle_arveson(sub)
    return gamma
