"""Built-in quantum groups and the instance catalog.

Function algebras C(Γ) use the convention Δf(s,t) = f(ts), which makes the
classical compile rule δ(b) = Σ_g σ_{g^{-1}}(b) ⊗ 1_g a coaction for
nonabelian Γ as well.  Group algebras C[Γ] are realized on the multi-matrix
model ⊕_π M_{d_π} through the computed unitary irreps.  The Kac-Paljutkin
8-dimensional quantum group is built as a unitary 2-cocycle twist of C[D4]
along its Z2 x Z2 subgroup and certified by the Hopf validator.
"""

from __future__ import annotations

import numpy as np

from .algebra import MultiMatrixAlgebra, tensor_algebra
from .classical import (
    ClassicalAction,
    FiniteGroup,
    builtin_group,
    cyclic_group,
    dihedral_group_4,
)
from .linalg import dagger, max_abs
from .qgroup import FiniteQuantumGroup


def function_algebra(group: FiniteGroup) -> FiniteQuantumGroup:
    """C(Γ) with Δf(s,t) = f(ts), ε(f) = f(e), S(f)(g) = f(g^{-1})."""
    n = len(group)
    a = MultiMatrixAlgebra([1] * n, label=f"C({group.name})")
    comult = np.zeros((n * n, n), dtype=np.complex128)
    for s in range(n):
        for t in range(n):
            comult[s * n + t, group.table[t, s]] = 1.0
    counit = np.zeros(n, dtype=np.complex128)
    counit[group.identity] = 1.0
    antipode = np.zeros((n, n), dtype=np.complex128)
    for g in range(n):
        antipode[group.inverse[g], g] = 1.0
    return FiniteQuantumGroup(a, comult, counit, antipode, label=f"C({group.name})")


def group_algebra(group: FiniteGroup) -> FiniteQuantumGroup:
    """C[Γ] on the multi-matrix model ⊕_π M_{d_π}, with group-like Δ."""
    n = len(group)
    blocks = [p.d for p in group.irreps]
    a = MultiMatrixAlgebra(blocks, label=f"C[{group.name}]")
    lam = np.zeros((n, a.dim), dtype=np.complex128)
    for g in range(n):
        mats = [p.mats[g] for p in group.irreps]
        big = np.zeros((a.rep_dim, a.rep_dim), dtype=np.complex128)
        off = 0
        for m in mats:
            big[off:off + len(m), off:off + len(m)] = m
            off += len(m)
        lam[g] = a.from_matrix(big)
    ft = lam.T                       # columns are vec(λ_g)
    ft_inv = np.linalg.inv(ft)
    comult = np.zeros((a.dim * a.dim, a.dim), dtype=np.complex128)
    counit = np.zeros(a.dim, dtype=np.complex128)
    antipode = np.zeros((a.dim, a.dim), dtype=np.complex128)
    for p in range(a.dim):
        for g in range(n):
            c = ft_inv[g, p]
            if abs(c) < 1e-14:
                continue
            comult[:, p] += c * np.kron(ft[:, g], ft[:, g])
            counit[p] += c
            antipode[:, p] += c * ft[:, group.inverse[g]]
    return FiniteQuantumGroup(a, comult, counit, antipode, label=f"C[{group.name}]")


def kac_paljutkin() -> FiniteQuantumGroup:
    """The 8-dimensional Kac-Paljutkin quantum group.

    Obtained by twisting C[D4] with the unitary bicharacter cocycle
    J = Σ (-1)^{βγ} p_{αβ} ⊗ p_{γδ} built from the minimal idempotents of
    the Z2 x Z2 subgroup {e, r², s, r²s}; the twist keeps the algebra,
    counit and *, conjugates Δ by J, and conjugates S by U = m(id ⊗ S)(J).
    """
    d4 = dihedral_group_4()
    g0 = group_algebra(d4)
    a = g0.A
    name_to_idx = {nm: i for i, nm in enumerate(d4.elements)}
    k_elems = {(0, 0): name_to_idx["r0"], (1, 0): name_to_idx["r2"],
               (0, 1): name_to_idx["r0s"], (1, 1): name_to_idx["r2s"]}

    lam = {}
    for ab, idx in k_elems.items():
        vec = np.zeros(len(d4))
        vec[idx] = 1.0
        # λ_g vectors in algebra coordinates, recomputed from the irreps
        mats = [p.mats[idx] for p in d4.irreps]
        big = np.zeros((a.rep_dim, a.rep_dim), dtype=np.complex128)
        off = 0
        for m in mats:
            big[off:off + len(m), off:off + len(m)] = m
            off += len(m)
        lam[ab] = a.from_matrix(big)

    def idempotent(alpha, beta):
        out = np.zeros(a.dim, dtype=np.complex128)
        for (x, y), vec in lam.items():
            out += ((-1) ** (alpha * x + beta * y)) * vec
        return out / 4.0

    p = {(al, be): idempotent(al, be) for al in (0, 1) for be in (0, 1)}
    aa = tensor_algebra(a, a)
    j_vec = np.zeros(aa.dim, dtype=np.complex128)
    for (al, be), p1 in p.items():
        for (ga, de), p2 in p.items():
            j_vec += ((-1) ** (be * ga)) * np.kron(p1, p2)
    j_mat = aa.to_matrix(j_vec)
    if max_abs(j_mat @ j_mat - np.eye(aa.rep_dim)) > 1e-9:
        raise RuntimeError("twist element is not an involution")

    comult_j = np.zeros_like(g0.comult)
    for q in range(a.dim):
        col = aa.to_matrix(g0.comult[:, q])
        comult_j[:, q] = aa.from_matrix(j_mat @ col @ j_mat)

    # U = m(id ⊗ S)(J); here S fixes the subgroup idempotents pointwise
    u_vec = np.zeros(a.dim, dtype=np.complex128)
    for (al, be), p1 in p.items():
        for (ga, de), p2 in p.items():
            u_vec += ((-1) ** (be * ga)) * a.mult(p1, g0.antipode @ p2)
    u_mat = a.to_matrix(u_vec)
    u_inv = np.linalg.inv(u_mat)
    antipode_j = np.zeros_like(g0.antipode)
    for q in range(a.dim):
        s_col = a.to_matrix(g0.antipode[:, q])
        antipode_j[:, q] = a.from_matrix(u_mat @ s_col @ u_inv)

    return FiniteQuantumGroup(a, comult_j, g0.counit.copy(), antipode_j,
                              label="KacPaljutkin8")


_QGROUP_BUILDERS = {
    "c-z2": lambda: function_algebra(cyclic_group(2)),
    "c-z3": lambda: function_algebra(cyclic_group(3)),
    "c-s3": lambda: function_algebra(builtin_group("s3")),
    "cg-z2": lambda: group_algebra(cyclic_group(2)),
    "cg-s3": lambda: group_algebra(builtin_group("s3")),
    "kac-paljutkin": kac_paljutkin,
}


def builtin_qgroup(name: str) -> FiniteQuantumGroup:
    key = name.lower()
    if key not in _QGROUP_BUILDERS:
        raise KeyError(
            f"unknown builtin quantum group {name!r}; available: "
            + ", ".join(sorted(_QGROUP_BUILDERS)))
    return _QGROUP_BUILDERS[key]()


def builtin_qgroup_names() -> list[str]:
    return sorted(_QGROUP_BUILDERS)
