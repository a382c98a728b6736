"""Finite quantum groups as Hopf *-algebra data on multi-matrix algebras.

A quantum group is specified by its function algebra ``A`` together with
explicit matrices for the comultiplication, counit and antipode over the
matrix-unit basis of ``A``.  The Haar state, the irreducible unitary
corepresentations (with canonical diagonal intertwiners ``F`` and quantum
dimensions ``M``), conjugates, Kronecker products and fusion rules are all
computed numerically from that data.

Conventions
-----------
* Linear maps into tensor products use Kronecker pair coordinates: the
  coordinate vector of ``Δ(x)`` reshapes to ``(dim A, dim A)`` with the
  first tensor leg on axis 0.
* A corepresentation is a ``(d, d, dim A)`` array ``u`` with
  ``Δ(u_ij) = Σ_k u_ik ⊗ u_kj``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .algebra import AlgElem, MultiMatrixAlgebra, tensor_algebra
from .linalg import (
    TOL,
    as_complex,
    dagger,
    max_abs,
    nullspace,
    orthonormal_rows,
)
from .subspaces import OperatorSubspace, wedderburn


class QuantumGroupError(ValueError):
    """Invalid Hopf *-algebra data or a failed internal consistency check."""


def _sqrtm_posdef(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(m)
    if np.min(w) <= 0:
        raise QuantumGroupError("matrix expected positive definite")
    r = (v * np.sqrt(w)) @ dagger(v)
    rinv = (v / np.sqrt(w)) @ dagger(v)
    return r, rinv


class Corep:
    """A matrix corepresentation ``u = Σ m_ij ⊗ u_ij`` of a quantum group."""

    def __init__(self, parent: "FiniteQuantumGroup", entries: np.ndarray,
                 label: int | None = None, check: bool = True):
        self.parent = parent
        self.entries = as_complex(entries)
        if self.entries.ndim != 3 or self.entries.shape[0] != self.entries.shape[1] \
                or self.entries.shape[2] != parent.dim:
            raise ValueError("corep entries must have shape (d, d, dim A)")
        self.d = self.entries.shape[0]
        self.label = label
        self.F: np.ndarray | None = None   # diagonal of the canonical intertwiner
        self.M: float | None = None
        if check:
            resid = self.corep_residual()
            if resid > 1e-8:
                raise QuantumGroupError(f"corepresentation identity fails ({resid:.2e})")

    def corep_residual(self) -> float:
        g = self.parent
        lhs = np.einsum("tq,ijq->ijt", g.comult, self.entries).reshape(
            self.d, self.d, g.dim, g.dim)
        rhs = np.einsum("ikp,kjq->ijpq", self.entries, self.entries)
        return max_abs(lhs.reshape(rhs.shape) - rhs)

    def is_unitary(self, tol: float = 1e-8) -> bool:
        g = self.parent
        st = g.A.star_batch(self.entries)
        gram = np.einsum("kip,kjq,pqr->ijr", st, self.entries, g.mult_tensor)
        target = np.einsum("ij,r->ijr", np.eye(self.d), g.A.unit_vec)
        return max_abs(gram - target) <= tol

    def elem(self, i: int, j: int) -> AlgElem:
        return AlgElem(self.parent.A, self.entries[i, j])

    def character_vec(self) -> np.ndarray:
        return np.einsum("iip->p", self.entries)

    def coefficient_span(self) -> np.ndarray:
        return orthonormal_rows(self.entries.reshape(self.d * self.d, self.parent.dim))

    def conjugate_entries(self) -> np.ndarray:
        return self.parent.A.star_batch(self.entries)

    def __repr__(self):
        lab = "?" if self.label is None else self.label
        return f"<Corep {lab} d={self.d}>"


@dataclass(frozen=True)
class FusionReport:
    left: int
    right: int
    components: tuple[tuple[int, int], ...]   # (irrep label, multiplicity)
    intertwiner: np.ndarray                   # unitary d_left*d_right square

    def component_labels(self) -> list[int]:
        return [lab for lab, mult in self.components for _ in range(mult)]


class FiniteQuantumGroup:
    """Hopf *-algebra data (Δ, ε, S) on a multi-matrix algebra.

    Construction validates the Hopf axioms; the Haar state and the full
    list of irreducible unitary corepresentations are computed lazily and
    cached.
    """

    def __init__(self, a: MultiMatrixAlgebra, comult: np.ndarray,
                 counit: np.ndarray, antipode: np.ndarray, label: str = "G"):
        self.A = a
        self.dim = a.dim
        self.comult = as_complex(comult)
        self.counit = as_complex(counit).reshape(-1)
        self.antipode = as_complex(antipode)
        self.label = label
        if self.comult.shape != (a.dim * a.dim, a.dim):
            raise ValueError("comultiplication matrix has wrong shape")
        if self.counit.shape != (a.dim,):
            raise ValueError("counit has wrong shape")
        if self.antipode.shape != (a.dim, a.dim):
            raise ValueError("antipode matrix has wrong shape")
        self.validate()

    # -- cached structural data ---------------------------------------

    @cached_property
    def AA(self) -> MultiMatrixAlgebra:
        return tensor_algebra(self.A, self.A)

    @cached_property
    def mult_tensor(self) -> np.ndarray:
        return self.A.mult_tensor()

    @cached_property
    def mult_matrix(self) -> np.ndarray:
        """Multiplication as a (dim, dim^2) matrix over pair coordinates."""
        d = self.dim
        return self.mult_tensor.reshape(d * d, d).T

    def validate(self, tol: float = 1e-8) -> dict[str, float]:
        """Check the Hopf *-algebra axioms; raise on any failure."""
        a = self.A
        d = self.dim
        eye = np.eye(d)
        res: dict[str, float] = {}
        unit_pair = np.kron(a.unit_vec, a.unit_vec)
        res["comult unital"] = max_abs(self.comult @ a.unit_vec - unit_pair)
        m3 = self.mult_tensor
        # multiplicativity: Δ(e_p e_q) = Δ(e_p)Δ(e_q) in A ⊗ A
        aa = self.AA
        lhs = np.einsum("pqr,sr->pqs", m3, self.comult)   # (p, q, pair)
        worst = 0.0
        for p in range(d):
            dp = self.comult[:, p]
            for q in range(d):
                prod = aa.mult(dp, self.comult[:, q])
                worst = max(worst, max_abs(prod - lhs[p, q]))
        res["comult multiplicative"] = worst
        star_resid = 0.0
        sm = a.star_matrix()
        for p in range(d):
            lhs_v = self.comult @ sm[:, p]
            rhs_v = aa.star(self.comult[:, p])
            star_resid = max(star_resid, max_abs(lhs_v - rhs_v))
        res["comult *-map"] = star_resid
        res["coassociativity"] = max_abs(
            np.kron(self.comult, eye) @ self.comult
            - np.kron(eye, self.comult) @ self.comult)
        res["counit left"] = max_abs(np.kron(self.counit[None, :], eye) @ self.comult - eye)
        res["counit right"] = max_abs(np.kron(eye, self.counit[None, :]) @ self.comult - eye)
        eps_unit = np.outer(a.unit_vec, self.counit)
        res["antipode left"] = max_abs(
            self.mult_matrix @ np.kron(self.antipode, eye) @ self.comult - eps_unit)
        res["antipode right"] = max_abs(
            self.mult_matrix @ np.kron(eye, self.antipode) @ self.comult - eps_unit)
        bad = {k: v for k, v in res.items() if v > tol}
        if bad:
            raise QuantumGroupError(f"Hopf axioms violated: {bad}")
        return res

    # -- Haar state -----------------------------------------------------

    @cached_property
    def haar(self) -> np.ndarray:
        """The unique bi-invariant state, as a functional vector."""
        d = self.dim
        # c3[q, t, p]: coefficient of e_q ⊗ e_t in Δ(e_p)
        c3 = np.stack([self.comult[:, p].reshape(d, d) for p in range(d)], axis=2)
        unit = self.A.unit_vec
        rows = []
        eye = np.eye(d)
        for p in range(d):
            rows.append(c3[:, :, p] - np.outer(unit, eye[p]))          # (id ⊗ h)Δ = h(·)1
            rows.append(c3[:, :, p].T - np.outer(unit, eye[p]))        # (h ⊗ id)Δ = h(·)1
        null = nullspace(np.concatenate(rows, axis=0))
        if len(null) != 1:
            raise QuantumGroupError(
                f"invariant functional space has dimension {len(null)} (expected 1)")
        h = null[0]
        scale = h @ unit
        if abs(scale) < 1e-12:
            raise QuantumGroupError("invariant functional is degenerate at the unit")
        h = h / scale
        gram = self.haar_gram(h)
        w = np.linalg.eigvalsh(gram)
        if np.min(w) < -1e-9:
            raise QuantumGroupError("Haar functional is not positive")
        if np.min(w) < 1e-10:
            raise QuantumGroupError("Haar state is not faithful")
        return h

    def haar_gram(self, h: np.ndarray | None = None) -> np.ndarray:
        """Gram matrix H[p, q] = h(e_p* e_q)."""
        if h is None:
            h = self.haar
        sm = self.A.star_matrix()
        # e_p* = Σ_r sm[r, p] e_r, so h(e_p* e_q) = Σ_{r,s} sm[r,p] m3[r,q,s] h_s
        m3 = self.mult_tensor
        return np.einsum("rp,rqs,s->pq", sm, m3, h)

    def haar_value(self, vec: np.ndarray) -> complex:
        return complex(self.haar @ vec)

    # -- Peter-Weyl decomposition ---------------------------------------

    @cached_property
    def irreps(self) -> list[Corep]:
        return peter_weyl(self)

    @cached_property
    def conjugate_labels(self) -> dict[int, int]:
        return {u.label: conjugate(u).label for u in self.irreps}

    def irrep(self, label: int) -> Corep:
        return self.irreps[label]

    @property
    def trivial(self) -> Corep:
        return self.irreps[0]

    def functional_mul_right(self, a_vec: np.ndarray) -> np.ndarray:
        """The functional ``h·a : x -> h(xa)`` as a vector."""
        m3 = self.mult_tensor
        return np.einsum("pqs,q,s->p", m3, a_vec, self.haar)

    def __repr__(self):
        return f"<FiniteQuantumGroup {self.label} dim={self.dim}>"


# ---------------------------------------------------------------------------
# Peter-Weyl machinery
# ---------------------------------------------------------------------------

def regular_corep(g: FiniteQuantumGroup) -> np.ndarray:
    """The comultiplication viewed as a corep of A on the vector space A:
    V[q, p] in A with Δ(e_p) = Σ_q e_q ⊗ V_qp."""
    d = g.dim
    v = np.zeros((d, d, d), dtype=np.complex128)
    for p in range(d):
        v[:, p, :] = g.comult[:, p].reshape(d, d)
    return v


def _intertwiner_space(g: FiniteQuantumGroup, u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Solutions T (d_w x d_u) of w (T ⊗ 1) = (T ⊗ 1) u, as stacked rows."""
    du, dw = u.shape[0], w.shape[0]
    n = g.dim
    eqs = np.zeros((dw, du, n, dw, du), dtype=np.complex128)
    for i in range(dw):
        for p in range(du):
            for q in range(dw):
                eqs[i, p, :, q, p] += w[i, q]
            for q in range(du):
                eqs[i, p, :, i, q] -= u[q, p]
    mat = eqs.reshape(dw * du * n, dw * du)
    return nullspace(mat)


def intertwiners(u: Corep, w: Corep) -> np.ndarray:
    """Basis of Hom(u, w) = {T : w (T⊗1) = (T⊗1) u}, as (k, d_w, d_u)."""
    sols = _intertwiner_space(u.parent, u.entries, w.entries)
    return sols.reshape(-1, w.d, u.d)


def equivalent(u: Corep, w: Corep) -> bool:
    if u.d != w.d:
        return False
    return len(intertwiners(u, w)) > 0


def _unitarize(g: FiniteQuantumGroup, entries: np.ndarray) -> np.ndarray:
    """Rotate a corep to a unitary representative using K = (id ⊗ h)(u† u)."""
    d = entries.shape[0]
    st = g.A.star_batch(entries)
    k = np.einsum("kip,kjq,pqr,r->ij", st, entries, g.mult_tensor, g.haar)
    k = (k + dagger(k)) / 2
    r, rinv = _sqrtm_posdef(k)
    out = np.einsum("ia,abp,bj->ijp", r, entries, rinv)
    return out


def peter_weyl(g: FiniteQuantumGroup) -> list[Corep]:
    """All irreducible unitary corepresentations, from the regular corep.

    The commutant of the regular corep is decomposed with the Wedderburn
    machinery (in coordinates made orthonormal by the Haar Gram matrix);
    ranges of its minimal projections carry one copy of each class.
    """
    n = g.dim
    v = regular_corep(g)
    gram = g.haar_gram()
    r, rinv = _sqrtm_posdef((gram + dagger(gram)) / 2)

    sols = _intertwiner_space(g, v, v)          # End(V) in h-coordinates
    mats = sols.reshape(-1, n, n)
    std = np.einsum("ij,ajk,kl->ail", r, mats, rinv)
    end_space = OperatorSubspace.from_matrices(n, std)
    wd = wedderburn(end_space, np.random.default_rng(23))

    found: list[np.ndarray] = []
    for j, rr in enumerate(wd.algebra.blocks):
        e_abs = np.zeros(wd.algebra.dim, dtype=np.complex128)
        offset = sum(b * b for b in wd.algebra.blocks[:j])
        e_abs[offset] = 1.0                     # abstract matrix unit E^{(j)}_{11}
        e_std = wd.from_abstract_vec(e_abs)
        w_eig, v_eig = np.linalg.eigh((e_std + dagger(e_std)) / 2)
        cols = v_eig[:, w_eig > 0.5]
        w_mat = rinv @ cols                     # range of e in h-coordinates
        d_alpha = w_mat.shape[1]
        # coefficients: V(w_k) = Σ_i w_i ⊗ u_ik
        x = np.einsum("qpt,pk->qkt", v, w_mat)
        pinv = np.linalg.pinv(w_mat)
        u = np.einsum("iq,qkt->ikt", pinv, x)
        resid = max_abs(np.einsum("qi,ikt->qkt", w_mat, u) - x)
        if resid > 1e-7:
            raise QuantumGroupError("regular corep range is not invariant")
        found.append(_unitarize(g, u))

    coreps = [Corep(g, u, check=True) for u in found]
    for u in coreps:
        if not u.is_unitary():
            raise QuantumGroupError("unitarization failed")
        f_matrix(u)

    total = sum(u.d * u.d for u in coreps)
    if total != n:
        raise QuantumGroupError(
            f"Peter-Weyl completeness fails: Σ d² = {total} != dim A = {n}")

    trivial_idx = [i for i, u in enumerate(coreps)
                   if u.d == 1 and max_abs(u.entries[0, 0] - g.A.unit_vec) < 1e-7]
    if len(trivial_idx) != 1:
        raise QuantumGroupError("trivial corepresentation not found exactly once")

    def fingerprint(u: Corep) -> bytes:
        q = u.coefficient_span()
        proj = dagger(q) @ q
        return np.round(proj, 6).tobytes()

    first = coreps.pop(trivial_idx[0])
    coreps.sort(key=lambda u: (u.d, fingerprint(u)))
    ordered = [first] + coreps
    for i, u in enumerate(ordered):
        u.label = i
    return ordered


def f_matrix(u: Corep) -> tuple[np.ndarray, float]:
    """Canonical positive intertwiner between u and its double
    contragredient, normalized by tr F = tr F^{-1}; rotates the
    representative so that F is diagonal.

    Returns (diagonal of F, M = tr F) and stores them on the corep.
    """
    g = u.parent
    ucc = np.einsum("tq,ijq->ijt", g.antipode @ g.antipode, u.entries)
    sols = _intertwiner_space(g, u.entries, ucc)
    if len(sols) != 1:
        raise QuantumGroupError(
            f"double-contragredient intertwiner space has dimension {len(sols)}")
    t = sols[0].reshape(u.d, u.d)
    if max_abs(t - dagger(t)) > 1e-7 * max(1.0, max_abs(t)):
        # the 1-dim solution space contains a Hermitian representative
        t = t * np.exp(-1j * np.angle(np.trace(t)))
        t = (t + dagger(t)) / 2
    w = np.linalg.eigvalsh(t)
    if np.all(w < 0):
        t, w = -t, -w
    if np.min(w) <= 0:
        raise QuantumGroupError("intertwiner is not definite")
    scale = np.sqrt(np.sum(1.0 / w) / np.sum(w))
    f = t * scale
    w_f, v_f = np.linalg.eigh(f)
    order = np.argsort(w_f)[::-1]
    w_f, v_f = w_f[order], v_f[:, order]
    if max_abs(v_f - np.eye(u.d)) > 1e-9:
        u.entries = np.einsum("ai,abp,bj->ijp", v_f.conj(), u.entries, v_f)
    u.F = w_f.real.copy()
    u.M = float(np.sum(u.F))
    if abs(np.sum(u.F) - np.sum(1.0 / u.F)) > 1e-7:
        raise QuantumGroupError("trace normalization of F failed")
    return u.F, u.M


def verify_orthogonality(g: FiniteQuantumGroup, tol: float = 1e-9) -> float:
    """Check the Haar orthogonality relations for all pairs of irreps.

    h(u*_ij u_mn) = δ_im δ_jn / (M f_i)  within one class,
    h(u_mk u*_nl) = δ_mn δ_lk f_l / M    within one class,
    and zero across distinct classes.  Returns the maximal deviation.
    """
    worst = 0.0
    m3 = g.mult_tensor
    h = g.haar
    for u in g.irreps:
        st_u = g.A.star_batch(u.entries)
        for w in g.irreps:
            st_w = g.A.star_batch(w.entries)
            left = np.einsum("ijp,mnq,pqr,r->ijmn", st_u, w.entries, m3, h)
            right = np.einsum("mkp,nlq,pqr,r->mknl", u.entries, st_w, m3, h)
            if u.label == w.label:
                d = u.d
                expect_left = np.einsum(
                    "im,jn,i->ijmn", np.eye(d), np.eye(d), 1.0 / (u.M * u.F))
                expect_right = np.einsum(
                    "mn,lk,l->mknl", np.eye(d), np.eye(d), u.F / u.M)
                worst = max(worst, max_abs(left - expect_left),
                            max_abs(right - expect_right))
            else:
                worst = max(worst, max_abs(left), max_abs(right))
    if worst > tol:
        raise QuantumGroupError(
            f"Haar orthogonality fails at {worst:.2e} (tolerance {tol:.0e})")
    return worst


def conjugate(u: Corep) -> Corep:
    """The entrywise-adjoint corep, with its class identified."""
    g = u.parent
    ubar = Corep(g, u.conjugate_entries(), check=True)
    for w in g.irreps:
        if w.d == u.d and len(intertwiners(ubar, w)):
            ubar.label = w.label
            return ubar
    raise QuantumGroupError("conjugate class not found among the irreps")


def kronecker(u: Corep, w: Corep) -> Corep:
    """Kronecker product corep with row-major (u-major) index pairs."""
    if u.parent is not w.parent:
        raise ValueError("coreps live on different quantum groups")
    g = u.parent
    ent = np.einsum("pqa,rsb,abc->prqsc", u.entries, w.entries, g.mult_tensor)
    d = u.d * w.d
    return Corep(g, ent.reshape(d, d, g.dim), check=True)


def fuse(u: Corep, w: Corep) -> FusionReport:
    """Decompose u ⊙ w into irreducibles with an explicit unitary.

    Multiplicities come from intertwiner spaces and are cross-checked
    against the character formula h(χ_ρ* χ_u χ_w).
    """
    g = u.parent
    prod = kronecker(u, w)
    d_total = prod.d
    char_prod = np.einsum("p,q,pqr->r", u.character_vec(), w.character_vec(),
                          g.mult_tensor)
    blocks: list[tuple[int, int]] = []
    columns = []
    for rho in g.irreps:
        sols = intertwiners(rho, prod)    # T with prod (T⊗1) = (T⊗1) rho
        mult = len(sols)
        triple = np.einsum("p,q,pqs->s", g.A.star_batch(rho.character_vec()),
                           char_prod, g.mult_tensor)
        char_mult = complex(g.haar @ triple)
        if abs(char_mult - mult) > 1e-7:
            raise QuantumGroupError(
                f"fusion multiplicity mismatch for {rho.label}: "
                f"intertwiners {mult}, characters {char_mult:.6f}")
        if mult == 0:
            continue
        blocks.append((rho.label, mult))
        # orthonormalize copies: T_s† T_t is a scalar matrix by Schur
        gram = np.einsum("aji,bjk->aibk", sols.conj(), sols)
        c = np.einsum("aibi->ab", gram) / rho.d
        cw, cv = np.linalg.eigh((c + dagger(c)) / 2)
        lowdin = (cv / np.sqrt(cw)) @ dagger(cv)
        tilde = np.einsum("ab,bij->aij", lowdin.T, sols)
        for t in tilde:
            columns.append(t)
    if not blocks:
        raise QuantumGroupError("fusion produced no components")
    uu = np.concatenate([t.reshape(d_total, -1) for t in columns], axis=1)
    if uu.shape != (d_total, d_total):
        raise QuantumGroupError("fusion intertwiner is not square")
    if max_abs(dagger(uu) @ uu - np.eye(d_total)) > 1e-7:
        raise QuantumGroupError("fusion intertwiner is not unitary")
    report = FusionReport(left=u.label, right=w.label,
                          components=tuple(blocks), intertwiner=uu)
    _check_block_diagonal(prod, report, g)
    return report


def _check_block_diagonal(prod: Corep, report: FusionReport, g: FiniteQuantumGroup):
    uu = report.intertwiner
    rotated = np.einsum("ai,abp,bj->ijp", uu.conj(), prod.entries, uu)
    block = np.zeros_like(rotated)
    offset = 0
    for lab, mult in report.components:
        rho = g.irrep(lab)
        for _ in range(mult):
            block[offset:offset + rho.d, offset:offset + rho.d, :] = rho.entries
            offset += rho.d
    if max_abs(rotated - block) > 1e-7:
        raise QuantumGroupError("fusion result is not block diagonal")
