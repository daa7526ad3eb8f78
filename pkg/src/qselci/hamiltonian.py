"""Hamiltonian matrix elements between determinants, subspace matrices, and
eigensolvers.

Matrix elements follow the two-term determinant rules for a second-quantized
Hamiltonian with chemist-notation two-electron integrals,

    H = sum_pq h_pq E_pq + 1/2 sum_pqrs (pq|rs) [E_pq E_rs - delta_qr E_ps],

evaluated directly from occupation bitmasks.  Sign conventions match the
excitation-operator application order defined in :mod:`qselci.dets`; they are
pinned by tests against a dense operator-matrix construction.

The subspace eigenproblem is an ordinary symmetric one (determinants are
orthonormal).  ``davidson_lowest`` is a Davidson solver with a diagonal
preconditioner and thick restarts; ``fci_oracle`` enumerates a full sector
and diagonalizes it (dense below ``DENSE_CUTOFF``).
"""

import json
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse

from .dets import Determinant, enumerate_space, excitation_between, hartree_fock
from .errors import DuplicateDeterminant, NoConvergence, TooLarge

DENSE_CUTOFF = 2000
SPECTRUM_CAP = 2000
NORM_TOL = 1e-10


@dataclass
class SubspaceMatrix:
    """Electronic Hamiltonian projected onto a determinant list.

    ``matrix`` excludes the core energy, which is carried separately so the
    projection is independent of constant shifts.
    """

    dets: list
    matrix: scipy.sparse.csr_matrix
    core_energy: float
    n_orbitals: int

    @property
    def dim(self):
        return len(self.dets)

    def diagonal(self):
        return self.matrix.diagonal()


@dataclass
class Wavefunction:
    """A normalized expansion over determinants with its variational energy.

    ``energy`` includes the core offset.
    """

    dets: list
    coeffs: np.ndarray
    energy: float
    n_orbitals: int

    def __post_init__(self):
        self.coeffs = np.asarray(self.coeffs, dtype=float)
        if len(self.coeffs) != len(self.dets):
            raise ValueError("coefficient/determinant length mismatch")
        norm = float(np.sum(self.coeffs**2))
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"coefficients not normalized: sum of squares {norm}")

    def weight(self, det):
        try:
            i = self.dets.index(det)
        except ValueError:
            return 0.0
        return float(self.coeffs[i] ** 2)

    def to_json(self):
        coeffs = {
            d.to_bitstring(self.n_orbitals): float(c)
            for d, c in zip(self.dets, self.coeffs)
        }
        return json.dumps(
            {
                "n_orbitals": self.n_orbitals,
                "energy": self.energy,
                "coefficients": coeffs,
            },
            sort_keys=True,
            indent=1,
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        items = sorted(data["coefficients"].items())
        dets = [Determinant.from_bitstring(s) for s, _ in items]
        coeffs = np.array([c for _, c in items])
        return cls(
            dets=dets,
            coeffs=coeffs,
            energy=float(data["energy"]),
            n_orbitals=int(data["n_orbitals"]),
        )


def _spatial(s, n):
    return s if s < n else s - n


def _spin(s, n):
    return 0 if s < n else 1


def slater_condon(d1, d2, table):
    """Matrix element <d1|H|d2> (electronic part, no core energy).

    Zero when the determinants live in different per-spin particle sectors or
    differ by more than a double excitation.
    """
    if (
        d1.alpha.bit_count() != d2.alpha.bit_count()
        or d1.beta.bit_count() != d2.beta.bit_count()
    ):
        return 0.0
    diff = (d1.alpha ^ d2.alpha).bit_count() + (d1.beta ^ d2.beta).bit_count()
    if diff == 0:
        return _diagonal_element(d1, table)
    if diff == 2:
        return _single_element(d2, d1, table)
    if diff == 4:
        return _double_element(d2, d1, table)
    return 0.0


def _diagonal_element(d, table):
    n = table.n_orbitals
    occ = d.occupied_spin_orbitals(n)
    e = 0.0
    for i in occ:
        e += table.h[_spatial(i, n), _spatial(i, n)]
    for a, i in enumerate(occ):
        pi, si = _spatial(i, n), _spin(i, n)
        for j in occ[a + 1:]:
            pj, sj = _spatial(j, n), _spin(j, n)
            e += table.get_g(pi, pi, pj, pj)
            if si == sj:
                e -= table.get_g(pi, pj, pj, pi)
    return e


def _single_element(src, tgt, table):
    n = table.n_orbitals
    op = excitation_between(src, tgt, n)
    (m,), (a,) = op.annihilated, op.created
    pa, pm = _spatial(a, n), _spatial(m, n)
    e = table.h[pa, pm]
    sa = _spin(a, n)
    for i in src.occupied_spin_orbitals(n):
        if i == m:
            continue
        pi = _spatial(i, n)
        e += table.get_g(pa, pm, pi, pi)
        if _spin(i, n) == sa:
            e -= table.get_g(pa, pi, pi, pm)
    return op.phase * e


def _double_element(src, tgt, table):
    n = table.n_orbitals
    op = excitation_between(src, tgt, n)
    (m, m2), (a, b) = op.annihilated, op.created
    sa, sb = _spin(a, n), _spin(b, n)
    sm, sm2 = _spin(m, n), _spin(m2, n)
    pa, pb, pm, pm2 = (_spatial(x, n) for x in (a, b, m, m2))
    direct = table.get_g(pa, pm2, pb, pm) if (sa == sm2 and sb == sm) else 0.0
    cross = table.get_g(pa, pm, pb, pm2) if (sa == sm and sb == sm2) else 0.0
    return op.phase * (direct - cross)


def build_subspace(dets, table):
    """Project the Hamiltonian onto a determinant list (sparse symmetric)."""
    if len(set(dets)) != len(dets):
        seen = set()
        for d in dets:
            if d in seen:
                raise DuplicateDeterminant(f"{d} appears more than once")
            seen.add(d)
    n = table.n_orbitals
    size = len(dets)
    alphas = np.array([d.alpha for d in dets], dtype=np.uint64)
    betas = np.array([d.beta for d in dets], dtype=np.uint64)
    rows, cols, vals = [], [], []
    for i, di in enumerate(dets):
        diff = np.bitwise_count(alphas[i:] ^ alphas[i]) + np.bitwise_count(
            betas[i:] ^ betas[i]
        )
        for off in np.nonzero(diff <= 4)[0]:
            j = i + int(off)
            v = slater_condon(di, dets[j], table)
            if v != 0.0 or i == j:
                rows.append(i)
                cols.append(j)
                vals.append(v)
                if i != j:
                    rows.append(j)
                    cols.append(i)
                    vals.append(v)
    matrix = scipy.sparse.csr_matrix(
        (vals, (rows, cols)), shape=(size, size), dtype=float
    )
    return SubspaceMatrix(
        dets=list(dets),
        matrix=matrix,
        core_energy=table.core_energy,
        n_orbitals=n,
    )


def _canonical_sign(vec):
    k = int(np.argmax(np.abs(vec)))
    return -vec if vec[k] < 0 else vec


def dense_lowest(subspace):
    """Dense reference diagonalization (full eigensolve, lowest state)."""
    dense = subspace.matrix.toarray()
    w, v = scipy.linalg.eigh(dense)
    vec = _canonical_sign(v[:, 0])
    return Wavefunction(
        dets=subspace.dets,
        coeffs=vec,
        energy=float(w[0]) + subspace.core_energy,
        n_orbitals=subspace.n_orbitals,
    )


def davidson_lowest(
    subspace,
    tol=1e-8,
    max_iter=300,
    max_subspace=30,
    level_shift=1e-8,
    n_restart_keep=2,
):
    """Lowest eigenpair by the Davidson method with a diagonal preconditioner.

    Deterministic: the starting vector is the unit vector on the smallest
    diagonal element, stalled search directions fall back to coordinate
    vectors in ascending-diagonal order, and the returned eigenvector sign is
    fixed so its largest-magnitude component is positive.  Raises
    NoConvergence (carrying the best iterate) after ``max_iter`` iterations.
    """
    A = subspace.matrix
    dim = subspace.dim
    if dim == 0:
        raise ValueError("empty subspace")
    if dim == 1:
        return Wavefunction(
            dets=subspace.dets,
            coeffs=np.array([1.0]),
            energy=float(A[0, 0]) + subspace.core_energy,
            n_orbitals=subspace.n_orbitals,
        )
    diag = A.diagonal()
    order = np.argsort(diag, kind="stable")
    v0 = np.zeros(dim)
    v0[order[0]] = 1.0
    V = [v0]
    W = [A @ v0]
    theta, x = float(diag[order[0]]), v0
    max_subspace = min(max_subspace, dim)

    for _ in range(max_iter):
        Vm = np.column_stack(V)
        Wm = np.column_stack(W)
        T = Vm.T @ Wm
        T = (T + T.T) / 2
        evals, evecs = scipy.linalg.eigh(T)
        theta = float(evals[0])
        s = evecs[:, 0]
        x = Vm @ s
        r = Wm @ s - theta * x
        if np.linalg.norm(r) < tol:
            return Wavefunction(
                dets=subspace.dets,
                coeffs=_canonical_sign(x / np.linalg.norm(x)),
                energy=theta + subspace.core_energy,
                n_orbitals=subspace.n_orbitals,
            )
        if len(V) == dim:
            # Exact subspace reached; the Ritz pair is the eigenpair.
            return Wavefunction(
                dets=subspace.dets,
                coeffs=_canonical_sign(x / np.linalg.norm(x)),
                energy=theta + subspace.core_energy,
                n_orbitals=subspace.n_orbitals,
            )
        if len(V) >= max_subspace:
            kept = [Vm @ evecs[:, k] for k in range(min(n_restart_keep, len(V)))]
            V, W = [], []
            for vec in kept:
                vec = _orthonormalize(vec, V)
                if vec is not None:
                    V.append(vec)
                    W.append(A @ vec)
        denom = theta - diag
        small = np.abs(denom) < level_shift
        denom = np.where(small, np.where(denom >= 0, level_shift, -level_shift), denom)
        z = _orthonormalize(r / denom, V)
        if z is None:
            z = _fallback_direction(V, order)
            if z is None:
                break
        V.append(z)
        W.append(A @ z)

    raise NoConvergence(
        f"Davidson did not reach |r| < {tol} in {max_iter} iterations",
        energy=theta + subspace.core_energy,
        vector=_canonical_sign(x / np.linalg.norm(x)),
        iterations=max_iter,
    )


def _orthonormalize(vec, basis, threshold=1e-10):
    for _ in range(2):
        for b in basis:
            vec = vec - (b @ vec) * b
    norm = np.linalg.norm(vec)
    if norm < threshold:
        return None
    return vec / norm


def _fallback_direction(basis, order):
    for k in order:
        e = np.zeros(len(order))
        e[k] = 1.0
        z = _orthonormalize(e, basis, threshold=1e-6)
        if z is not None:
            return z
    return None


def fci_oracle(table, cap=10**7):
    """Ground state of the full (n_alpha, n_beta) sector of an integral table.

    Dense diagonalization below DENSE_CUTOFF determinants, Davidson above.
    Raises TooLarge when the sector exceeds ``cap``.
    """
    dets = enumerate_space(table.n_orbitals, table.n_alpha, table.n_beta, cap=cap)
    subspace = build_subspace(dets, table)
    if subspace.dim <= DENSE_CUTOFF:
        return dense_lowest(subspace)
    return davidson_lowest(subspace)


def spectral_halfwidth(subspace, cap=SPECTRUM_CAP):
    """(E_max - E_min) / 2 of a subspace matrix (core shift cancels)."""
    if subspace.dim > cap:
        raise TooLarge(
            f"dense spectrum of dimension {subspace.dim} above cap {cap}"
        )
    w = scipy.linalg.eigvalsh(subspace.matrix.toarray())
    return float((w[-1] - w[0]) / 2)


def hartree_fock_det(table):
    """Aufbau reference determinant for an integral table's sector."""
    return hartree_fock(table.n_orbitals, table.n_alpha, table.n_beta)
