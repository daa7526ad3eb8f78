"""Classical subspace growth through Hamiltonian coupling, plus a
second-order perturbative tail estimate.

The candidate pool around a wavefunction's determinant set S is every
spin-conserving single or double substitution of a member of S that is not
itself in S and has at least one nonzero Hamiltonian element back into S.
Candidates are scored by their summed coupling weight
``s_mu = sum_I |H_{mu I} c_I|``; those at or above a threshold (optionally
capped at the top k) join the set, and the enlarged projected problem is
re-solved.  The perturbative estimate uses the same pool with
state-specific denominators ``<mu|H|mu> - E_S``.
"""

from dataclasses import dataclass

from .dets import Determinant, _bits
from .hamiltonian import build_subspace, davidson_lowest, slater_condon

DENOMINATOR_TOL = 1e-8


def _single_substitutions(mask, n_orbitals):
    occ = _bits(mask)
    virt = [p for p in range(n_orbitals) if not (mask >> p) & 1]
    for i in occ:
        for a in virt:
            yield (mask ^ (1 << i)) | (1 << a)


def _double_substitutions(mask, n_orbitals):
    occ = _bits(mask)
    virt = [p for p in range(n_orbitals) if not (mask >> p) & 1]
    for ii in range(len(occ)):
        for jj in range(ii + 1, len(occ)):
            removed = mask ^ (1 << occ[ii]) ^ (1 << occ[jj])
            for aa in range(len(virt)):
                for bb in range(aa + 1, len(virt)):
                    yield removed | (1 << virt[aa]) | (1 << virt[bb])


def connected_set(psi, table):
    """All sector-preserving single/double substitutions of psi's set that
    lie outside it and couple to it through at least one nonzero element.

    Returned in ascending (alpha, beta) bitmask order.
    """
    n = table.n_orbitals
    in_set = set(psi.dets)
    seen = set()
    for det in psi.dets:
        a, b = det.alpha, det.beta
        alpha_singles = list(_single_substitutions(a, n))
        beta_singles = list(_single_substitutions(b, n))
        for a2 in alpha_singles:
            seen.add((a2, b))
        for b2 in beta_singles:
            seen.add((a, b2))
        for a2 in _double_substitutions(a, n):
            seen.add((a2, b))
        for b2 in _double_substitutions(b, n):
            seen.add((a, b2))
        for a2 in alpha_singles:
            for b2 in beta_singles:
                seen.add((a2, b2))
    candidates = []
    for a2, b2 in sorted(seen):
        det = Determinant(a2, b2)
        if det in in_set:
            continue
        if any(slater_condon(det, d, table) != 0.0 for d in psi.dets):
            candidates.append(det)
    return candidates


def _coupling_terms(candidate, psi, table):
    """Pairs (H_{mu I}, c_I) over the members of psi's set, zeros skipped."""
    terms = []
    for det, c in zip(psi.dets, psi.coeffs):
        h = slater_condon(candidate, det, table)
        if h != 0.0:
            terms.append((h, c))
    return terms


def score_candidates(psi, candidates, table):
    """Summed coupling weights s_mu, sorted descending with ascending
    (alpha, beta) bitmask order breaking ties."""
    scored = []
    for mu in candidates:
        s = sum(abs(h * c) for h, c in _coupling_terms(mu, psi, table))
        scored.append((mu, s))
    scored.sort(key=lambda t: (-t[1], t[0].alpha, t[0].beta))
    return scored


@dataclass
class ExpansionResult:
    added: list
    scores: list
    energy_before: float
    energy_after: float
    wavefunction_after: object

    @property
    def n_added(self):
        return len(self.added)


def expand_and_rediagonalize(psi, table, tau, top_k=None):
    """Grow the determinant set by coupling weight and re-solve.

    Candidates scoring at or above ``tau`` are added (all of them when
    ``tau`` is 0), optionally truncated to the ``top_k`` best.  When no
    candidate qualifies the input wavefunction is returned unchanged with
    an empty ``added`` list.  The re-solved energy can only stay equal or
    go down, because the old set is a subset of the new one.
    """
    if tau < 0:
        raise ValueError("threshold tau must be nonnegative")
    candidates = connected_set(psi, table)
    scored = score_candidates(psi, candidates, table)
    selected = [(mu, s) for mu, s in scored if s >= tau]
    if top_k is not None:
        selected = selected[: int(top_k)]
    if not selected:
        return ExpansionResult(
            added=[],
            scores=[],
            energy_before=psi.energy,
            energy_after=psi.energy,
            wavefunction_after=psi,
        )
    new_dets = list(psi.dets) + [mu for mu, _ in selected]
    subspace = build_subspace(new_dets, table)
    wf = davidson_lowest(subspace)
    return ExpansionResult(
        added=[mu for mu, _ in selected],
        scores=[s for _, s in selected],
        energy_before=psi.energy,
        energy_after=wf.energy,
        wavefunction_after=wf,
    )


@dataclass
class PT2Result:
    delta_e: float
    n_external: int
    n_skipped: int

    @property
    def corrected_energy_shift(self):
        return self.delta_e


def en_pt2(psi, table):
    """Second-order energy correction with state-specific denominators.

    delta_e = -sum_mu (sum_I H_{mu I} c_I)^2 / (<mu|H|mu> - E_S), summed
    over the connected set.  Terms whose denominator is below the
    tolerance are skipped and counted rather than allowed to blow up.
    The input wavefunction is left untouched.
    """
    candidates = connected_set(psi, table)
    e_s = psi.energy
    delta = 0.0
    skipped = 0
    for mu in candidates:
        numerator = sum(h * c for h, c in _coupling_terms(mu, psi, table))
        e_mu = slater_condon(mu, mu, table) + table.core_energy
        denom = e_mu - e_s
        if abs(denom) < DENOMINATOR_TOL:
            skipped += 1
            continue
        delta -= numerator * numerator / denom
    return PT2Result(delta_e=delta, n_external=len(candidates), n_skipped=skipped)
