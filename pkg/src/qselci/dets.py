"""Slater determinants as spin-resolved bitmasks, and the excitation algebra
connecting them.

Conventions used throughout the package:

* A determinant stores one integer bitmask per spin channel; bit ``p`` of
  ``alpha`` (``beta``) set means spatial orbital ``p`` holds an alpha (beta)
  electron.  Masks are plain Python ints, valid for up to 64 orbitals.
* Spin orbitals are indexed in blocked order: alpha orbitals occupy indices
  ``0 .. n-1`` and beta orbitals ``n .. 2n-1`` for ``n`` spatial orbitals.
  This same index is the qubit index after the fermion-to-qubit mapping and
  the character position in the text bitstring form (orbital 0 leftmost,
  alpha block first).
* A determinant is the product of creation operators in ascending
  spin-orbital index applied to the vacuum.  Annihilating or creating spin
  orbital ``k`` on an occupation ``x`` therefore picks up the sign
  ``(-1)**popcount(x below k)``.
* A bare excitation-operator string is applied as: annihilations in
  ascending spin-orbital order first, then creations in ascending order.
  ``ExcitationOp.phase`` is the sign that makes ``phase * string |source> =
  +|target>``.
"""

from dataclasses import dataclass
from itertools import combinations

from .errors import RankTooHigh, TooLarge

ENUMERATION_CAP = 10**7


@dataclass(frozen=True, order=True)
class Determinant:
    """Occupation bitmasks per spin channel (bit p = spatial orbital p)."""

    alpha: int
    beta: int

    @property
    def n_alpha(self):
        return self.alpha.bit_count()

    @property
    def n_beta(self):
        return self.beta.bit_count()

    def occupied_alpha(self):
        return _bits(self.alpha)

    def occupied_beta(self):
        return _bits(self.beta)

    def occupied_spin_orbitals(self, n_orbitals):
        """Occupied blocked spin-orbital indices, ascending."""
        return _bits(self.alpha) + [n_orbitals + p for p in _bits(self.beta)]

    def to_index(self, n_orbitals):
        """Basis index: bit s of the index = occupation of spin orbital s."""
        return self.alpha | (self.beta << n_orbitals)

    @classmethod
    def from_index(cls, index, n_orbitals):
        mask = (1 << n_orbitals) - 1
        return cls(alpha=index & mask, beta=(index >> n_orbitals) & mask)

    def to_bitstring(self, n_orbitals):
        """Text form: 2n chars, alpha block then beta block, orbital 0 first."""
        idx = self.to_index(n_orbitals)
        return "".join("1" if (idx >> s) & 1 else "0" for s in range(2 * n_orbitals))

    @classmethod
    def from_bitstring(cls, s):
        if len(s) % 2 or set(s) - {"0", "1"}:
            raise ValueError(f"not a spin-blocked occupation string: {s!r}")
        n = len(s) // 2
        idx = sum(1 << i for i, c in enumerate(s) if c == "1")
        return cls.from_index(idx, n)


def _bits(mask):
    out = []
    while mask:
        low = mask & -mask
        out.append(low.bit_length() - 1)
        mask ^= low
    return out


def hartree_fock(n_orbitals, n_alpha, n_beta):
    """Aufbau reference: lowest n_alpha / n_beta orbitals occupied."""
    if n_alpha > n_orbitals or n_beta > n_orbitals:
        raise ValueError("more electrons than orbitals in a spin channel")
    return Determinant(alpha=(1 << n_alpha) - 1, beta=(1 << n_beta) - 1)


def enumerate_space(n_orbitals, n_alpha, n_beta, cap=ENUMERATION_CAP):
    """All determinants of the (n_alpha, n_beta) sector, in ascending
    ``(alpha, beta)`` bitmask order.

    Raises TooLarge if the exact count C(n,na)*C(n,nb) exceeds ``cap``.
    """
    from math import comb

    count = comb(n_orbitals, n_alpha) * comb(n_orbitals, n_beta)
    if count > cap:
        raise TooLarge(
            f"sector ({n_alpha},{n_beta}) in {n_orbitals} orbitals has "
            f"{count} determinants, above the cap {cap}"
        )
    alphas = sorted(_mask(c) for c in combinations(range(n_orbitals), n_alpha))
    betas = sorted(_mask(c) for c in combinations(range(n_orbitals), n_beta))
    return [Determinant(a, b) for a in alphas for b in betas]


def _mask(orbitals):
    m = 0
    for p in orbitals:
        m |= 1 << p
    return m


def excitation_rank(d1, d2):
    """Number of orbital substitutions between two same-sector determinants."""
    return ((d1.alpha ^ d2.alpha).bit_count() + (d1.beta ^ d2.beta).bit_count()) // 2


@dataclass(frozen=True)
class ExcitationOp:
    """A bare excitation-operator string between two determinants.

    ``annihilated`` / ``created`` hold blocked spin-orbital indices in
    ascending order; ``phase`` is the sign making ``phase * string |source>``
    equal ``+|target>`` under the module's application convention.
    """

    n_orbitals: int
    annihilated: tuple
    created: tuple
    phase: int

    def __post_init__(self):
        if set(self.annihilated) & set(self.created):
            raise ValueError(
                "annihilated and created spin orbitals must be disjoint"
            )

    @property
    def rank(self):
        return len(self.annihilated)

    def spins(self):
        """'a' or 'b' per annihilated+created index (blocked ordering)."""
        n = self.n_orbitals
        return tuple("a" if s < n else "b" for s in self.annihilated + self.created)

    def apply_to(self, det):
        """Apply ``phase * string`` to a determinant.

        Returns ``(target, sign)`` with sign in {+1, -1}, or ``None`` when the
        string destroys the state (annihilating a hole / creating a particle).
        """
        n = self.n_orbitals
        x = det.to_index(n)
        sign = self.phase
        for s in self.annihilated:
            if not (x >> s) & 1:
                return None
            sign *= -1 if ((x & ((1 << s) - 1)).bit_count() & 1) else 1
            x ^= 1 << s
        for s in self.created:
            if (x >> s) & 1:
                return None
            sign *= -1 if ((x & ((1 << s) - 1)).bit_count() & 1) else 1
            x |= 1 << s
        return Determinant.from_index(x, n), sign


def excitation_between(source, target, n_orbitals):
    """The ExcitationOp mapping ``source`` onto ``target``.

    Raises RankTooHigh when the determinants are identical or differ by more
    than a double excitation.
    """
    rank = excitation_rank(source, target)
    if rank == 0 or rank > 2:
        raise RankTooHigh(f"rank {rank} excitation (supported: 1 or 2)")
    ann = _bits(source.alpha & ~target.alpha)
    ann += [n_orbitals + p for p in _bits(source.beta & ~target.beta)]
    cre = _bits(target.alpha & ~source.alpha)
    cre += [n_orbitals + p for p in _bits(target.beta & ~source.beta)]
    op = ExcitationOp(n_orbitals, tuple(sorted(ann)), tuple(sorted(cre)), phase=1)
    applied = op.apply_to(source)
    assert applied is not None
    got, sign = applied
    assert got == target
    return ExcitationOp(n_orbitals, op.annihilated, op.created, phase=sign)
