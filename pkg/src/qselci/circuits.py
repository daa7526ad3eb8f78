"""Ansatz circuits over determinant-pair excitation rotations.

A circuit prepares a reference determinant and applies an ordered gate list.
Gate kinds:

* ``ExcitationRotation`` — exp(theta (tau - tau^dag)) for one excitation
  string; carries a parameter slot.
* ``OrbitalRotation``    — a parameterized Givens pair on spatial orbitals
  (p, q), applied to both spin channels.
* ``JastrowPhase``       — diagonal phase exp(i angle n_p n_q) on a pair of
  spin-orbital qubits (p = q gives a single-qubit number phase); fixed angle.
* ``BasisRotationLayer`` — whole-register single-particle rotation compiled
  from a real antisymmetric generator kappa (optionally inverted).

Qubit index = blocked spin-orbital index.  Gate-list order is application
order (the first gate acts on the reference first).
"""

import json
from dataclasses import dataclass, field

import numpy as np

from .dets import Determinant, ExcitationOp, excitation_rank
from .errors import EmptySelection, ShapeMismatch, ZeroRank

GATE_EXCITATION = "ExcitationRotation"
GATE_ORBITAL = "OrbitalRotation"
GATE_JASTROW = "JastrowPhase"
GATE_BASIS = "BasisRotationLayer"


@dataclass(eq=False)
class Gate:
    kind: str
    qubits: tuple
    param_slot: int = None
    excitation: ExcitationOp = None
    angle: float = None
    kappa: np.ndarray = None
    inverse: bool = False
    layer: int = 0


@dataclass(eq=False)
class Circuit:
    n_qubits: int
    gates: list
    n_params: int
    layers: int
    reference: Determinant
    n_orbitals: int

    def __post_init__(self):
        for g in self.gates:
            if any(q >= self.n_qubits or q < 0 for q in g.qubits):
                raise ValueError(f"gate touches qubit outside register: {g.qubits}")
        slots = {g.param_slot for g in self.gates if g.param_slot is not None}
        if len(slots) != self.n_params:
            raise ValueError(
                f"n_params={self.n_params} but {len(slots)} distinct slots used"
            )

    def active_support(self):
        """Sorted qubits touched by any gate (compiled-support size)."""
        touched = set()
        for g in self.gates:
            touched.update(g.qubits)
        return sorted(touched)

    def to_json(self):
        gates = []
        for g in self.gates:
            entry = {
                "kind": g.kind,
                "qubits": list(g.qubits),
                "param_slot": g.param_slot,
                "layer": g.layer,
            }
            if g.excitation is not None:
                entry["excitation"] = {
                    "annihilated": list(g.excitation.annihilated),
                    "created": list(g.excitation.created),
                    "phase": g.excitation.phase,
                }
            if g.angle is not None:
                entry["angle"] = g.angle
            if g.kappa is not None:
                entry["kappa"] = np.asarray(g.kappa).tolist()
                entry["inverse"] = g.inverse
            gates.append(entry)
        return json.dumps(
            {
                "n_qubits": self.n_qubits,
                "n_orbitals": self.n_orbitals,
                "n_params": self.n_params,
                "layers": self.layers,
                "reference": self.reference.to_bitstring(self.n_orbitals),
                "gates": gates,
            },
            sort_keys=True,
            indent=1,
        )

    @classmethod
    def from_json(cls, text):
        data = json.loads(text)
        n_orb = int(data["n_orbitals"])
        gates = []
        for entry in data["gates"]:
            exc = None
            if "excitation" in entry:
                e = entry["excitation"]
                exc = ExcitationOp(
                    n_orbitals=n_orb,
                    annihilated=tuple(e["annihilated"]),
                    created=tuple(e["created"]),
                    phase=int(e["phase"]),
                )
            kappa = np.array(entry["kappa"]) if "kappa" in entry else None
            gates.append(
                Gate(
                    kind=entry["kind"],
                    qubits=tuple(entry["qubits"]),
                    param_slot=entry["param_slot"],
                    excitation=exc,
                    angle=entry.get("angle"),
                    kappa=kappa,
                    inverse=entry.get("inverse", False),
                    layer=entry.get("layer", 0),
                )
            )
        return cls(
            n_qubits=int(data["n_qubits"]),
            gates=gates,
            n_params=int(data["n_params"]),
            layers=int(data["layers"]),
            reference=Determinant.from_bitstring(data["reference"]),
            n_orbitals=n_orb,
        )


def gate_counts(circuit):
    """Summary in the shape of a resource table: per-kind counts, parameter
    count, greedy qubit-disjoint depth, and active support size."""
    by_kind = {}
    for g in circuit.gates:
        by_kind[g.kind] = by_kind.get(g.kind, 0) + 1
    free_at = {}
    depth = 0
    for g in circuit.gates:
        start = max((free_at.get(q, 0) for q in g.qubits), default=0)
        for q in g.qubits:
            free_at[q] = start + 1
        depth = max(depth, start + 1)
    return {
        "n_gates": len(circuit.gates),
        "by_kind": by_kind,
        "n_params": circuit.n_params,
        "layers": circuit.layers,
        "depth": depth,
        "active_support": len(circuit.active_support()),
        "n_qubits": circuit.n_qubits,
    }


# ------------------------------------------------------------- prescreening

def prescreen(seed, cutoff, top_m=None):
    """Determinants of a seed wavefunction ranked by |coefficient|.

    Descending |c|, ties broken by ascending (alpha, beta) bitmasks; entries
    below ``cutoff`` dropped; at most ``top_m`` kept.  The first determinant
    is the reference of any circuit built from the selection.
    """
    ranked = sorted(
        zip(seed.dets, seed.coeffs),
        key=lambda dc: (-abs(dc[1]), dc[0].alpha, dc[0].beta),
    )
    kept = [d for d, c in ranked if abs(c) >= cutoff]
    if top_m is not None:
        kept = kept[:top_m]
    if not kept:
        raise EmptySelection(f"no amplitude at or above cutoff {cutoff}")
    return kept


# ------------------------------------------------- excitation decomposition

def _full_excitation(source, target, n_orbitals):
    """ExcitationOp of any rank between same-sector determinants."""
    from .dets import _bits

    ann = _bits(source.alpha & ~target.alpha)
    ann += [n_orbitals + p for p in _bits(source.beta & ~target.beta)]
    cre = _bits(target.alpha & ~source.alpha)
    cre += [n_orbitals + p for p in _bits(target.beta & ~source.beta)]
    op = ExcitationOp(n_orbitals, tuple(sorted(ann)), tuple(sorted(cre)), phase=1)
    applied = op.apply_to(source)
    got, sign = applied
    assert got == target
    return ExcitationOp(n_orbitals, op.annihilated, op.created, phase=sign)


def decompose_excitation(reference, target, n_orbitals):
    """Split the reference→target excitation into rank-1/2 steps.

    Annihilated and created spin orbitals are matched in ascending-index
    order; the lowest pairs are grouped into doubles first, so rank 3 gives
    [double, single], rank 4 [double, double], rank 5 [double, double,
    single].  Each step's phase is computed on the intermediate determinant
    it actually acts on, so replaying the steps maps reference to target.
    """
    rank = excitation_rank(reference, target)
    if rank == 0:
        raise ZeroRank("reference and target are identical")
    whole = _full_excitation(reference, target, n_orbitals)
    ann, cre = whole.annihilated, whole.created
    steps = []
    current = reference
    pos = 0
    while pos < rank:
        width = 2 if rank - pos >= 2 else 1
        step = ExcitationOp(
            n_orbitals,
            ann[pos:pos + width],
            cre[pos:pos + width],
            phase=1,
        )
        nxt, sign = step.apply_to(current)
        steps.append(
            ExcitationOp(n_orbitals, step.annihilated, step.created, phase=sign)
        )
        current = nxt
        pos += width
    assert current == target
    return steps


# --------------------------------------------------------- circuit builders

def build_usci(
    reference,
    selected,
    n_orbitals,
    layers=1,
    degree_cap=None,
    with_orbital_rotation=False,
):
    """USCI circuit: per block, optional orbital-rotation Givens gates are
    prepended, then one decomposed excitation-rotation sequence per selected
    determinant (in selection order, i.e. descending seed amplitude).

    ``degree_cap`` limits the number of distinct partner qubits an excitation
    gate may give any single qubit within one block; gates that would exceed
    it are skipped.  Blocks are structurally identical but carry independent
    parameter slots.
    """
    if not selected:
        raise EmptySelection("empty determinant selection")
    if selected[0] != reference:
        raise ValueError("reference must be the first selected determinant")
    n_qubits = 2 * n_orbitals
    gates = []
    slot = 0
    for block in range(layers):
        if with_orbital_rotation:
            for p in range(1, n_orbitals):
                for q in range(p):
                    gates.append(
                        Gate(
                            kind=GATE_ORBITAL,
                            qubits=(q, p, n_orbitals + q, n_orbitals + p),
                            param_slot=slot,
                            layer=block,
                        )
                    )
                    slot += 1
        partners = {q: set() for q in range(n_qubits)}
        for target in selected[1:]:
            for op in decompose_excitation(reference, target, n_orbitals):
                qubits = tuple(sorted(op.annihilated + op.created))
                if degree_cap is not None and _exceeds_cap(
                    qubits, partners, degree_cap
                ):
                    continue
                for q in qubits:
                    partners[q].update(set(qubits) - {q})
                gates.append(
                    Gate(
                        kind=GATE_EXCITATION,
                        qubits=qubits,
                        param_slot=slot,
                        excitation=op,
                        layer=block,
                    )
                )
                slot += 1
    return Circuit(
        n_qubits=n_qubits,
        gates=gates,
        n_params=slot,
        layers=layers,
        reference=reference,
        n_orbitals=n_orbitals,
    )


def _exceeds_cap(qubits, partners, cap):
    group = set(qubits)
    for q in qubits:
        if len(partners[q] | (group - {q})) > cap:
            return True
    return False


def build_lucj(K, J, reference):
    """One layer of the cluster-Jastrow baseline: e^K e^{iJ} e^{-K}.

    ``K`` is a real antisymmetric n×n generator applied to both spin
    channels; ``J`` is a real symmetric 2n×2n tensor over spin-orbital
    pairs.  Gate order is application order, so the e^{-K} basis rotation
    comes first.  All angles are baked in: n_params = 0.
    """
    K = np.asarray(K, dtype=float)
    J = np.asarray(J, dtype=float)
    n = K.shape[0]
    if K.shape != (n, n) or np.abs(K + K.T).max() > 1e-12:
        raise ShapeMismatch("K must be real antisymmetric n x n")
    if J.shape != (2 * n, 2 * n) or np.abs(J - J.T).max() > 1e-12:
        raise ShapeMismatch("J must be real symmetric 2n x 2n")
    all_qubits = tuple(range(2 * n))
    gates = [Gate(kind=GATE_BASIS, qubits=all_qubits, kappa=K, inverse=True)]
    for p in range(2 * n):
        for q in range(p, 2 * n):
            if J[p, q] != 0.0:
                gates.append(
                    Gate(kind=GATE_JASTROW, qubits=(p, q), angle=float(J[p, q]))
                )
    gates.append(Gate(kind=GATE_BASIS, qubits=all_qubits, kappa=K, inverse=False))
    return Circuit(
        n_qubits=2 * n,
        gates=gates,
        n_params=0,
        layers=1,
        reference=reference,
        n_orbitals=n,
    )


# ------------------------------------------------------------ qubit mapping

_PAULI_PRODUCT = {
    ("I", "I"): (1, "I"), ("I", "X"): (1, "X"), ("I", "Y"): (1, "Y"), ("I", "Z"): (1, "Z"),
    ("X", "I"): (1, "X"), ("X", "X"): (1, "I"), ("X", "Y"): (1j, "Z"), ("X", "Z"): (-1j, "Y"),
    ("Y", "I"): (1, "Y"), ("Y", "X"): (-1j, "Z"), ("Y", "Y"): (1, "I"), ("Y", "Z"): (1j, "X"),
    ("Z", "I"): (1, "Z"), ("Z", "X"): (1j, "Y"), ("Z", "Y"): (-1j, "X"), ("Z", "Z"): (1, "I"),
}


def _string_product(terms_a, terms_b, n_qubits):
    """Multiply two Pauli-sum operators given as {string: coeff} maps."""
    out = {}
    for sa, ca in terms_a.items():
        for sb, cb in terms_b.items():
            coeff = ca * cb
            chars = []
            for k in range(n_qubits):
                ph, ch = _PAULI_PRODUCT[sa[k], sb[k]]
                coeff *= ph
                chars.append(ch)
            key = "".join(chars)
            out[key] = out.get(key, 0.0) + coeff
    return {s: c for s, c in out.items() if abs(c) > 1e-15}


def _ladder_terms(index, creation, n_qubits):
    """a (or a^dag) at a spin-orbital index as a 2-term Pauli sum with its
    Z chain on lower qubits: a = Z_chain (X + iY)/2, a^dag = Z_chain (X - iY)/2."""
    base = ["Z"] * index + ["I"] * (n_qubits - index)
    x_str = base.copy()
    x_str[index] = "X"
    y_str = base.copy()
    y_str[index] = "Y"
    sign = -0.5j if creation else 0.5j
    return {"".join(x_str): 0.5, "".join(y_str): sign}


def jordan_wigner(op, n_qubits):
    """Pauli expansion of the anti-Hermitian generator tau - tau^dag.

    Returns a list of (coefficient, label-string) pairs sorted by label;
    coefficients are purely imaginary (i times a real number).  Character k
    of a label is the Pauli acting on qubit k.
    """
    factors = [_ladder_terms(s, True, n_qubits) for s in reversed(op.created)]
    factors += [_ladder_terms(s, False, n_qubits) for s in reversed(op.annihilated)]
    product = {"I" * n_qubits: complex(op.phase)}
    for f in factors:
        product = _string_product(product, f, n_qubits)
    terms = []
    for label, coeff in product.items():
        anti = coeff - np.conj(coeff)  # tau - tau^dag keeps 2i * Im
        if abs(anti) > 1e-15:
            terms.append((anti, label))
    terms.sort(key=lambda t: t[1])
    return terms
