"""Molpro-style FCIDUMP integral files.

The file starts with an ``&FCI`` namelist header carrying at least NORB and
NELEC (MS2 defaults to 0; ORBSYM and ISYM are accepted and ignored), closed
by ``&END`` or ``/``.  Each body line is ``value i j k l`` with 1-based
orbital indices:

* ``i=j=k=l=0``      core / nuclear-repulsion energy
* ``k=l=0``          one-electron integral h(i,j)
* otherwise          two-electron integral (ij|kl) in chemist notation

Internally everything is 0-based.  Two-electron values are stored once per
8-fold-symmetric equivalence class under a canonical index tuple; repeated
records must agree within 1e-10 (the last write wins, with a warning).
"""

import io
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyInput, IndexOutOfRange, MalformedHeader, NonNumericValue

DUPLICATE_TOL = 1e-10


@dataclass
class IntegralTable:
    """One- and two-electron integrals of an active space, 0-based."""

    n_orbitals: int
    n_electrons: int
    ms2: int = 0
    core_energy: float = 0.0
    h: np.ndarray = None
    g: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.h is None:
            self.h = np.zeros((self.n_orbitals, self.n_orbitals))
        self.h = np.asarray(self.h, dtype=float)
        if self.h.shape != (self.n_orbitals, self.n_orbitals):
            raise ValueError("h must be n_orbitals x n_orbitals")

    @property
    def n_alpha(self):
        return (self.n_electrons + self.ms2) // 2

    @property
    def n_beta(self):
        return (self.n_electrons - self.ms2) // 2

    def set_h(self, p, q, value):
        self.h[p, q] = value
        self.h[q, p] = value

    def get_h(self, p, q):
        return self.h[p, q]

    def set_g(self, p, q, r, s, value):
        key = _canonical(p, q, r, s)
        old = self.g.get(key)
        if old is not None and abs(old - value) > DUPLICATE_TOL:
            warnings.warn(
                f"conflicting two-electron values for {key}: "
                f"{old!r} replaced by {value!r}",
                stacklevel=2,
            )
        self.g[key] = value

    def get_g(self, p, q, r, s):
        """(pq|rs), honoring the 8 chemist-notation permutations."""
        return self.g.get(_canonical(p, q, r, s), 0.0)


def _canonical(p, q, r, s):
    """Canonical representative of the chemist 8-fold symmetry class.

    (pq|rs) = (qp|rs) = (pq|sr) = (qp|sr) = (rs|pq) = (sr|pq) = (rs|qp) = (sr|qp)
    """
    pq = (p, q) if p >= q else (q, p)
    rs = (r, s) if r >= s else (s, r)
    return pq + rs if pq >= rs else rs + pq


def parse_fcidump(source):
    """Parse FCIDUMP text into an IntegralTable.

    ``source`` may be str, bytes, or a readable text/binary stream.
    """
    text = _as_text(source)
    lines = text.splitlines()
    if not text.strip():
        raise EmptyInput("no content", line_no=1)

    header_fields, body_start = _parse_header(lines)
    try:
        n_orb = int(header_fields["NORB"])
        n_elec = int(header_fields["NELEC"])
    except KeyError as missing:
        raise MalformedHeader(f"header missing {missing}", line_no=1) from None
    ms2 = int(header_fields.get("MS2", 0))
    if n_orb <= 0:
        raise MalformedHeader(f"NORB={n_orb} must be positive", line_no=1)

    table = IntegralTable(n_orbitals=n_orb, n_electrons=n_elec, ms2=ms2)
    seen_h = {}
    for line_no, raw in enumerate(lines[body_start:], start=body_start + 1):
        stripped = raw.strip()
        if not stripped:
            continue
        parts = stripped.split()
        if len(parts) != 5:
            raise NonNumericValue(
                f"expected 'value i j k l', got {stripped!r}", line_no=line_no
            )
        try:
            value = float(parts[0].replace("D", "E").replace("d", "e"))
        except ValueError:
            raise NonNumericValue(
                f"bad value field {parts[0]!r}", line_no=line_no
            ) from None
        try:
            i, j, k, l = (int(x) for x in parts[1:])
        except ValueError:
            raise NonNumericValue(
                f"bad index field in {stripped!r}", line_no=line_no
            ) from None
        for idx in (i, j, k, l):
            if idx < 0 or idx > n_orb:
                raise IndexOutOfRange(
                    f"orbital index {idx} outside 1..{n_orb}", line_no=line_no
                )
        if i == j == k == l == 0:
            table.core_energy = value
        elif k == 0 and l == 0:
            if i == 0:
                raise IndexOutOfRange(
                    f"one-electron record with i=0 in {stripped!r}", line_no=line_no
                )
            if j == 0:
                # Orbital-energy record written by some programs; not part of
                # the Hamiltonian here.
                warnings.warn(
                    f"line {line_no}: ignoring orbital-energy record for i={i}",
                    stacklevel=2,
                )
                continue
            key = (max(i, j) - 1, min(i, j) - 1)
            old = seen_h.get(key)
            if old is not None and abs(old - value) > DUPLICATE_TOL:
                warnings.warn(
                    f"line {line_no}: conflicting h{key}: {old!r} -> {value!r}",
                    stacklevel=2,
                )
            seen_h[key] = value
            table.set_h(key[0], key[1], value)
        elif (k == 0) != (l == 0) or i == 0 or j == 0:
            raise IndexOutOfRange(
                f"inconsistent zero indices in {stripped!r}", line_no=line_no
            )
        else:
            table.set_g(i - 1, j - 1, k - 1, l - 1, value)
    return table


def _as_text(source):
    if isinstance(source, bytes):
        return source.decode("ascii")
    if isinstance(source, str):
        return source
    data = source.read()
    if isinstance(data, bytes):
        return data.decode("ascii")
    return data


def _parse_header(lines):
    """Collect the &FCI ... &END namelist (possibly spanning lines)."""
    if not lines or not lines[0].lstrip().upper().startswith("&FCI"):
        raise MalformedHeader("file does not begin with &FCI", line_no=1)
    collected = []
    end_line = None
    for line_no, raw in enumerate(lines, start=1):
        content = raw.strip()
        if line_no == 1:
            content = content[len("&FCI"):]
        upper = content.upper()
        for terminator in ("&END", "/"):
            pos = upper.find(terminator)
            if pos >= 0:
                collected.append(content[:pos])
                end_line = line_no
                break
        if end_line is not None:
            break
        collected.append(content)
    if end_line is None:
        raise MalformedHeader("header never closed by &END or /", line_no=len(lines))

    fields = {}
    blob = " ".join(collected).replace("=", " = ")
    tokens = blob.replace(",", " ").split()
    key = None
    for tok in tokens:
        if tok == "=":
            continue
        next_is_value = key is not None
        if not next_is_value:
            key = tok.upper()
        else:
            # ORBSYM takes a list; keep appending values until the next key
            # (a token containing letters).
            if any(c.isalpha() for c in tok) and not _looks_numeric(tok):
                key = tok.upper()
                continue
            fields.setdefault(key, []).append(tok)
    flat = {}
    for k, vals in fields.items():
        flat[k] = vals[0] if len(vals) == 1 else vals
    for required in ("NORB", "NELEC"):
        if required in flat and isinstance(flat[required], list):
            raise MalformedHeader(f"{required} given multiple values", line_no=1)
    for k in ("NORB", "NELEC", "MS2"):
        if k in flat:
            try:
                int(flat[k])
            except (TypeError, ValueError):
                raise MalformedHeader(f"{k}={flat[k]!r} is not an integer", line_no=1)
    return flat, end_line


def _looks_numeric(tok):
    try:
        float(tok.replace("D", "E").replace("d", "e"))
        return True
    except ValueError:
        return False


def serialize_fcidump(table):
    """Render an IntegralTable back to FCIDUMP text (1-based, %.16e values)."""
    out = io.StringIO()
    out.write(
        f"&FCI NORB={table.n_orbitals},NELEC={table.n_electrons},"
        f"MS2={table.ms2},\n"
    )
    out.write(" ORBSYM=" + ",".join(["1"] * table.n_orbitals) + ",\n")
    out.write(" ISYM=1,\n")
    out.write("&END\n")
    for (p, q, r, s), value in sorted(table.g.items()):
        out.write(f"{value: .16e} {p + 1} {q + 1} {r + 1} {s + 1}\n")
    for p in range(table.n_orbitals):
        for q in range(p + 1):
            if table.h[p, q] != 0.0:
                out.write(f"{table.h[p, q]: .16e} {p + 1} {q + 1} 0 0\n")
    out.write(f"{table.core_energy: .16e} 0 0 0 0\n")
    return out.getvalue()


def table_summary(table):
    """Header fields plus integral counts (for the info subcommand)."""
    return {
        "n_orbitals": table.n_orbitals,
        "n_electrons": table.n_electrons,
        "ms2": table.ms2,
        "n_alpha": table.n_alpha,
        "n_beta": table.n_beta,
        "core_energy": table.core_energy,
        "n_one_electron": int(np.count_nonzero(table.h)),
        "n_two_electron_classes": len(table.g),
    }
