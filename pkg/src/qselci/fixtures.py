"""Built-in integral tables for demonstrations and tests.

Three desk-scale systems:

* ``hubbard4``          half-filled 4-site open Hubbard chain (t=1, U=2)
* ``two-orbital``       a 2-electron / 2-orbital minimal-basis-style dimer
* ``h-chain-synthetic`` 6 orbitals / 6 electrons with nearest-neighbor
                        hopping and distance-decaying repulsion

All values are synthetic constants defined here; expected energies in tests
come from this package's own solvers and oracles.
"""

from .errors import UnknownFixture
from .fcidump import IntegralTable


def hubbard_chain_table(n_sites=4, t=1.0, u=2.0, n_electrons=None):
    """Open-boundary Hubbard chain: h[p,p+1] = -t, (pp|pp) = U."""
    if n_electrons is None:
        n_electrons = n_sites
    table = IntegralTable(n_orbitals=n_sites, n_electrons=n_electrons, ms2=0)
    for p in range(n_sites - 1):
        table.set_h(p, p + 1, -t)
    for p in range(n_sites):
        table.set_g(p, p, p, p, u)
    return table


def two_orbital_table():
    """Two orbitals, two electrons; values shaped like a stretched dimer."""
    table = IntegralTable(n_orbitals=2, n_electrons=2, ms2=0, core_energy=0.7137)
    table.set_h(0, 0, -1.2524)
    table.set_h(1, 1, -0.4759)
    table.set_g(0, 0, 0, 0, 0.6746)
    table.set_g(1, 1, 1, 1, 0.6975)
    table.set_g(0, 0, 1, 1, 0.6636)
    table.set_g(0, 1, 0, 1, 0.1813)
    return table


def h_chain_synthetic_table(n_sites=6):
    """Hydrogen-chain-flavored synthetic table with decaying repulsion."""
    table = IntegralTable(n_orbitals=n_sites, n_electrons=n_sites, ms2=0,
                          core_energy=1.5)
    for p in range(n_sites):
        table.set_h(p, p, -1.0 - 0.02 * p)
        if p + 1 < n_sites:
            table.set_h(p, p + 1, -0.8)
    for p in range(n_sites):
        for q in range(p + 1):
            table.set_g(p, p, q, q, 0.75 / (1.0 + abs(p - q)))
    for p in range(n_sites - 1):
        table.set_g(p, p + 1, p, p + 1, 0.12)
    return table


FIXTURES = {
    "hubbard4": hubbard_chain_table,
    "two-orbital": two_orbital_table,
    "h-chain-synthetic": h_chain_synthetic_table,
}


def fixture_table(name):
    try:
        return FIXTURES[name]()
    except KeyError:
        raise UnknownFixture(
            f"unknown fixture {name!r}; available: {sorted(FIXTURES)}"
        ) from None
