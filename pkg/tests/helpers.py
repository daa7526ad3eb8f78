"""Small shared helpers for building randomized test inputs."""

import itertools

import numpy as np

from qselci.fcidump import IntegralTable


def random_table(n_orbitals, n_electrons, ms2=0, seed=0, with_core=True):
    """A dense random integral table with full 8-fold two-electron symmetry."""
    rng = np.random.default_rng(seed)
    table = IntegralTable(
        n_orbitals=n_orbitals,
        n_electrons=n_electrons,
        ms2=ms2,
        core_energy=float(rng.normal()) if with_core else 0.0,
    )
    h = rng.normal(size=(n_orbitals, n_orbitals))
    table.h = (h + h.T) / 2
    seen = set()
    for idx in itertools.product(range(n_orbitals), repeat=4):
        from qselci.fcidump import _canonical

        key = _canonical(*idx)
        if key not in seen:
            seen.add(key)
            table.set_g(*key, float(rng.normal() * 0.5))
    return table
