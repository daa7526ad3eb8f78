"""The hybrid sample-select-diagonalize loop and its parameter optimization.

One pass (:func:`run_qsci_once`) is: apply the circuit, form the ideal
outcome distribution, mix in global depolarizing noise, draw shots, apply
readout flips, filter by the particle-number sector, de-duplicate the
surviving bitstrings into determinants, project the Hamiltonian onto them,
and solve for the lowest eigenpair.

All randomness derives from the config's single seed: stage seeds are drawn
from numpy's SeedSequence(seed) in a fixed order (sampling first, readout
second), so a run is replayable from one number.  The optimizer reuses one
sampling seed across evaluations, making the objective deterministic, as
trust-region derivative-free methods require.
"""

import contextlib
import os
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from .errors import EmptySubspace
from .hamiltonian import build_subspace, davidson_lowest
from .sampling import (
    NoiseModel,
    apply_readout,
    counts_to_determinants,
    depolarize_distribution,
    ideal_distribution,
    sample,
    symmetry_filter,
)
from .simulator import Statevector, apply_circuit


def derive_seeds(master_seed, n):
    """Deterministic per-stage 64-bit seeds from one master seed."""
    ss = np.random.SeedSequence(int(master_seed))
    return [int(x) for x in ss.generate_state(n, dtype=np.uint64)]


@dataclass
class OptimizerConfig:
    method: str = "COBYLA"
    max_evaluations: int = 500
    energy_tol: float = 1e-8
    patience: int = 10
    initial_step: float = 0.3

    def __post_init__(self):
        if self.max_evaluations < 1 or self.patience < 1:
            raise ValueError("optimizer counts must be positive")
        if self.energy_tol <= 0:
            raise ValueError("energy tolerance must be positive")


@dataclass
class PipelineConfig:
    shots: int = 100_000
    cutoff: float = 0.01
    top_m: int = None
    layers: int = 1
    degree_cap: int = None
    with_orbital_rotation: bool = False
    noise: NoiseModel = field(default_factory=NoiseModel)
    optimizer: OptimizerConfig = field(default_factory=OptimizerConfig)
    seed: int = 2026

    def __post_init__(self):
        if self.shots < 1 or self.layers < 1:
            raise ValueError("shots and layers must be positive")
        if self.top_m is not None and self.top_m < 1:
            raise ValueError("top_m must be positive when set")


@dataclass
class QsciResult:
    wavefunction: object
    counts: object
    n_rejected: int
    n_unique: int

    @property
    def energy(self):
        return self.wavefunction.energy


def run_qsci_once(circuit, params, table, cfg):
    """One sampling + diagonalization pass; see module docstring for stages."""
    seeds = derive_seeds(cfg.seed, 2)
    state = Statevector.from_determinant(circuit.reference, table.n_orbitals)
    state = apply_circuit(circuit, params, state)
    dist = ideal_distribution(state)
    p = cfg.noise.depolarizing_p
    if p > 0.0:
        dist = depolarize_distribution(dist, p)
    counts = sample(dist, cfg.shots, seeds[0], noise=cfg.noise)
    if cfg.noise.has_readout:
        counts = apply_readout(counts, cfg.noise, seeds[1])
    filtered, rejected = symmetry_filter(counts, table.n_alpha, table.n_beta)
    if not filtered.counts:
        raise EmptySubspace(
            "no sampled bitstring survived the symmetry filter "
            "(noise-dominated sampling)"
        )
    dets = counts_to_determinants(filtered, table.n_orbitals)
    subspace = build_subspace(dets, table)
    wf = davidson_lowest(subspace)
    return QsciResult(
        wavefunction=wf,
        counts=filtered,
        n_rejected=rejected,
        n_unique=len(dets),
    )


class _StopEarly(Exception):
    pass


@contextlib.contextmanager
def _quiet_solver_stderr():
    """Suppress solver chatter written directly to file descriptor 2.

    The Fortran-backed derivative-free solver prints a diagnostic line on
    the raw stderr descriptor whenever an exception crosses its callback
    boundary — including the intentional early-stop signal.  The descriptor
    is restored before any exception propagates, so real tracebacks are
    unaffected.
    """
    try:
        saved = os.dup(2)
        devnull = os.open(os.devnull, os.O_WRONLY)
    except OSError:
        yield
        return
    try:
        os.dup2(devnull, 2)
        yield
    finally:
        os.dup2(saved, 2)
        os.close(saved)
        os.close(devnull)


def optimize(circuit, table, cfg):
    """Derivative-free parameter optimization of the sampled subspace energy.

    Returns (best parameters, best-so-far energy trace).  Stops when the
    best energy has not improved by more than the tolerance over a patience
    window of evaluations, or when the evaluation budget is exhausted.
    """
    opt = cfg.optimizer
    state = {
        "best_energy": np.inf,
        "best_params": np.zeros(circuit.n_params),
        "trace": [],
        "since_improvement": 0,
    }

    def objective(x):
        e = run_qsci_once(circuit, x, table, cfg).energy
        if e < state["best_energy"] - opt.energy_tol:
            state["since_improvement"] = 0
        else:
            state["since_improvement"] += 1
        if e < state["best_energy"]:
            state["best_energy"] = e
            state["best_params"] = np.array(x, dtype=float)
        state["trace"].append(state["best_energy"])
        if state["since_improvement"] >= opt.patience:
            raise _StopEarly
        if len(state["trace"]) >= opt.max_evaluations:
            raise _StopEarly
        return e

    x0 = np.zeros(circuit.n_params)
    if circuit.n_params == 0:
        e = run_qsci_once(circuit, x0, table, cfg).energy
        return x0, [e]
    try:
        with _quiet_solver_stderr():
            scipy.optimize.minimize(
                objective,
                x0,
                method=opt.method,
                tol=opt.energy_tol,
                options={"maxiter": opt.max_evaluations, "rhobeg": opt.initial_step},
            )
    except _StopEarly:
        pass
    return state["best_params"], state["trace"]
