"""
The sample-select-diagonalize loop and its parameter optimization
=================================================================

One pass of the hybrid loop: prepare the ansatz state, sample it under
the noise model, filter the shots, collect the surviving determinants,
project the Hamiltonian onto them, and take the lowest eigenvalue.  The
subspace energy is variational — it can only approach the exact ground
energy from above — and every pass is replayable from a single seed.
"""

import numpy as np

from qselci.circuits import build_usci, prescreen
from qselci.fixtures import hubbard_chain_table, two_orbital_table
from qselci.hamiltonian import fci_oracle
from qselci.pipeline import (
    NoiseModel,
    OptimizerConfig,
    PipelineConfig,
    derive_seeds,
    optimize,
    run_qsci_once,
)

table = hubbard_chain_table()
oracle = fci_oracle(table)
selected = prescreen(oracle, cutoff=0.01)
circuit = build_usci(selected[0], selected, 4)
params = np.full(circuit.n_params, 0.15)

# Every stage seed (sampling, readout) is derived from one master seed,
# so a result quotes a single number for full reproducibility.
print("stage seeds for master 2026:", derive_seeds(2026, 2))

# More shots -> more of the support is seen -> lower subspace energy.
for shots in (500, 5_000, 100_000):
    cfg = PipelineConfig(shots=shots, seed=2026)
    result = run_qsci_once(circuit, params, table, cfg)
    print("shots %6d: %2d determinants, energy error %.2e"
          % (shots, result.n_unique, result.energy - oracle.energy))

# Under depolarizing + readout noise the filter discards part of the
# budget, but the survivors still span a useful subspace.  Mild noise can
# even help the capture set: the depolarizing channel scatters weight onto
# sector determinants the ideal distribution barely touches, and any that
# pass the filter enlarge the subspace at no cost to the variational energy.
noise = NoiseModel(depolarizing_p=0.01, readout_eps0=0.01, readout_eps1=0.01)
cfg = PipelineConfig(shots=100_000, noise=noise, seed=2026)
result = run_qsci_once(circuit, params, table, cfg)
print("noisy run: rejected", result.n_rejected, "shots,",
      result.n_unique, "determinants, error %.2e"
      % (result.energy - oracle.energy))

# The same pass with the same seed reproduces bit-for-bit.
again = run_qsci_once(circuit, params, table, cfg)
print("replayable:", again.energy == result.energy)

# Parameter optimization treats the subspace energy as a black-box
# objective.  The sampling seed is held fixed across evaluations so the
# objective is deterministic, as derivative-free solvers require.
small_table = two_orbital_table()
small_selected = prescreen(fci_oracle(small_table), 0.0, top_m=2)
small_circuit = build_usci(small_selected[0], small_selected,
                           small_table.n_orbitals)
opt_cfg = PipelineConfig(
    shots=50_000, seed=7,
    optimizer=OptimizerConfig(max_evaluations=50, patience=10),
)
best_params, trace = optimize(small_circuit, small_table, opt_cfg)
print("evaluations used:", len(trace))
print("best-so-far trace:", [round(e, 6) for e in trace])
print("optimized energy vs exact:",
      round(trace[-1], 8), "vs", round(fci_oracle(small_table).energy, 8))
