"""Classical engine for determinant-sampling selected CI.

Submodules:

* ``fcidump``     integral-table parsing and serialization
* ``dets``        determinant bitmasks and excitation algebra
* ``hamiltonian`` matrix elements, subspace matrices, eigensolvers
* ``circuits``    excitation-rotation ansatz construction and qubit mapping
* ``simulator``   statevector application of circuits
* ``sampling``    noise channels, shot sampling, symmetry filtering
* ``pipeline``    sample -> select -> diagonalize loop and optimization
* ``expansion``   Hamiltonian-coupled subspace growth and perturbation
* ``bounds``      resource / error / shot-count bound formulas
* ``analysis``    orbital entropies, mutual information, rank histograms
* ``fixtures``    built-in integral tables
* ``cli``         command-line interface
"""

__version__ = "0.1.0"
