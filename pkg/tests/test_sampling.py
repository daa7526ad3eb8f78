import math

import numpy as np
import pytest

from qselci.circuits import build_usci, prescreen
from qselci.dets import Determinant
from qselci.errors import EmptyPool
from qselci.fixtures import hubbard_chain_table
from qselci.hamiltonian import fci_oracle
from qselci.sampling import (
    Distribution,
    NoiseModel,
    SampleCounts,
    apply_readout,
    bitstring_of_index,
    counts_to_determinants,
    depolarize_distribution,
    ideal_distribution,
    index_of_bitstring,
    sample,
    spin_factorized_combine,
    symmetry_filter,
)
from qselci.simulator import Statevector, apply_circuit


# -------------------------------------------------------------- noise model

def test_noise_model_aggregates_per_gate_strength():
    model = NoiseModel(per_gate_pg=0.001, n_2q=300)
    assert abs(model.depolarizing_p - (1.0 - 0.999 ** 300)) < 1e-15
    assert NoiseModel(per_gate_pg=0.0, n_2q=100).depolarizing_p == 0.0


def test_noise_model_range_validation():
    with pytest.raises(ValueError):
        NoiseModel(depolarizing_p=1.5)
    with pytest.raises(ValueError):
        NoiseModel(readout_eps0=-0.1)
    with pytest.raises(ValueError):
        NoiseModel(per_gate_pg=2.0, n_2q=10)


# ------------------------------------------------------- ideal distribution

def test_ideal_distribution_basis_state():
    sv = Statevector.from_determinant(Determinant(0b01, 0b10), 2)
    dist = ideal_distribution(sv)
    assert len(dist.probs) == 1
    assert abs(dist.probs["1001"] - 1.0) < 1e-15


def test_ideal_distribution_uniform_two_qubit():
    amps = np.full(4, 0.5, dtype=complex)
    dist = ideal_distribution(Statevector(amps=amps, n_qubits=2))
    assert len(dist.probs) == 4
    assert all(abs(p - 0.25) < 1e-15 for p in dist.probs.values())


def test_ideal_distribution_matches_squared_amplitudes():
    table = hubbard_chain_table()
    oracle = fci_oracle(table)
    selected = prescreen(oracle, 0.0, top_m=6)
    circuit = build_usci(selected[0], selected, 4)
    sv = Statevector.from_determinant(selected[0], 4)
    out = apply_circuit(circuit, np.full(circuit.n_params, 0.3), sv)
    dist = ideal_distribution(out)
    for s, p in dist.probs.items():
        idx = index_of_bitstring(s)
        assert abs(p - abs(out.amps[idx]) ** 2) < 1e-14
    assert abs(dist.total() - 1.0) < 1e-10


# ------------------------------------------------------------- depolarizing

def _random_distribution(rng, n_qubits, support):
    idx = rng.choice(1 << n_qubits, size=support, replace=False)
    w = rng.random(support)
    w /= w.sum()
    probs = {bitstring_of_index(int(i), n_qubits): float(p)
             for i, p in zip(idx, w)}
    return Distribution(probs=probs, n_qubits=n_qubits)


def test_depolarize_zero_and_full():
    rng = np.random.default_rng(0)
    dist = _random_distribution(rng, 4, 5)
    same = depolarize_distribution(dist, 0.0)
    assert same.probs == dist.probs
    assert same.residual_mass == 0.0
    flat = depolarize_distribution(dist, 1.0)
    for p in flat.probs.values():
        assert abs(p - 1 / 16) < 1e-15
    assert abs(flat.unlisted_floor - 1 / 16) < 1e-15
    assert abs(flat.total() - 1.0) < 1e-12


def test_depolarize_preserves_ordering_100_random():
    rng = np.random.default_rng(1)
    for _ in range(100):
        n = int(rng.integers(2, 7))
        support = int(rng.integers(2, min(20, 1 << n) + 1))
        dist = _random_distribution(rng, n, support)
        p = float(rng.uniform(0.01, 0.99))
        noisy = depolarize_distribution(dist, p)
        order_id = sorted(dist.probs, key=lambda s: (-dist.probs[s], s))
        order_noisy = sorted(noisy.probs, key=lambda s: (-noisy.probs[s], s))
        assert order_id == order_noisy


def test_depolarize_cumulative_identity():
    # summed over any fixed set R: (1-p) * P_R_id + p * |R| / 2^n
    rng = np.random.default_rng(2)
    for _ in range(50):
        n = int(rng.integers(2, 7))
        support = int(rng.integers(1, min(12, 1 << n) + 1))
        dist = _random_distribution(rng, n, support)
        p = float(rng.uniform(0.0, 1.0))
        noisy = depolarize_distribution(dist, p)
        r_size = int(rng.integers(1, (1 << n) + 1))
        r_idx = rng.choice(1 << n, size=r_size, replace=False)
        r_set = [bitstring_of_index(int(i), n) for i in r_idx]
        lhs = noisy.cumulative(r_set)
        rhs = (1.0 - p) * dist.cumulative(r_set) + p * r_size / (1 << n)
        assert abs(lhs - rhs) < 1e-12


# ----------------------------------------------------------------- sampling

def test_sample_point_distribution():
    dist = Distribution(probs={"0101": 1.0}, n_qubits=4)
    counts = sample(dist, 1000, seed=3)
    assert counts.counts == {"0101": 1000}
    assert counts.total_shots == 1000


def test_sample_fair_coin_statistics():
    dist = Distribution(probs={"0": 0.5, "1": 0.5}, n_qubits=1)
    counts = sample(dist, 10 ** 6, seed=4)
    sigma = 500.0
    assert abs(counts.counts["0"] - 5 * 10 ** 5) < 3 * sigma
    assert abs(counts.counts["1"] - 5 * 10 ** 5) < 3 * sigma


def test_sample_deterministic_per_seed():
    rng = np.random.default_rng(5)
    dist = _random_distribution(rng, 5, 8)
    a = sample(dist, 5000, seed=99)
    b = sample(dist, 5000, seed=99)
    c = sample(dist, 5000, seed=100)
    assert a.counts == b.counts
    assert a.counts != c.counts


def test_sample_residual_materializes_unlisted_strings():
    dist = Distribution(probs={"00": 0.5}, n_qubits=2,
                        residual_mass=0.5, unlisted_floor=0.5 / 3)
    counts = sample(dist, 20000, seed=6)
    unlisted = {s: c for s, c in counts.counts.items() if s != "00"}
    assert sum(unlisted.values()) > 0
    assert set(unlisted) <= {"10", "01", "11"}


def test_sample_counts_invariant():
    with pytest.raises(ValueError):
        SampleCounts(counts={"0": 2}, total_shots=3, seed=0)


# ------------------------------------------------------------------ readout

def test_readout_zero_eps_unchanged():
    sc = SampleCounts(counts={"0101": 7, "0011": 3}, total_shots=10, seed=1)
    model = NoiseModel()
    out = apply_readout(sc, model, seed=2)
    assert out.counts == sc.counts


def test_readout_eps_one_inverts_every_bit():
    sc = SampleCounts(counts={"0101": 7, "0011": 3}, total_shots=10, seed=1)
    model = NoiseModel(readout_eps0=1.0, readout_eps1=1.0)
    out = apply_readout(sc, model, seed=2)
    assert out.counts == {"1010": 7, "1100": 3}
    assert out.total_shots == 10


def test_readout_flip_statistics():
    shots = 10 ** 6
    sc = SampleCounts(counts={"0": shots}, total_shots=shots, seed=1)
    model = NoiseModel(readout_eps0=0.1)
    out = apply_readout(sc, model, seed=7)
    frac = out.counts.get("1", 0) / shots
    sigma = math.sqrt(0.1 * 0.9 / shots)
    assert abs(frac - 0.1) < 3 * sigma


# ---------------------------------------------------------- symmetry filter

def test_filter_noiseless_usci_keeps_everything():
    table = hubbard_chain_table()
    oracle = fci_oracle(table)
    selected = prescreen(oracle, 0.0, top_m=8)
    circuit = build_usci(selected[0], selected, 4)
    sv = Statevector.from_determinant(selected[0], 4)
    out = apply_circuit(circuit, np.full(circuit.n_params, 0.4), sv)
    counts = sample(ideal_distribution(out), 20000, seed=8)
    filtered, rejected = symmetry_filter(counts, 2, 2)
    assert rejected == 0
    assert filtered.total_shots == 20000


def test_filter_uniform_strings_matches_sector_probability():
    # 20-bit uniform strings against the (5,5) sector
    shots = 10 ** 6
    rng = np.random.Generator(np.random.Philox(42))
    draws = rng.integers(0, 1 << 20, size=shots, dtype=np.uint64)
    alpha = draws & 0x3FF
    beta = draws >> 10
    hits = (np.bitwise_count(alpha) == 5) & (np.bitwise_count(beta) == 5)
    frac = float(np.count_nonzero(hits)) / shots
    p_u = math.comb(10, 5) ** 2 / 2 ** 20
    sigma = math.sqrt(p_u * (1 - p_u) / shots)
    assert abs(frac - p_u) < 3 * sigma
    # and the filter agrees with the popcount tally on a subsample
    sub = 20000
    counts = {}
    for idx in draws[:sub]:
        s = bitstring_of_index(int(idx), 20)
        counts[s] = counts.get(s, 0) + 1
    sc = SampleCounts(counts=counts, total_shots=sub, seed=42)
    filtered, rejected = symmetry_filter(sc, 5, 5)
    assert filtered.total_shots == int(np.count_nonzero(hits[:sub]))
    assert filtered.total_shots + rejected == sub


def test_filter_rejects_wrong_sector():
    sc = SampleCounts(counts={"0000000000": 5}, total_shots=5, seed=0)
    filtered, rejected = symmetry_filter(sc, 5, 5)
    assert rejected == 5
    assert filtered.counts == {}


def test_counts_to_determinants_ordering():
    sc = SampleCounts(
        counts={"1010": 5, "0110": 9, "0101": 5}, total_shots=19, seed=0
    )
    dets = counts_to_determinants(sc, 2)
    assert dets[0] == Determinant.from_bitstring("0110")
    assert dets[1:] == [Determinant.from_bitstring("0101"),
                        Determinant.from_bitstring("1010")]


# ------------------------------------------------------- spin factorization

def test_combine_product_count():
    alpha = [0b0011, 0b0101, 0b0110]
    beta = [0b0011, 0b0101, 0b0110, 0b1001]
    combined = spin_factorized_combine(alpha, beta)
    assert len(combined) == 12
    assert len(set(combined)) == 12


def test_combine_cap_keeps_highest_frequency_products():
    alpha = {0b0011: 10, 0b0101: 1}
    beta = {0b0011: 8, 0b0101: 5, 0b0110: 1}
    combined = spin_factorized_combine(alpha, beta, cap=5)
    assert len(combined) == 5
    products = {
        (a, b): fa * fb
        for a, fa in alpha.items() for b, fb in beta.items()
    }
    kept = sorted(products, key=lambda ab: (-products[ab], ab))[:5]
    assert combined == [Determinant(a, b) for a, b in kept]


def test_combine_empty_pool():
    with pytest.raises(EmptyPool):
        spin_factorized_combine([], [0b0011])


def test_combine_recovers_top_fixture_determinant():
    table = hubbard_chain_table()
    oracle = fci_oracle(table)
    top = max(zip(oracle.dets, oracle.coeffs), key=lambda t: t[1] ** 2)[0]
    # split sampling: alpha pool and beta pool from the oracle marginals
    alpha_pool = {}
    beta_pool = {}
    for det, c in zip(oracle.dets, oracle.coeffs):
        alpha_pool[det.alpha] = alpha_pool.get(det.alpha, 0.0) + c * c
        beta_pool[det.beta] = beta_pool.get(det.beta, 0.0) + c * c
    combined = spin_factorized_combine(alpha_pool, beta_pool, cap=10)
    assert top in combined
