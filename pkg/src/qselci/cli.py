"""Command-line interface: every pipeline stage as a subcommand.

Every invocation emits one JSON report with a fixed envelope — the
subcommand name, a reproducibility manifest (config echo, seeds, versions,
per-stage timings, digests of auxiliary output files), and a stage-specific
result object.  The envelope validates against the shipped
``schemas/report.schema.json``.  Reports are reproducible: the same config
and seed give identical JSON apart from the timing fields.

Configs can come from a flat ``key = value`` text file (``--config``);
explicit flags override file values, which override built-in defaults.
Keys are the long flag names with either dashes or underscores.

All randomness flows from the single ``--seed`` value: per-stage seeds are
derived from it through numpy's SeedSequence in a fixed documented order.
Exit codes: 0 success, 1 domain error (the error class name is printed),
2 usage error.
"""

import argparse
import hashlib
import json
import math
import os
import sys
import time
from contextlib import contextmanager

import numpy as np
import scipy

from . import __version__, bounds as bounds_mod
from .analysis import analyze
from .bounds import BoundInputs, full_report
from .circuits import build_lucj, build_usci, gate_counts, prescreen
from .errors import ConfigParseError, QselciError, UnknownSubcommand
from .expansion import en_pt2, expand_and_rediagonalize
from .fcidump import parse_fcidump, table_summary
from .fixtures import fixture_table
from .hamiltonian import Wavefunction, fci_oracle
from .pipeline import (
    OptimizerConfig,
    PipelineConfig,
    derive_seeds,
    optimize,
    run_qsci_once,
)
from .sampling import (
    NoiseModel,
    apply_readout,
    depolarize_distribution,
    ideal_distribution,
    sample,
    symmetry_filter,
)
from .simulator import Statevector, apply_circuit

SUBCOMMANDS = (
    "fcidump-info", "fci", "usci-build", "qsci", "sample",
    "expand", "pt2", "bounds", "analyze", "demo",
)

SCHEMA_PATH = os.path.join(os.path.dirname(__file__), "schemas",
                           "report.schema.json")


class _UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# manifest
# ---------------------------------------------------------------------------

def _versions():
    return {
        "qselci": __version__,
        "numpy": np.__version__,
        "scipy": scipy.__version__,
        "python": "%d.%d.%d" % sys.version_info[:3],
    }


class RunManifest:
    """Reproducibility envelope carried by every report."""

    def __init__(self, config):
        self.config = config
        self.seeds = {}
        self.versions = _versions()
        self.timings = {}
        self.digests = {}

    @contextmanager
    def stage(self, name):
        t0 = time.perf_counter()
        yield
        self.timings[name] = time.perf_counter() - t0

    def record_seed(self, name, value):
        self.seeds[name] = int(value)

    def record_file(self, path):
        h = hashlib.sha256()
        with open(path, "rb") as fh:
            h.update(fh.read())
        self.digests[os.path.basename(path)] = h.hexdigest()

    def to_json_dict(self):
        return {
            "config": self.config,
            "seeds": self.seeds,
            "versions": self.versions,
            "timings": self.timings,
            "digests": self.digests,
        }


def _jsonify(value):
    if isinstance(value, dict):
        return {str(k): _jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonify(v) for v in value]
    if isinstance(value, np.ndarray):
        return [_jsonify(v) for v in value.tolist()]
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.bool_,)):
        return bool(value)
    if isinstance(value, float) and (math.isnan(value) or math.isinf(value)):
        return repr(value)
    return value


# ---------------------------------------------------------------------------
# option tables and config files
# ---------------------------------------------------------------------------

def _bool_from_text(text):
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


# (flags, dest, type, default, help); type None marks store_true switches
_COMMON = [
    (("--out",), "out", str, None, "path for the JSON report (default: stdout)"),
    (("--config",), "config", str, None, "flat key=value config file"),
    (("--threads",), "threads", int, None,
     "thread cap for internal parallelism (default: env QSELCI_THREADS or 4)"),
]

_TABLE_SRC = [
    (("--fcidump",), "fcidump", str, None, "integral file to load"),
    (("--fixture",), "fixture", str, None,
     "built-in system: hubbard4 | two-orbital | h-chain-synthetic"),
]

_NOISE = [
    (("--depol-p",), "depol_p", float, 0.0, "global depolarizing strength"),
    (("--pg",), "pg", float, None, "per-gate error rate (overrides --depol-p)"),
    (("--n2q",), "n2q", int, None, "two-qubit gate count for --pg aggregation"),
    (("--eps0",), "eps0", float, 0.0, "readout flip probability 0->1"),
    (("--eps1",), "eps1", float, 0.0, "readout flip probability 1->0"),
]

_ANSATZ = [
    (("--cutoff",), "cutoff", float, 0.01, "prescreen amplitude cutoff"),
    (("--top-m",), "top_m", int, None, "prescreen size cap"),
    (("--layers",), "layers", int, 1, "ansatz layer count"),
    (("--degree-cap",), "degree_cap", int, None,
     "per-qubit excitation-partner cap"),
    (("--orbital-rotation",), "orbital_rotation", None, False,
     "prepend one-body rotation gates to each layer"),
    (("--init-angle",), "init_angle", float, 0.15,
     "uniform initial rotation angle for unoptimized runs"),
]

OPTIONS = {
    "fcidump-info": _COMMON + _TABLE_SRC,
    "fci": _COMMON + _TABLE_SRC + [
        (("--cap",), "cap", int, 10 ** 7, "maximum FCI dimension"),
        (("--save-wf",), "save_wf", str, None, "write the wavefunction JSON"),
    ],
    "usci-build": _COMMON + _TABLE_SRC + _ANSATZ + [
        (("--save-circuit",), "save_circuit", str, None,
         "write the circuit JSON"),
    ],
    "qsci": _COMMON + _TABLE_SRC + _ANSATZ + _NOISE + [
        (("--shots",), "shots", int, 100_000, "measurement shots"),
        (("--seed",), "seed", int, 2026, "master randomness seed"),
        (("--optimize",), "optimize", None, False,
         "run derivative-free parameter optimization"),
        (("--max-evals",), "max_evals", int, 500, "optimizer evaluation budget"),
        (("--opt-tol",), "opt_tol", float, 1e-8, "optimizer energy tolerance"),
        (("--patience",), "patience", int, 10,
         "evaluations without improvement before stopping"),
        (("--save-wf",), "save_wf", str, None, "write the final wavefunction"),
    ],
    "sample": _COMMON + _TABLE_SRC + _ANSATZ + _NOISE + [
        (("--ansatz",), "ansatz", str, "usci", "usci | lucj"),
        (("--shots",), "shots", int, 10_000, "measurement shots"),
        (("--seed",), "seed", int, 2026, "master randomness seed"),
        (("--top",), "top", int, 20, "how many strings to list in the report"),
        (("--csv",), "csv", str, None, "write bitstring,count rows to a file"),
    ],
    "expand": _COMMON + _TABLE_SRC + [
        (("--in",), "infile", str, None, "wavefunction JSON to start from"),
        (("--tau",), "tau", float, 0.0, "coupling-score threshold"),
        (("--iters",), "iters", int, 1, "expansion iterations"),
        (("--top-k",), "top_k", int, None, "cap on additions per iteration"),
        (("--save-wf",), "save_wf", str, None, "write the final wavefunction"),
    ],
    "pt2": _COMMON + _TABLE_SRC + [
        (("--in",), "infile", str, None, "wavefunction JSON to correct"),
    ],
    "bounds": _COMMON + [
        (("--preset",), "preset", str, None, "named input bundle: cas10-10"),
        (("--n",), "n", int, None, "active-space spatial orbitals"),
        (("--m",), "m", int, None, "active-space electrons (closed shell)"),
        (("--n-alpha",), "n_alpha", int, None, "alpha electrons (open shell)"),
        (("--n-beta",), "n_beta", int, None, "beta electrons (open shell)"),
        (("--f2q",), "f2q", float, None, "two-qubit survival fidelity"),
        (("--q-r",), "q_r", float, None, "exact retained weight"),
        (("--lambda-h",), "lambda_h", float, None, "spectral half-width (Ha)"),
        (("--p",), "p", float, 0.0, "global depolarizing strength"),
        (("--r",), "r", int, None, "retained-set size"),
        (("--d",), "d", int, None, "full-space dimension"),
        (("--shots",), "shots", int, None, "measurement shots M"),
        (("--delta",), "delta", float, None, "confidence parameter"),
        (("--zeta-r",), "zeta_r", float, 0.0, "distribution-mismatch allowance"),
        (("--delta-r",), "delta_r", float, None, "noisy boundary gap"),
        (("--k-pool",), "k_pool", int, None, "candidate-pool size"),
        (("--gap-id",), "gap_id", float, None, "ideal boundary gap"),
        (("--p-hat-r",), "p_hat_r", float, None, "measured cumulative weight"),
    ],
    "analyze": _COMMON + [
        (("--in",), "infile", str, None, "wavefunction JSON to analyze"),
        (("--mi-edges",), "mi_edges", str, None,
         "write the mutual-information edge list (i,j,weight CSV)"),
        (("--mi-threshold",), "mi_threshold", float, 0.0,
         "minimum weight for exported edges"),
    ],
    "demo": _COMMON + [
        (("--fixture",), "fixture", str, "hubbard4",
         "hubbard4 | two-orbital | h-chain-synthetic"),
        (("--shots",), "shots", int, 100_000, "measurement shots"),
        (("--seed",), "seed", int, 2026, "master randomness seed"),
        (("--depol-p",), "depol_p", float, 0.0, "global depolarizing strength"),
        (("--eps0",), "eps0", float, 0.0, "readout flip probability 0->1"),
        (("--eps1",), "eps1", float, 0.0, "readout flip probability 1->0"),
        (("--cutoff",), "cutoff", float, 0.01, "prescreen amplitude cutoff"),
        (("--top-m",), "top_m", int, None, "prescreen size cap"),
        (("--init-angle",), "init_angle", float, 0.15,
         "uniform rotation angle for the sampling circuits"),
        (("--tau",), "tau", float, 0.0, "expansion score threshold"),
        (("--iters",), "iters", int, 1, "expansion iterations"),
    ],
}


def build_parser():
    parser = argparse.ArgumentParser(
        prog="qselci",
        description="Determinant-sampling selected-CI pipeline.",
    )
    subs = parser.add_subparsers(dest="subcommand", required=True)
    for name in SUBCOMMANDS:
        sub = subs.add_parser(name)
        if name == "qsci":
            sub.add_argument("action", nargs="?", default="run",
                             choices=["run"], help="pipeline action")
        for flags, dest, typ, _default, help_text in OPTIONS[name]:
            if typ is None:
                sub.add_argument(*flags, dest=dest, action="store_true",
                                 default=None, help=help_text)
            else:
                sub.add_argument(*flags, dest=dest, type=typ, default=None,
                                 help=help_text)
    return parser


def parse_config_file(path, option_rows):
    """Flat ``key = value`` file; keys are long flag names (dash or
    underscore), one per line, with # comments and blank lines allowed."""
    types = {dest: typ for _flags, dest, typ, _d, _h in option_rows}
    aliases = {}
    for flags, dest, _typ, _d, _h in option_rows:
        for flag in flags:
            stem = flag.lstrip("-")
            aliases[stem] = dest
            aliases[stem.replace("-", "_")] = dest
        aliases[dest] = dest
    values = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigParseError(f"cannot read config file: {exc}") from None
    for line_no, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ConfigParseError("expected key = value", line_no)
        key, _, text = line.partition("=")
        key = key.strip()
        dest = aliases.get(key) or aliases.get(key.replace("-", "_"))
        if dest is None:
            raise ConfigParseError(f"unknown key {key!r}", line_no)
        text = text.strip()
        typ = types[dest]
        try:
            if typ is None:
                values[dest] = _bool_from_text(text)
            else:
                values[dest] = typ(text)
        except ValueError:
            raise ConfigParseError(
                f"bad value {text!r} for key {key!r}", line_no
            ) from None
    return values


def _effective_options(args, option_rows):
    """Built-in defaults, overridden by config-file values, overridden by
    explicit flags."""
    merged = {dest: default for _f, dest, _t, default, _h in option_rows}
    if getattr(args, "config", None):
        merged.update(parse_config_file(args.config, option_rows))
    for _flags, dest, _typ, _default, _help in option_rows:
        value = getattr(args, dest, None)
        if value is not None:
            merged[dest] = value
    return merged


# ---------------------------------------------------------------------------
# shared handler helpers
# ---------------------------------------------------------------------------

def _load_table(opts):
    if opts.get("fcidump") and opts.get("fixture"):
        raise _UsageError("give either --fcidump or --fixture, not both")
    if opts.get("fcidump"):
        with open(opts["fcidump"], "r", encoding="utf-8") as fh:
            return parse_fcidump(fh)
    if opts.get("fixture"):
        return fixture_table(opts["fixture"])
    raise _UsageError("one of --fcidump or --fixture is required")


def _noise_from(opts):
    return NoiseModel(
        depolarizing_p=opts.get("depol_p", 0.0) or 0.0,
        per_gate_pg=opts.get("pg"),
        n_2q=opts.get("n2q"),
        readout_eps0=opts.get("eps0", 0.0) or 0.0,
        readout_eps1=opts.get("eps1", 0.0) or 0.0,
    )


def _load_wavefunction(opts):
    if not opts.get("infile"):
        raise _UsageError("--in is required")
    with open(opts["infile"], "r", encoding="utf-8") as fh:
        return Wavefunction.from_json(fh.read())


def _wf_digest(wf, k=10):
    pairs = sorted(
        zip(wf.dets, wf.coeffs), key=lambda t: (-(t[1] ** 2), t[0].alpha,
                                                t[0].beta)
    )[:k]
    return [
        {"determinant": det.to_bitstring(wf.n_orbitals),
         "weight": float(c * c)}
        for det, c in pairs
    ]


def _build_circuit_from_oracle(table, opts, manifest):
    with manifest.stage("reference_solution"):
        oracle = fci_oracle(table)
    selected = prescreen(oracle, opts["cutoff"], opts.get("top_m"))
    circuit = build_usci(
        selected[0],
        selected,
        table.n_orbitals,
        layers=opts.get("layers", 1),
        degree_cap=opts.get("degree_cap"),
        with_orbital_rotation=bool(opts.get("orbital_rotation")),
    )
    return oracle, selected, circuit


def _illustrative_lucj(table, reference):
    """Fixed, documented cluster-Jastrow parameters for the comparison
    baseline: nearest-neighbor one-body mixing plus a short-range phase."""
    n = table.n_orbitals
    K = np.zeros((n, n))
    for p in range(n - 1):
        K[p, p + 1] = 0.25
        K[p + 1, p] = -0.25
    J = np.zeros((2 * n, 2 * n))
    for i in range(2 * n):
        J[i, i] = 0.4
        if i + 1 < 2 * n:
            J[i, i + 1] = J[i + 1, i] = 0.2
    return build_lucj(K, J, reference)


def _uniform_params(circuit, angle):
    return np.full(circuit.n_params, float(angle))


# ---------------------------------------------------------------------------
# handlers: each returns (result dict, human-readable lines)
# ---------------------------------------------------------------------------

def _handle_fcidump_info(opts, manifest):
    with manifest.stage("parse"):
        table = _load_table(opts)
    result = table_summary(table)
    lines = [f"{k}: {v}" for k, v in result.items()]
    return result, lines


def _handle_fci(opts, manifest):
    table = _load_table(opts)
    with manifest.stage("diagonalize"):
        wf = fci_oracle(table, cap=opts["cap"])
    result = {
        "energy": wf.energy,
        "dimension": len(wf.dets),
        "core_energy": table.core_energy,
        "top_weights": _wf_digest(wf),
    }
    if opts.get("save_wf"):
        with open(opts["save_wf"], "w", encoding="utf-8") as fh:
            fh.write(wf.to_json())
        manifest.record_file(opts["save_wf"])
    lines = [
        f"ground energy: {wf.energy:.10f} Ha over {len(wf.dets)} determinants"
    ]
    return result, lines


def _handle_usci_build(opts, manifest):
    table = _load_table(opts)
    with manifest.stage("build"):
        oracle, selected, circuit = _build_circuit_from_oracle(
            table, opts, manifest
        )
    counts = gate_counts(circuit)
    result = {
        "n_selected": len(selected),
        "reference": selected[0].to_bitstring(table.n_orbitals),
        "n_qubits": circuit.n_qubits,
        "gate_counts": counts,
    }
    if opts.get("save_circuit"):
        with open(opts["save_circuit"], "w", encoding="utf-8") as fh:
            fh.write(circuit.to_json())
        manifest.record_file(opts["save_circuit"])
    lines = [
        f"selected {len(selected)} determinants; "
        f"{counts['n_gates']} gates, {counts['n_params']} parameters, "
        f"depth {counts['depth']}"
    ]
    return result, lines


def _handle_qsci(opts, manifest):
    table = _load_table(opts)
    oracle, selected, circuit = _build_circuit_from_oracle(
        table, opts, manifest
    )
    cfg = PipelineConfig(
        shots=opts["shots"],
        cutoff=opts["cutoff"],
        top_m=opts.get("top_m"),
        layers=opts.get("layers", 1),
        degree_cap=opts.get("degree_cap"),
        with_orbital_rotation=bool(opts.get("orbital_rotation")),
        noise=_noise_from(opts),
        optimizer=OptimizerConfig(
            max_evaluations=opts["max_evals"],
            energy_tol=opts["opt_tol"],
            patience=opts["patience"],
        ),
        seed=opts["seed"],
    )
    manifest.record_seed("master", cfg.seed)
    for name, value in zip(("sample", "readout"), derive_seeds(cfg.seed, 2)):
        manifest.record_seed(name, value)
    trace = None
    if opts.get("optimize") and circuit.n_params > 0:
        with manifest.stage("optimize"):
            params, trace = optimize(circuit, table, cfg)
    else:
        params = _uniform_params(circuit, opts["init_angle"])
    with manifest.stage("qsci"):
        res = run_qsci_once(circuit, params, table, cfg)
    result = {
        "energy": res.energy,
        "n_unique_determinants": res.n_unique,
        "n_rejected_shots": res.n_rejected,
        "n_retained_shots": res.counts.total_shots,
        "params": [float(x) for x in params],
        "top_weights": _wf_digest(res.wavefunction),
    }
    if trace is not None:
        result["energy_trace"] = [float(e) for e in trace]
    if opts.get("save_wf"):
        with open(opts["save_wf"], "w", encoding="utf-8") as fh:
            fh.write(res.wavefunction.to_json())
        manifest.record_file(opts["save_wf"])
    lines = [
        f"sampled-subspace energy: {res.energy:.10f} Ha "
        f"({res.n_unique} determinants, {res.n_rejected} shots rejected)"
    ]
    return result, lines


def _sample_once(circuit, params, table, opts, manifest):
    seeds = derive_seeds(opts["seed"], 2)
    manifest.record_seed("master", opts["seed"])
    manifest.record_seed("sample", seeds[0])
    manifest.record_seed("readout", seeds[1])
    noise = _noise_from(opts)
    state = Statevector.from_determinant(circuit.reference, table.n_orbitals)
    with manifest.stage("simulate"):
        state = apply_circuit(circuit, params, state)
    dist = ideal_distribution(state)
    if noise.depolarizing_p > 0.0:
        dist = depolarize_distribution(dist, noise.depolarizing_p)
    with manifest.stage("sample"):
        counts = sample(dist, opts["shots"], seeds[0], noise=noise)
    if noise.has_readout:
        counts = apply_readout(counts, noise, seeds[1])
    return counts


def _handle_sample(opts, manifest):
    table = _load_table(opts)
    if opts["ansatz"] == "usci":
        _oracle, _sel, circuit = _build_circuit_from_oracle(
            table, opts, manifest
        )
        params = _uniform_params(circuit, opts["init_angle"])
    elif opts["ansatz"] == "lucj":
        with manifest.stage("reference_solution"):
            oracle = fci_oracle(table)
        reference = prescreen(oracle, opts["cutoff"], opts.get("top_m"))[0]
        circuit = _illustrative_lucj(table, reference)
        params = np.zeros(0)
    else:
        raise _UsageError("--ansatz must be usci or lucj")
    counts = _sample_once(circuit, params, table, opts, manifest)
    filtered, rejected = symmetry_filter(counts, table.n_alpha, table.n_beta)
    result = {
        "ansatz": opts["ansatz"],
        "shots": counts.total_shots,
        "n_unique_bitstrings": len(counts.counts),
        "valid_fraction": filtered.total_shots / counts.total_shots,
        "top": [
            {"bitstring": s, "count": c} for s, c in counts.top(opts["top"])
        ],
    }
    if opts.get("csv"):
        with open(opts["csv"], "w", encoding="utf-8") as fh:
            fh.write(counts.to_csv())
        manifest.record_file(opts["csv"])
    lines = [
        f"{counts.total_shots} shots, {len(counts.counts)} unique strings, "
        f"valid fraction {result['valid_fraction']:.4f}"
    ]
    return result, lines


def _handle_expand(opts, manifest):
    table = _load_table(opts)
    psi = _load_wavefunction(opts)
    iterations = []
    with manifest.stage("expand"):
        for _ in range(opts["iters"]):
            res = expand_and_rediagonalize(
                psi, table, opts["tau"], opts.get("top_k")
            )
            iterations.append({
                "energy_before": res.energy_before,
                "energy_after": res.energy_after,
                "n_added": res.n_added,
            })
            psi = res.wavefunction_after
            if res.n_added == 0:
                break
    result = {
        "iterations": iterations,
        "final_energy": psi.energy,
        "final_dimension": len(psi.dets),
    }
    if opts.get("save_wf"):
        with open(opts["save_wf"], "w", encoding="utf-8") as fh:
            fh.write(psi.to_json())
        manifest.record_file(opts["save_wf"])
    lines = [
        f"iteration {i + 1}: {it['energy_before']:.10f} -> "
        f"{it['energy_after']:.10f} Ha (+{it['n_added']} determinants)"
        for i, it in enumerate(iterations)
    ]
    return result, lines


def _handle_pt2(opts, manifest):
    table = _load_table(opts)
    psi = _load_wavefunction(opts)
    with manifest.stage("pt2"):
        res = en_pt2(psi, table)
    result = {
        "delta_e": res.delta_e,
        "n_external": res.n_external,
        "n_skipped": res.n_skipped,
        "energy": psi.energy,
        "energy_plus_pt2": psi.energy + res.delta_e,
    }
    lines = [
        f"second-order correction: {res.delta_e:.10f} Ha over "
        f"{res.n_external} external determinants "
        f"({res.n_skipped} skipped)"
    ]
    return result, lines


_PRESETS = {
    "cas10-10": {"n": 10, "m": 10, "f2q": 0.990},
}


def _handle_bounds(opts, manifest):
    if opts.get("preset"):
        preset = _PRESETS.get(opts["preset"])
        if preset is None:
            raise _UsageError(
                f"unknown preset {opts['preset']!r}; "
                f"available: {sorted(_PRESETS)}"
            )
        for key, value in preset.items():
            if opts.get(key) is None:
                opts[key] = value
    inputs = BoundInputs(
        q_r=opts.get("q_r"),
        lambda_h=opts.get("lambda_h"),
        p=opts.get("p") or 0.0,
        p_g=opts.get("pg"),
        n_2q=opts.get("n2q"),
        r=opts.get("r"),
        d=opts.get("d"),
        m_shots=opts.get("shots"),
        delta=opts.get("delta"),
        zeta_r=opts.get("zeta_r") or 0.0,
        delta_r=opts.get("delta_r"),
        k_pool=opts.get("k_pool"),
        f_2q=opts.get("f2q"),
        n_orbitals=opts.get("n"),
        m_electrons=opts.get("m"),
        p_hat_r=opts.get("p_hat_r"),
        gap_id=opts.get("gap_id"),
    )
    with manifest.stage("bounds"):
        report = full_report(inputs)
    result = report.to_json_dict()
    width = max(len(k) for k in result)
    lines = ["quantity".ljust(width) + "  value", "-" * (width + 12)]
    for key, value in result.items():
        shown = "-" if value is None else (
            f"{value:.6g}" if isinstance(value, float) else str(value)
        )
        lines.append(key.ljust(width) + "  " + shown)
    return result, lines


def _handle_analyze(opts, manifest):
    psi = _load_wavefunction(opts)
    with manifest.stage("analyze"):
        report = analyze(psi)
    result = report.to_json_dict()
    if opts.get("mi_edges"):
        edges = report.mi_edge_list(opts["mi_threshold"])
        with open(opts["mi_edges"], "w", encoding="utf-8") as fh:
            fh.write("i,j,weight\n")
            for i, j, w in edges:
                fh.write(f"{i},{j},{w:.12g}\n")
        manifest.record_file(opts["mi_edges"])
    max_s = max(result["entropies"]) if result["entropies"] else 0.0
    lines = [
        f"{len(result['entropies'])} spin orbitals, "
        f"max entropy {max_s:.4f} nats (ceiling ln 2 = 0.6931)"
    ]
    return result, lines


def _ansatz_sampling_summary(name, circuit, params, table, opts, manifest,
                             dominant):
    counts = _sample_once(circuit, params, table, opts, manifest)
    filtered, _rejected = symmetry_filter(counts, table.n_alpha, table.n_beta)
    top10 = [s for s, _c in counts.top(10)]
    return {
        "ansatz": name,
        "n_unique_bitstrings": len(counts.counts),
        "valid_fraction": filtered.total_shots / counts.total_shots,
        "dominant_in_top10": dominant in top10,
        "top10": top10,
    }


def _handle_demo(opts, manifest):
    table = fixture_table(opts["fixture"])
    with manifest.stage("reference_solution"):
        oracle = fci_oracle(table)
    selected = prescreen(oracle, opts["cutoff"], opts.get("top_m"))
    reference = selected[0]
    dominant = max(
        zip(oracle.dets, oracle.coeffs), key=lambda t: t[1] ** 2
    )[0].to_bitstring(table.n_orbitals)

    usci = build_usci(reference, selected, table.n_orbitals)
    usci_params = _uniform_params(usci, opts["init_angle"])
    lucj = _illustrative_lucj(table, reference)
    with manifest.stage("sampling_comparison"):
        comparison = {
            "usci": _ansatz_sampling_summary(
                "usci", usci, usci_params, table, opts, manifest, dominant
            ),
            "lucj": _ansatz_sampling_summary(
                "lucj", lucj, np.zeros(0), table, opts, manifest, dominant
            ),
        }

    cfg = PipelineConfig(
        shots=opts["shots"],
        cutoff=opts["cutoff"],
        top_m=opts.get("top_m"),
        noise=_noise_from(opts),
        seed=opts["seed"],
    )
    manifest.record_seed("master", cfg.seed)
    with manifest.stage("qsci"):
        qsci_res = run_qsci_once(usci, usci_params, table, cfg)
    psi = qsci_res.wavefunction
    expansion_steps = []
    with manifest.stage("refine"):
        for _ in range(opts["iters"]):
            step = expand_and_rediagonalize(psi, table, opts["tau"])
            expansion_steps.append({
                "energy_before": step.energy_before,
                "energy_after": step.energy_after,
                "n_added": step.n_added,
            })
            psi = step.wavefunction_after
            if step.n_added == 0:
                break
    result = {
        "fixture": opts["fixture"],
        "oracle_energy": oracle.energy,
        "sampling_comparison": comparison,
        "qsci_energy": qsci_res.energy,
        "qsci_error": qsci_res.energy - oracle.energy,
        "refined_energy": psi.energy,
        "refined_error": psi.energy - oracle.energy,
        "expansion": expansion_steps,
        "n_unique_determinants": qsci_res.n_unique,
        "n_rejected_shots": qsci_res.n_rejected,
    }
    lines = [
        f"oracle energy      : {oracle.energy:.10f} Ha",
        f"sampled subspace   : {qsci_res.energy:.10f} Ha "
        f"(error {result['qsci_error']:+.3e})",
        f"after refinement   : {psi.energy:.10f} Ha "
        f"(error {result['refined_error']:+.3e})",
        "ansatz comparison  : "
        + "; ".join(
            f"{k}: {v['n_unique_bitstrings']} strings, "
            f"valid {v['valid_fraction']:.3f}, "
            f"dominant in top-10: {v['dominant_in_top10']}"
            for k, v in comparison.items()
        ),
    ]
    return result, lines


HANDLERS = {
    "fcidump-info": _handle_fcidump_info,
    "fci": _handle_fci,
    "usci-build": _handle_usci_build,
    "qsci": _handle_qsci,
    "sample": _handle_sample,
    "expand": _handle_expand,
    "pt2": _handle_pt2,
    "bounds": _handle_bounds,
    "analyze": _handle_analyze,
    "demo": _handle_demo,
}


# ---------------------------------------------------------------------------
# dispatch
# ---------------------------------------------------------------------------

def _default_threads():
    env = os.environ.get("QSELCI_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return 4


def cli_dispatch(argv):
    """Run one subcommand; returns the process exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code else 0
    try:
        handler = HANDLERS.get(args.subcommand)
        if handler is None:
            raise UnknownSubcommand(args.subcommand)
        opts = _effective_options(args, OPTIONS[args.subcommand])
        threads = opts.get("threads") or _default_threads()
        bounds_mod.MC_THREAD_SHARDS = max(1, int(threads))
        manifest = RunManifest(config=_jsonify(opts))
        result, lines = handler(opts, manifest)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 2
    except QselciError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    report = {
        "subcommand": args.subcommand,
        "manifest": manifest.to_json_dict(),
        "result": _jsonify(result),
    }
    text = json.dumps(report, indent=2, sort_keys=True) + "\n"
    if opts.get("out"):
        with open(opts["out"], "w", encoding="utf-8") as fh:
            fh.write(text)
        for line in lines:
            print(line)
        print(f"report written to {opts['out']}")
    else:
        sys.stdout.write(text)
    return 0


def main(argv=None):
    if argv is None:
        argv = sys.argv[1:]
    raise SystemExit(cli_dispatch(argv))


if __name__ == "__main__":
    main()
