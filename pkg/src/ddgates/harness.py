"""Config-driven experiment harness.

Composes the compiler, noise models, simulators, and tomography into the
headline experiments: noise calibration, gate compilation across protection
schemes, fidelity sweeps versus gate time, and the reference-gate benchmark.
Results are deterministic CSV/JSON: one root seed, per-cell streams spawned
from sorted (gate, scheme, tau) indices, so any job count gives identical
bytes.

Config JSON schema (all times in seconds)::

    {
      "noise": {"kind": "ou", "sigma": 4000.0, "tau_c_s": 1.5e-4,
                "dt_s": 1.5e-5, "sigma_static": 2000.0}
            | {"kind": "spin_bath", "couplings": [2.0e4, 3.1e4],
               "bath_couplings": [[0.0, 2.5e4], [2.5e4, 0.0]],
               "system_offset": 0.0}
            | {"kind": "targets", "t2_star_s": 3.7e-4, "t2_hahn_s": 7.5e-4}
            | {"kind": "calibration", "path": "calibration.json"},
      "gates": ["H", "NOT", "PI8", "NOOP"],
      "schemes": ["simple", "simple_padded", "bb1", "xy4", "xy8", "kdd"],
      "tau_grid_s": [3e-6, 1e-5, 3e-5],
      "epsilon": 0.01,
      "realizations": 10000,
      "seed": 1
    }
"""

from __future__ import annotations

import csv
import dataclasses
import io
import json
import math
import multiprocessing
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .compiler import (
    DD_KINDS,
    GATE_ROTATIONS,
    CompileError,
    apply_amplitude_error,
    bb1_expand,
    cycle_pulse_count,
    dd_cycle,
    decompose_gate,
    gate_target,
    hard_pulse_schedule,
    protected_bb1_gate,
    pulse_count,
)
from .noise import (
    CalibrationResult,
    OUNoiseSpec,
    SpinBathSpec,
    calibrate_to_targets,
)
from .simulate import average_channel_output, ou_propagators
from .tomography import (
    TOMO_INPUT_STATES,
    ChannelSamples,
    chi_reconstruct,
    gate_fidelity,
    ideal_channel_samples,
    process_fidelity,
)

GATES = ("H", "NOT", "PI8", "NOOP")
SCHEMES = ("simple", "simple_padded", "bb1", "xy4", "xy8", "kdd")

# Published reference gate times and fidelities for the XY-8 benchmark.
REFERENCE_GATE_TIMES_S = {"H": 1.6e-3, "NOT": 0.6e-3, "PI8": 2.2e-3}
REFERENCE_FIDELITIES = {"H": 0.985, "NOT": 0.995, "PI8": 0.955}

CSV_FIELDS = (
    "gate",
    "scheme",
    "tau_s",
    "gate_time_s",
    "pulse_count",
    "fidelity",
    "fidelity_stderr",
    "seed",
    "error",
)

_STDERR_BATCHES = 10


class ConfigError(ValueError):
    """Invalid experiment configuration."""


@dataclass(frozen=True)
class CalibrationTargets:
    """Noise given as decay-time targets to be calibrated before use."""

    t2_star_s: float
    t2_hahn_s: float


@dataclass(frozen=True)
class CalibrationFileRef:
    """Noise given as the path of a persisted calibration artifact."""

    path: str


@dataclass(frozen=True)
class ExperimentConfig:
    noise: object
    gates: tuple[str, ...]
    schemes: tuple[str, ...]
    tau_grid: tuple[float, ...]
    epsilon: float = 0.01
    realizations: int = 10000
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "schemes", tuple(self.schemes))
        object.__setattr__(self, "tau_grid", tuple(float(t) for t in self.tau_grid))
        if not self.gates or not self.schemes or not self.tau_grid:
            raise ConfigError("gates, schemes, and tau_grid must be non-empty")
        for g in self.gates:
            if g not in GATES:
                raise ConfigError(f"unknown gate {g!r}; expected one of {GATES}")
        for s in self.schemes:
            if s not in SCHEMES:
                raise ConfigError(f"unknown scheme {s!r}; expected one of {SCHEMES}")
        if any(t <= 0 or not math.isfinite(t) for t in self.tau_grid):
            raise ConfigError("tau_grid entries must be positive and finite")
        if self.realizations < 1:
            raise ConfigError("realizations must be >= 1")
        if not abs(self.epsilon) < 0.5:
            raise ConfigError("epsilon must lie in (-0.5, 0.5)")


@dataclass(frozen=True)
class ResultRow:
    """One CSV record of a simulated (gate, scheme, tau) cell."""

    gate: str
    scheme: str
    tau: float
    gate_time: float
    pulse_count: int
    fidelity: float
    fidelity_stderr: float
    seed: int
    error: str = ""


def _parse_noise(d: dict):
    kind = d.get("kind")
    if kind == "ou":
        return OUNoiseSpec(
            sigma=float(d["sigma"]),
            tau_c=float(d["tau_c_s"]),
            dt=float(d["dt_s"]),
            sigma_static=float(d.get("sigma_static", 0.0)),
        )
    if kind == "spin_bath":
        couplings = tuple(float(b) for b in d["couplings"])
        return SpinBathSpec(
            n_bath=len(couplings),
            couplings=couplings,
            bath_couplings=np.array(d["bath_couplings"], dtype=float),
            system_offset=float(d.get("system_offset", 0.0)),
        )
    if kind == "targets":
        return CalibrationTargets(float(d["t2_star_s"]), float(d["t2_hahn_s"]))
    if kind == "calibration":
        return CalibrationFileRef(str(d["path"]))
    raise ConfigError(f"unknown noise kind {kind!r}")


def config_from_dict(d: dict) -> ExperimentConfig:
    try:
        return ExperimentConfig(
            noise=_parse_noise(d["noise"]),
            gates=tuple(d["gates"]),
            schemes=tuple(d["schemes"]),
            tau_grid=tuple(d["tau_grid_s"]),
            epsilon=float(d.get("epsilon", 0.01)),
            realizations=int(d.get("realizations", 10000)),
            seed=int(d.get("seed", 0)),
        )
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"config {path} must hold a JSON object")
    return config_from_dict(doc)


def calibration_artifact_text(cfg_seed: int, targets: CalibrationTargets, result: CalibrationResult) -> str:
    doc = {
        "targets": {"t2_star_s": targets.t2_star_s, "t2_hahn_s": targets.t2_hahn_s},
        "seed": cfg_seed,
        "params": {
            "kind": "ou",
            "sigma": result.params.sigma,
            "tau_c_s": result.params.tau_c,
            "dt_s": result.params.dt,
            "sigma_static": result.params.sigma_static,
        },
        "fitted": {
            "t2_star_s": result.fitted_t2_star,
            "t2_hahn_s": result.fitted_t2_hahn,
        },
    }
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def load_calibration(path: str) -> OUNoiseSpec:
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
        return _parse_noise(doc["params"])
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"cannot load calibration artifact {path}: {exc}") from exc


def run_calibration(cfg: ExperimentConfig, out_path: str | None = None) -> CalibrationResult:
    """Calibrate the configured targets; persist the artifact when out_path is given.

    Deterministic per (targets, seed): reruns write byte-identical artifacts.
    """
    if not isinstance(cfg.noise, CalibrationTargets):
        raise ConfigError("run_calibration requires noise of kind 'targets'")
    result = calibrate_to_targets(cfg.noise.t2_star_s, cfg.noise.t2_hahn_s, seed=cfg.seed)
    if out_path is not None:
        text = calibration_artifact_text(cfg.seed, cfg.noise, result)
        Path(out_path).write_text(text, encoding="utf-8")
    return result


def resolve_noise(cfg: ExperimentConfig):
    """Turn the configured noise into a concrete simulator model."""
    if isinstance(cfg.noise, (OUNoiseSpec, SpinBathSpec)):
        return cfg.noise
    if isinstance(cfg.noise, CalibrationTargets):
        return calibrate_to_targets(cfg.noise.t2_star_s, cfg.noise.t2_hahn_s, seed=cfg.seed).params
    if isinstance(cfg.noise, CalibrationFileRef):
        return load_calibration(cfg.noise.path)
    raise ConfigError(f"unsupported noise entry {type(cfg.noise).__name__}")


def build_schedule(gate: str, scheme: str, tau: float):
    """Compile one (gate, scheme) cell at inter-pulse delay tau."""
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    rotations = decompose_gate(gate)
    target = gate_target(gate)
    label = f"{gate}:{scheme}:tau={tau:.6g}"
    if scheme == "simple":
        return hard_pulse_schedule(rotations, target, label)
    if scheme == "simple_padded":
        # Pad to the XY-8 protected duration so gate times compare like for like.
        pad_to = len(rotations) * 5 * 8 * tau if rotations else 8 * tau
        return hard_pulse_schedule(rotations, target, label, pad_to=pad_to)
    if scheme == "bb1":
        expanded = [c for r in rotations for c in bb1_expand(r)]
        return hard_pulse_schedule(expanded, target, label)
    kind = DD_KINDS[scheme]
    if not rotations:
        schedule = dd_cycle(kind, tau)
    else:
        schedule = protected_bb1_gate(rotations, kind, tau)
    return dataclasses.replace(schedule, label=label)


def expected_pulse_count(gate: str, scheme: str) -> int:
    """Closed-form pulse count for a compiled cell."""
    n = len(GATE_ROTATIONS[gate])
    if scheme in ("simple", "simple_padded"):
        return n
    if scheme == "bb1":
        return 5 * n
    cycle = cycle_pulse_count(DD_KINDS[scheme])
    return n * 5 * (cycle + 2) if n else cycle


def simulate_cell(
    gate: str,
    scheme: str,
    tau: float,
    noise_model,
    epsilon: float,
    realizations: int,
    seed: int,
) -> ResultRow:
    """Compile, inject the amplitude error, simulate, and score one cell.

    Compile or simulation failures yield a NaN-sentinel diagnostic row rather
    than raising, so long sweeps survive single-cell failures.
    """
    try:
        schedule = build_schedule(gate, scheme, tau)
        if epsilon:
            schedule = apply_amplitude_error(schedule, epsilon)
        if isinstance(noise_model, OUNoiseSpec):
            props = ou_propagators(schedule, noise_model, realizations, seed)
            chi_ideal = chi_reconstruct(ideal_channel_samples(schedule.target_gate))

            def chi_of(batch):
                outs = tuple(average_channel_output(batch, rho) for rho in TOMO_INPUT_STATES)
                return chi_reconstruct(ChannelSamples(outs))

            fidelity = gate_fidelity(chi_of(props), chi_ideal)
            n_batches = min(_STDERR_BATCHES, realizations)
            if n_batches > 1:
                batch_f = [
                    gate_fidelity(chi_of(props[idx]), chi_ideal)
                    for idx in np.array_split(np.arange(realizations), n_batches)
                ]
                stderr = float(np.std(batch_f, ddof=1) / math.sqrt(n_batches))
            else:
                stderr = 0.0
        else:
            # Noiseless and quantum-bath channels are exact: no sampling error.
            fidelity = process_fidelity(schedule, noise_model, realizations, seed)
            stderr = 0.0
        return ResultRow(
            gate=gate,
            scheme=scheme,
            tau=tau,
            gate_time=schedule.total_duration,
            pulse_count=pulse_count(schedule),
            fidelity=fidelity,
            fidelity_stderr=stderr,
            seed=seed,
        )
    except (CompileError, ValueError) as exc:
        return ResultRow(
            gate=gate,
            scheme=scheme,
            tau=tau,
            gate_time=math.nan,
            pulse_count=0,
            fidelity=math.nan,
            fidelity_stderr=math.nan,
            seed=seed,
            error=str(exc),
        )


def _cell_seed(root_seed: int, gate_index: int, scheme_index: int, tau_index: int) -> int:
    ss = np.random.SeedSequence(
        entropy=root_seed, spawn_key=(gate_index, scheme_index, tau_index)
    )
    return int(ss.generate_state(1, dtype=np.uint64)[0])


def _sweep_cells(cfg: ExperimentConfig):
    gates = sorted(dict.fromkeys(cfg.gates))
    schemes = sorted(dict.fromkeys(cfg.schemes))
    taus = sorted(dict.fromkeys(cfg.tau_grid))
    for gi, gate in enumerate(gates):
        for si, scheme in enumerate(schemes):
            for ti, tau in enumerate(taus):
                yield gate, scheme, tau, _cell_seed(cfg.seed, gi, si, ti)


def _cell_worker(args) -> ResultRow:
    gate, scheme, tau, seed, noise_model, epsilon, realizations = args
    return simulate_cell(gate, scheme, tau, noise_model, epsilon, realizations, seed)


def run_sweep(cfg: ExperimentConfig, jobs: int = 1) -> list[ResultRow]:
    """Simulate the full (gate, scheme, tau) cross product, sorted, deterministic."""
    noise_model = resolve_noise(cfg)
    tasks = [
        (gate, scheme, tau, seed, noise_model, cfg.epsilon, cfg.realizations)
        for gate, scheme, tau, seed in _sweep_cells(cfg)
    ]
    if jobs <= 1 or len(tasks) <= 1:
        return [_cell_worker(t) for t in tasks]
    with multiprocessing.Pool(min(jobs, len(tasks))) as pool:
        return list(pool.map(_cell_worker, tasks, chunksize=1))


def run_table1(cfg: ExperimentConfig, jobs: int = 1) -> tuple[list[ResultRow], dict]:
    """Benchmark the rotation gates at their reference times with XY-8.

    tau is chosen so the protected schedule duration equals the reference gate
    time: tau = duration / (rotations * 5 * 8).  Returns the rows plus a report
    placing simulated fidelities beside the reference values.
    """
    del jobs  # three cells; parallelism is not worth the determinism burden
    noise_model = resolve_noise(cfg)
    gates = [g for g in sorted(dict.fromkeys(cfg.gates)) if g in REFERENCE_GATE_TIMES_S]
    if not gates:
        raise ConfigError("run_table1 requires at least one of H, NOT, PI8 in gates")
    rows = []
    report = {}
    for gi, gate in enumerate(gates):
        n = len(GATE_ROTATIONS[gate])
        tau = REFERENCE_GATE_TIMES_S[gate] / (n * 5 * 8)
        row = simulate_cell(
            gate, "xy8", tau, noise_model, cfg.epsilon, cfg.realizations,
            _cell_seed(cfg.seed, gi, 0, 0),
        )
        rows.append(row)
        report[gate] = {
            "tau_s": row.tau,
            "gate_time_s": row.gate_time,
            "pulse_count": row.pulse_count,
            "fidelity": row.fidelity,
            "fidelity_stderr": row.fidelity_stderr,
            "reference_gate_time_s": REFERENCE_GATE_TIMES_S[gate],
            "reference_fidelity": REFERENCE_FIDELITIES[gate],
            "error": row.error,
        }
    return rows, report


def _format_number(x: float) -> str:
    return repr(float(x))


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_FIELDS)
    for row in rows:
        writer.writerow(
            [
                row.gate,
                row.scheme,
                _format_number(row.tau),
                _format_number(row.gate_time),
                str(int(row.pulse_count)),
                _format_number(row.fidelity),
                _format_number(row.fidelity_stderr),
                str(int(row.seed)),
                row.error,
            ]
        )
    return buf.getvalue()


def rows_from_csv(text: str) -> list[ResultRow]:
    reader = csv.reader(io.StringIO(text))
    header = next(reader)
    if tuple(header) != CSV_FIELDS:
        raise ValueError(f"unexpected CSV header {header}")
    out = []
    for rec in reader:
        out.append(
            ResultRow(
                gate=rec[0],
                scheme=rec[1],
                tau=float(rec[2]),
                gate_time=float(rec[3]),
                pulse_count=int(rec[4]),
                fidelity=float(rec[5]),
                fidelity_stderr=float(rec[6]),
                seed=int(rec[7]),
                error=rec[8],
            )
        )
    return out


def summarize_rows(rows) -> dict:
    """Per (gate, scheme) min/median/max fidelity over cells that produced one."""
    grouped: dict[str, dict[str, list[float]]] = {}
    for row in rows:
        if row.error or not math.isfinite(row.fidelity):
            continue
        grouped.setdefault(row.gate, {}).setdefault(row.scheme, []).append(row.fidelity)
    summary: dict[str, dict[str, dict[str, float]]] = {}
    for gate, per_scheme in grouped.items():
        summary[gate] = {}
        for scheme, values in per_scheme.items():
            summary[gate][scheme] = {
                "min": float(np.min(values)),
                "median": float(np.median(values)),
                "max": float(np.max(values)),
            }
    return summary


def emit_report(rows, csv_path: str | None = None, summary_path: str | None = None):
    """Render rows to CSV text and a JSON summary; write them when paths are given."""
    if not rows:
        raise ValueError("emit_report requires at least one row")
    csv_text = rows_to_csv(rows)
    summary = summarize_rows(rows)
    summary_text = json.dumps(summary, sort_keys=True, indent=2) + "\n"
    if csv_path is not None:
        Path(csv_path).write_text(csv_text, encoding="utf-8")
    if summary_path is not None:
        Path(summary_path).write_text(summary_text, encoding="utf-8")
    return csv_text, summary
