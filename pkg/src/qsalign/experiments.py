"""Random instance generation and the two headline studies.

layer_study traces accuracy and marked-subspace probability as the layer
count grows on a fixed exact-match instance. fidelity_sweep measures how
alignment accuracy degrades as the database loader's preparation fidelity
drops, over fresh random instances per point, and persists raw records, a
summary, and per-size plot files whose bytes depend only on the seed.
"""
from __future__ import annotations

import concurrent.futures
import csv
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .gasp import GaConfig, gasp_prepare, perturb_state
from .grover import OracleSpec, marked_probability, search_circuit
from .qsa import QsaConfig, accuracy, classical_min_hamming, run_qsa
from .registers import (
    Database,
    RegisterLayout,
    TargetSequence,
    database_state,
    exact_loader,
    initialisation_unitary,
    state_preparation_circuit,
)
from .simcore import Statevector, fidelity, run_circuit, sample_counts

logger = logging.getLogger(__name__)

DEFAULT_FIDELITIES = tuple(round(0.05 * i, 2) for i in range(1, 21))


@dataclass(frozen=True)
class SweepConfig:
    qubit_sizes: tuple[int, ...] = (3, 4, 5, 6)
    fidelities: tuple[float, ...] = DEFAULT_FIDELITIES
    trials_per_point: int = 10
    shots: int = 4096
    seed: int = 0
    db_size_rule: str = "floor"
    layer_policy: str = "paper_ceil"

    def __post_init__(self):
        object.__setattr__(self, "qubit_sizes", tuple(self.qubit_sizes))
        object.__setattr__(self, "fidelities", tuple(self.fidelities))
        if not self.qubit_sizes:
            raise ValueError("at least one qubit size is required")
        for n in self.qubit_sizes:
            if not 3 <= n <= 8:
                raise ValueError(f"qubit size {n} outside [3, 8]")
        for f in self.fidelities:
            if not 0.0 < f <= 1.0:
                raise ValueError(f"fidelity {f} outside (0, 1]")
        if self.trials_per_point < 1:
            raise ValueError("trials_per_point must be >= 1")
        if self.shots < 1:
            raise ValueError("shots must be >= 1")
        if self.db_size_rule not in ("floor", "ceil"):
            raise ValueError(f"unknown db size rule {self.db_size_rule!r}")
        if self.layer_policy not in ("paper_ceil", "best_integer"):
            raise ValueError(f"unknown layer policy {self.layer_policy!r}")


@dataclass(frozen=True)
class SweepRecord:
    n: int
    N: int
    target_fidelity: float
    achieved_fidelity: float | None
    trial: int
    accuracy: float | None
    distance_found: int | None
    d_min_classical: int
    layers: int | None
    seed: int
    error: str | None = None


@dataclass(frozen=True)
class SummaryRow:
    n: int
    N: int
    fidelity: float
    mean_accuracy: float
    std_accuracy: float
    trials: int


@dataclass(frozen=True)
class LayerPoint:
    p: int
    accuracy: float
    marked_probability: float


@dataclass(frozen=True)
class SweepResult:
    records: tuple[SweepRecord, ...]
    summary: tuple[SummaryRow, ...]


def database_size_for(n: int, rule: str = "floor") -> int:
    if rule == "floor":
        return (1 << n) // n
    if rule == "ceil":
        return -((1 << n) // -n)
    raise ValueError(f"unknown db size rule {rule!r}")


def random_database(n: int, rule: str = "floor", seed=None) -> Database:
    """Distinct uniform-random n-bit entries, count set by the size rule."""
    if not 3 <= n <= 8:
        raise ValueError(f"qubit size {n} outside [3, 8]")
    size = database_size_for(n, rule)
    rng = np.random.default_rng(seed)
    values = rng.choice(1 << n, size=size, replace=False)
    return Database(n, tuple(format(int(v), f"0{n}b") for v in values))


def random_target(n: int, seed=None) -> TargetSequence:
    """Uniform n-bit target, independent of any database."""
    if not 3 <= n <= 8:
        raise ValueError(f"qubit size {n} outside [3, 8]")
    rng = np.random.default_rng(seed)
    return TargetSequence(format(int(rng.integers(1 << n)), f"0{n}b"))


def layer_study(n: int, p_max: int, seed=None, shots: int = 4096) -> list[LayerPoint]:
    """Accuracy and marked probability for p = 0..p_max at a fixed instance.

    The instance has the target planted in the database so exactly one
    entry matches at distance zero. Accuracy is scored against the fully
    amplified reference (all probability on the matching branch), so it
    cycles with the layer count instead of saturating; the p = 0 row is
    the unamplified baseline.
    """
    if p_max < 0:
        raise ValueError("p_max must be >= 0")
    root = np.random.SeedSequence([0 if seed is None else seed, n])
    db_seed, target_seed, *shot_seeds = root.spawn(3 + p_max)
    db = random_database(n, "ceil", db_seed)
    target = random_target(n, target_seed)
    if target.bits not in db.entries:
        db = Database(n, (target.bits,) + db.entries[1:])

    layout = RegisterLayout(n)
    prep = initialisation_unitary(exact_loader(db), target, layout)
    reference = np.zeros(1 << layout.total, dtype=complex)
    reference[layout.pack_index(int(target.bits, 2), 0, 0)] = 1.0
    reference = Statevector(layout.total, reference)

    points = []
    for p, shot_seed in zip(range(p_max + 1), shot_seeds):
        circuit = search_circuit(prep, OracleSpec(0, layout), p)
        state = run_circuit(circuit)
        counts = sample_counts(state, shots, shot_seed)
        points.append(
            LayerPoint(p, accuracy(counts, reference), marked_probability(state, layout, 0))
        )
    return points


def _trial_seed(master: int, n: int, fidelity_index: int, trial: int) -> int:
    root = np.random.SeedSequence([master, n, fidelity_index, trial])
    return int(root.generate_state(1)[0])


def _sub_seed(trial_seed: int, purpose: int) -> int:
    return int(np.random.SeedSequence([trial_seed, purpose]).generate_state(1)[0])


def run_sweep_trial(
    n: int,
    target_fidelity: float,
    trial_seed: int,
    trial: int,
    shots: int = 4096,
    db_size_rule: str = "floor",
    layer_policy: str = "paper_ceil",
    mode: str = "fast",
    ga_config: GaConfig | None = None,
) -> SweepRecord:
    """One sweep point: fresh instance, calibrated loader, full search.

    fast mode synthesizes the perturbed database state exactly, so the
    loader's infidelity is precisely the calibrated one; full mode evolves
    a circuit against the perturbed state and inherits its synthesis gap.
    """
    db = random_database(n, db_size_rule, _sub_seed(trial_seed, 0))
    target = random_target(n, _sub_seed(trial_seed, 1))
    d_min, _ = classical_min_hamming(db, target)
    ideal_state = database_state(db)
    perturbed, _ = perturb_state(ideal_state, target_fidelity, _sub_seed(trial_seed, 2))
    if mode == "fast":
        loader = state_preparation_circuit(perturbed)
    elif mode == "full":
        config = replace(ga_config or GaConfig(), rng_seed=_sub_seed(trial_seed, 3))
        loader = gasp_prepare(perturbed, config).circuit
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    achieved = fidelity(ideal_state, run_circuit(loader))
    result = run_qsa(
        loader,
        db,
        target,
        QsaConfig(shots=shots, layer_policy=layer_policy, rng_seed=_sub_seed(trial_seed, 4)),
    )
    return SweepRecord(
        n=n,
        N=db.size,
        target_fidelity=target_fidelity,
        achieved_fidelity=achieved,
        trial=trial,
        accuracy=result.accuracy,
        distance_found=result.distance,
        d_min_classical=d_min,
        layers=result.layers_used,
        seed=trial_seed,
    )


def _sweep_work_item(args: tuple) -> SweepRecord:
    n, target_fidelity, trial_seed, trial, shots, rule, policy, mode = args
    try:
        return run_sweep_trial(
            n, target_fidelity, trial_seed, trial,
            shots=shots, db_size_rule=rule, layer_policy=policy, mode=mode,
        )
    except Exception as exc:
        db = random_database(n, rule, _sub_seed(trial_seed, 0))
        target = random_target(n, _sub_seed(trial_seed, 1))
        d_min, _ = classical_min_hamming(db, target)
        return SweepRecord(
            n=n,
            N=db.size,
            target_fidelity=target_fidelity,
            achieved_fidelity=None,
            trial=trial,
            accuracy=None,
            distance_found=None,
            d_min_classical=d_min,
            layers=None,
            seed=trial_seed,
            error=f"{type(exc).__name__}: {exc}",
        )


def summarize(records: tuple[SweepRecord, ...] | list[SweepRecord]) -> tuple[SummaryRow, ...]:
    """Mean and standard deviation of accuracy per (n, fidelity) point."""
    groups: dict[tuple[int, float], list[SweepRecord]] = {}
    for r in records:
        groups.setdefault((r.n, r.target_fidelity), []).append(r)
    rows = []
    for (n, fid), group in sorted(groups.items()):
        scores = [r.accuracy for r in group if r.error is None]
        if not scores:
            continue
        rows.append(
            SummaryRow(
                n=n,
                N=group[0].N,
                fidelity=fid,
                mean_accuracy=float(np.mean(scores)),
                std_accuracy=float(np.std(scores)),
                trials=len(scores),
            )
        )
    return tuple(rows)


def fidelity_sweep(
    config: SweepConfig,
    mode: str = "fast",
    out_dir: str | Path | None = None,
    jobs: int = 1,
    progress=None,
) -> SweepResult:
    """Accuracy versus preparation fidelity over the configured grid.

    Every trial draws its own database, target, and perturbation from a
    seed derived from (master seed, n, fidelity index, trial), so results
    do not depend on execution order or worker count; records come back
    sorted by that same key and reruns write byte-identical files.
    """
    if mode not in ("fast", "full"):
        raise ValueError(f"unknown sweep mode {mode!r}")
    if jobs < 1:
        raise ValueError("jobs must be >= 1")
    items = []
    for n in config.qubit_sizes:
        for fidelity_index, target_fidelity in enumerate(config.fidelities):
            for trial in range(config.trials_per_point):
                seed = _trial_seed(config.seed, n, fidelity_index, trial)
                items.append(
                    (
                        n, target_fidelity, seed, trial,
                        config.shots, config.db_size_rule, config.layer_policy, mode,
                    )
                )
    records: list[SweepRecord] = []
    if jobs == 1:
        for item in items:
            records.append(_sweep_work_item(item))
            if progress is not None:
                progress(len(records), len(items), records[-1])
    else:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            for record in pool.map(_sweep_work_item, items, chunksize=4):
                records.append(record)
                if progress is not None:
                    progress(len(records), len(items), record)
    for record in records:
        if record.error is not None:
            logger.warning(
                "trial failed (n=%d fidelity=%.2f trial=%d): %s",
                record.n, record.target_fidelity, record.trial, record.error,
            )
    result = SweepResult(tuple(records), summarize(records))
    if out_dir is not None:
        write_sweep_files(result, out_dir)
    return result


def write_sweep_files(result: SweepResult, out_dir: str | Path) -> list[Path]:
    """records.jsonl + summary.csv + one plot-ready .dat file per size."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    records_path = out / "records.jsonl"
    with records_path.open("w") as fh:
        for r in result.records:
            fh.write(json.dumps(r.__dict__, separators=(",", ":")) + "\n")
    written.append(records_path)

    summary_path = out / "summary.csv"
    with summary_path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["n", "N", "fidelity", "mean_accuracy", "std_accuracy", "trials"])
        for row in result.summary:
            writer.writerow(
                [row.n, row.N, repr(row.fidelity),
                 repr(row.mean_accuracy), repr(row.std_accuracy), row.trials]
            )
    written.append(summary_path)

    for n in sorted({row.n for row in result.summary}):
        plot_path = out / f"accuracy_n{n}.dat"
        with plot_path.open("w") as fh:
            fh.write("# fidelity mean_accuracy std_accuracy\n")
            for row in result.summary:
                if row.n == n:
                    fh.write(f"{row.fidelity!r} {row.mean_accuracy!r} {row.std_accuracy!r}\n")
        written.append(plot_path)
    return written
