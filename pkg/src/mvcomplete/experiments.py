"""Bound-comparison sweeps and Monte-Carlo phase-transition studies.

The sweep is a pure function of its arguments (no RNG). Phase trials use
per-trial derived seeds ``default_rng([seed, l, trial])`` inside the
pattern generator, so runs replay regardless of execution order; records
are always emitted in (l, trial) order.
"""

from __future__ import annotations

import csv
import math
import time
from dataclasses import dataclass
from pathlib import Path

from . import bounds
from .checker import DEFAULT_MAX_ENUM, Status, check_unique, decide_finite
from .core import ProblemShape, RankTriple
from .errors import DegenerateRandomPointError
from .oracle import OracleConfig, finiteness_oracle
from .pattern import gen_fixed_per_column

_Z95 = 1.959963984540054


@dataclass(frozen=True)
class SweepRow:
    r1: int
    l_proposed: int
    l_baseline: int
    assumptions_ok: bool


def bound_comparison_sweep(
    n: int = 500,
    m1: int = 50000,
    m2: int = 50000,
    eps: float = 1e-4,
    r_values: tuple[int, ...] = (40, 60, 100),
    base: str = "e",
) -> dict[int, list[SweepRow]]:
    """Per-column sample bounds, proposed vs baseline, along r1 = r2.

    For each joint rank the symmetric view rank runs from ceil(r/2)
    (forced by r <= r1 + r2) up to r.
    """
    shape = ProblemShape(n, m1, m2)
    out: dict[int, list[SweepRow]] = {}
    for r in r_values:
        rows = []
        for r1 in range(math.ceil(r / 2), r + 1):
            ranks = RankTriple(r=r, r1=r1, r2=r1)
            checks = bounds.check_dimension_assumptions(shape, ranks, unique=False)
            rows.append(
                SweepRow(
                    r1=r1,
                    l_proposed=bounds.finite_sample_bound(n, ranks, eps, base),
                    l_baseline=bounds.baseline_sample_bound(n, ranks, eps, base),
                    assumptions_ok=all(checks.values()),
                )
            )
        out[r] = rows
    return out


def write_sweep_csvs(
    sweep: dict[int, list[SweepRow]], out_dir: str | Path
) -> list[Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for r, rows in sorted(sweep.items()):
        path = out_dir / f"figure3_r{r}.csv"
        with path.open("w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["r1", "l_proposed", "l_baseline", "assumptions_ok"])
            for row in rows:
                writer.writerow(
                    [row.r1, row.l_proposed, row.l_baseline, int(row.assumptions_ok)]
                )
        paths.append(path)
    return paths


@dataclass(frozen=True)
class TrialRecord:
    seed: int
    trial: int
    n: int
    ranks: RankTriple
    l: int
    checker_status: str
    oracle_status: str
    wall_time: float


@dataclass(frozen=True)
class PhasePoint:
    l: int
    success_rate: float
    ci_low: float
    ci_high: float
    unknown_rate: float
    trials: int  # valid trials (sampling floor met)
    floor_failures: int


def wilson_interval(successes: int, trials: int, z: float = _Z95) -> tuple[float, float]:
    if trials == 0:
        return (0.0, 1.0)
    phat = successes / trials
    denom = 1.0 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * math.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return (max(0.0, center - half), min(1.0, center + half))


def phase_transition(
    shape: ProblemShape,
    ranks: RankTriple,
    l_values: list[int],
    trials: int,
    seed: int,
    mode: str = "finite",
    run_checker: bool = True,
    config: OracleConfig | None = None,
    max_nodes: int = DEFAULT_MAX_ENUM,
) -> tuple[list[PhasePoint], list[TrialRecord]]:
    """Empirical success rate of completability versus samples per column.

    ``finite`` mode scores the Jacobian-rank verdict (the checker runs
    alongside when requested, for agreement studies); ``unique`` mode
    scores certified uniqueness. Trials whose pattern misses the sampling
    floor are excluded from the rate and counted separately.
    """
    if mode not in ("finite", "unique"):
        raise ValueError(f"mode must be 'finite' or 'unique', got {mode!r}")
    base_config = config or OracleConfig()
    points: list[PhasePoint] = []
    records: list[TrialRecord] = []
    for l in l_values:
        successes = unknowns = valid = floor_failures = 0
        for t in range(trials):
            t0 = time.perf_counter()
            pattern = gen_fixed_per_column(shape, l, seed=[seed, l, t])
            checker_status = "NotRun"
            oracle_status = "NotRun"
            floor_ok = l >= max(ranks.r1, ranks.r2)
            if not floor_ok:
                floor_failures += 1
                checker_status = oracle_status = "FloorFailed"
            else:
                valid += 1
                trial_config = OracleConfig(
                    arithmetic=base_config.arithmetic,
                    prime=base_config.prime,
                    svd_tolerance=base_config.svd_tolerance,
                    trials=base_config.trials,
                    seed=(seed * 1_000_003 + l * 1_009 + t) & 0x7FFFFFFF,
                )
                try:
                    oracle_status = finiteness_oracle(
                        pattern, ranks, trial_config
                    ).status.value
                except DegenerateRandomPointError:
                    oracle_status = "Degenerate"
                if run_checker or mode == "unique":
                    verdict, constraint = decide_finite(
                        pattern, ranks, max_nodes=max_nodes
                    )
                    checker_status = verdict.status.value
                    if mode == "unique":
                        if constraint is None:
                            checker_status = Status.UNKNOWN.value
                        else:
                            checker_status = check_unique(
                                constraint, ranks, shape, max_nodes=max_nodes
                            ).status.value
                if mode == "finite":
                    successes += oracle_status == Status.FINITE.value
                    unknowns += checker_status == Status.UNKNOWN.value
                else:
                    successes += checker_status == Status.UNIQUE.value
                    unknowns += checker_status == Status.UNKNOWN.value
            records.append(
                TrialRecord(
                    seed=seed,
                    trial=t,
                    n=shape.n,
                    ranks=ranks,
                    l=l,
                    checker_status=checker_status,
                    oracle_status=oracle_status,
                    wall_time=time.perf_counter() - t0,
                )
            )
        rate = successes / valid if valid else 0.0
        lo, hi = wilson_interval(successes, valid)
        points.append(
            PhasePoint(
                l=l,
                success_rate=rate,
                ci_low=lo,
                ci_high=hi,
                unknown_rate=unknowns / valid if valid else 0.0,
                trials=valid,
                floor_failures=floor_failures,
            )
        )
    return points, records


def write_phase_csv(points: list[PhasePoint], path: str | Path) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            ["l", "success_rate", "ci_low", "ci_high", "unknown_rate", "trials"]
        )
        for pt in points:
            writer.writerow(
                [
                    pt.l,
                    f"{pt.success_rate:.6f}",
                    f"{pt.ci_low:.6f}",
                    f"{pt.ci_high:.6f}",
                    f"{pt.unknown_rate:.6f}",
                    pt.trials,
                ]
            )
    return path
