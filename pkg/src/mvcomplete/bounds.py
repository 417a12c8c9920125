"""Closed-form evaluation of the probabilistic sampling guarantees.

Sample bounds are stated as strict inequalities on the per-column sample
count ``l``; the functions here return the smallest integer strictly above
the real-valued threshold. Rank groups of size zero contribute no failure
term and are skipped inside the logarithms. The log base defaults to the
natural log and is selectable so the sensitivity of the published curves
can be examined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .core import ProblemShape, RankTriple

_BASES = {"e": math.e, "2": 2.0, "10": 10.0}


def _log(x: float, base: str) -> float:
    return math.log(x) / math.log(_BASES[base])


def _check_eps(eps: float) -> None:
    if not 0.0 < eps < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {eps}")


def _next_int_above(x: float) -> int:
    return math.floor(x) + 1


def _group_log_term(ranks: RankTriple, eps: float, factor: int, base: str) -> float:
    groups = [g for g in (ranks.r1p, ranks.r2p, ranks.rp) if g > 0]
    if not groups:
        return 0.0
    return max(_log(factor * g / eps, base) for g in groups)


def finite_sample_raw(n: int, ranks: RankTriple, eps: float, base: str = "e") -> float:
    """Real-valued threshold for finite completability (before the ceiling)."""
    _check_eps(eps)
    log_branch = (
        9.0 * _log(n / eps, base)
        + 3.0 * _group_log_term(ranks, eps, 3, base)
        + 6.0
    )
    return max(log_branch, 2.0 * ranks.r1, 2.0 * ranks.r2)


def finite_sample_bound(n: int, ranks: RankTriple, eps: float, base: str = "e") -> int:
    """Samples per column guaranteeing finite completability w.p. >= 1 - eps."""
    return _next_int_above(finite_sample_raw(n, ranks, eps, base))


def unique_sample_raw(n: int, ranks: RankTriple, eps: float, base: str = "e") -> float:
    """Real-valued threshold for unique completability."""
    _check_eps(eps)
    log_branch = (
        9.0 * _log(n / eps, base)
        + 3.0 * _group_log_term(ranks, eps, 6, base)
        + 6.0
    )
    return max(log_branch, 2.0 * ranks.r1, 2.0 * ranks.r2)


def unique_sample_bound(n: int, ranks: RankTriple, eps: float, base: str = "e") -> int:
    """Samples per column guaranteeing a unique completion w.p. >= 1 - eps."""
    return _next_int_above(unique_sample_raw(n, ranks, eps, base))


def baseline_sample_raw(n: int, ranks: RankTriple, eps: float, base: str = "e") -> float:
    """Single-view analysis applied to both views and the whole matrix."""
    _check_eps(eps)
    return max(12.0 * _log(n / eps, base), 2.0 * ranks.r1, 2.0 * ranks.r2, 2.0 * ranks.r)


def baseline_sample_bound(n: int, ranks: RankTriple, eps: float, base: str = "e") -> int:
    return _next_int_above(baseline_sample_raw(n, ranks, eps, base))


def probability_bounds(
    n: int, ranks: RankTriple, eps: float, unique: bool = False, base: str = "e"
) -> float:
    """Per-entry observation probability threshold.

    May exceed 1, which signals the bound is vacuous at this ``n``; that is
    reported, not raised.
    """
    raw = unique_sample_raw(n, ranks, eps, base) if unique else finite_sample_raw(
        n, ranks, eps, base
    )
    return raw / n + n ** (-0.25)


def check_dimension_assumptions(
    shape: ProblemShape, ranks: RankTriple, unique: bool = False
) -> dict[str, bool]:
    """Evaluate the dimension preconditions of the sampling guarantees.

    The uniqueness variant enlarges each per-view column requirement by one
    set of ``n - r_v`` columns.
    """
    n = shape.n
    r1p, r2p, rp = ranks.r1p, ranks.r2p, ranks.rp
    inc = 1 if unique else 0
    need1 = (r1p + inc) * (n - ranks.r1)
    need2 = (r2p + inc) * (n - ranks.r2)
    return {
        "rank_vs_rows": n / 6.0 >= max(ranks.r1, ranks.r2, rp),
        "view1_columns": shape.m1 >= need1,
        "view2_columns": shape.m2 >= need2,
        "total_columns": shape.m >= need1 + need2 + rp * (n - rp),
    }


def bernoulli_success_probability(shape: ProblemShape, eps: float) -> float:
    """Success probability when entries are observed independently.

    Combines the per-column concentration factor across all columns with
    the conditional guarantee ``1 - eps``.
    """
    if not 0.0 <= eps < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {eps}")
    per_column = 1.0 - math.exp(-math.sqrt(shape.n) / 2.0)
    return (1.0 - eps) * per_column**shape.m


@dataclass(frozen=True)
class BoundReport:
    """Every guarantee evaluated at one (shape, ranks, eps) triple."""

    n: int
    ranks: RankTriple
    eps: float
    log_base: str
    l_finite: int
    l_unique: int
    l_baseline: int
    p_finite: float
    p_unique: float
    assumptions_finite: dict[str, bool] | None
    assumptions_unique: dict[str, bool] | None
    success_prob_bernoulli: float | None
    intermediates: dict

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "ranks": {"r": self.ranks.r, "r1": self.ranks.r1, "r2": self.ranks.r2},
            "eps": self.eps,
            "log_base": self.log_base,
            "l_finite": self.l_finite,
            "l_unique": self.l_unique,
            "l_baseline": self.l_baseline,
            "p_finite": self.p_finite,
            "p_unique": self.p_unique,
            "assumptions_finite": self.assumptions_finite,
            "assumptions_unique": self.assumptions_unique,
            "success_prob_bernoulli": self.success_prob_bernoulli,
            "intermediates": self.intermediates,
        }


def build_report(
    n: int,
    ranks: RankTriple,
    eps: float,
    m1: int | None = None,
    m2: int | None = None,
    base: str = "e",
) -> BoundReport:
    """Evaluate all bounds; assumption checks need both column counts."""
    raw_fin = finite_sample_raw(n, ranks, eps, base)
    raw_uni = unique_sample_raw(n, ranks, eps, base)
    raw_base = baseline_sample_raw(n, ranks, eps, base)
    log_n = _log(n / eps, base)
    intermediates = {
        "derived_ranks": {"r1p": ranks.r1p, "r2p": ranks.r2p, "rp": ranks.rp},
        "log_n_over_eps": log_n,
        "group_log_finite": _group_log_term(ranks, eps, 3, base),
        "group_log_unique": _group_log_term(ranks, eps, 6, base),
        "raw_finite": raw_fin,
        "raw_unique": raw_uni,
        "raw_baseline": raw_base,
        "finite_branch": "log" if raw_fin > 2 * max(ranks.r1, ranks.r2) else "2r",
        "baseline_branch": "log"
        if raw_base > 2 * max(ranks.r, ranks.r1, ranks.r2)
        else "2r",
    }
    shape = None
    if m1 is not None and m2 is not None:
        shape = ProblemShape(n, m1, m2)
    return BoundReport(
        n=n,
        ranks=ranks,
        eps=eps,
        log_base=base,
        l_finite=_next_int_above(raw_fin),
        l_unique=_next_int_above(raw_uni),
        l_baseline=_next_int_above(raw_base),
        p_finite=raw_fin / n + n ** (-0.25),
        p_unique=raw_uni / n + n ** (-0.25),
        assumptions_finite=(
            check_dimension_assumptions(shape, ranks, unique=False) if shape else None
        ),
        assumptions_unique=(
            check_dimension_assumptions(shape, ranks, unique=True) if shape else None
        ),
        success_prob_bernoulli=(
            bernoulli_success_probability(shape, eps) if shape else None
        ),
        intermediates=intermediates,
    )
