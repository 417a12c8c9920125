"""Independent numerical verification of finite completability.

Each observed entry is a bilinear polynomial in the free entries of the
canonical joint basis and the per-column coefficients. The matrix is
finitely completable exactly when the Jacobian of the full system reaches
the total variable count at a generic point; per-column coefficients
contribute one full block each once every column meets its sampling floor,
so full rank is equivalent to the basis itself being pinned to finitely
many solutions.

Generic rank is evaluated at random points, by default exactly over the
prime field ``p = 2**31 - 1`` (no threshold ambiguity; a random point is
generic up to probability ~rank/p), with a floating SVD mode as the
cross-check. Several trials are drawn and the maximum rank is kept.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .basis import canonical_fixed_entries
from .checker import Status
from .constraint import ColumnSubset
from .core import RankTriple, basis_dof, find_deficient_column
from .errors import DegenerateRandomPointError, InsufficientSamplesError
from .pattern import SamplingPattern

_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)


def _is_prime(p: int) -> bool:
    """Deterministic Miller-Rabin, exact for all 64-bit integers."""
    if p < 2:
        return False
    for small in _MR_WITNESSES:
        if p % small == 0:
            return p == small
    d, s = p - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, p)
        if x in (1, p - 1):
            continue
        for _ in range(s - 1):
            x = x * x % p
            if x == p - 1:
                break
        else:
            return False
    return True


@dataclass(frozen=True)
class OracleConfig:
    arithmetic: str = "prime"  # "prime" or "float"
    prime: int = 2**31 - 1
    svd_tolerance: float = 1e-9
    trials: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.arithmetic not in ("prime", "float"):
            raise ValueError(f"arithmetic must be 'prime' or 'float', got {self.arithmetic!r}")
        if self.trials < 1:
            raise ValueError("trials must be at least 1")
        if self.arithmetic == "prime":
            if self.prime <= 2**30 or not _is_prime(self.prime):
                raise ValueError(f"prime must be a prime above 2^30, got {self.prime}")
        else:
            if not 0.0 < self.svd_tolerance < 1e-2:
                raise ValueError(
                    f"svd tolerance must lie in (0, 1e-2), got {self.svd_tolerance}"
                )


@dataclass(frozen=True)
class PolynomialSystem:
    """One equation per observed entry; variables are the free basis entries
    followed by the coefficient blocks of every column, view 1 then view 2."""

    n: int
    ranks: RankTriple
    v_vars: tuple[tuple[int, int], ...]  # (row, basis column) of free entries
    t_keys: tuple[tuple[int, int], ...]  # (view, column) coefficient blocks
    equations: tuple[tuple[int, int, int], ...]  # (view, row, column-within-view)

    @property
    def n_t_variables(self) -> int:
        return sum(self.ranks.view_rank(v) for v, _ in self.t_keys)

    @property
    def n_variables(self) -> int:
        return len(self.v_vars) + self.n_t_variables

    @property
    def n_equations(self) -> int:
        return len(self.equations)


def _free_v_entries(n: int, ranks: RankTriple) -> tuple[tuple[int, int], ...]:
    mask, _ = canonical_fixed_entries(n, ranks)
    return tuple(
        (x, c) for x in range(n) for c in range(ranks.r) if not mask[x, c]
    )


def build_system(pattern: SamplingPattern, ranks: RankTriple) -> PolynomialSystem:
    """Assemble the sampled-entry polynomial system for a pattern."""
    shape = pattern.shape
    t_keys = [(1, i) for i in range(shape.m1)] + [(2, i) for i in range(shape.m2)]
    equations = []
    for view, width, offset in ((1, shape.m1, 0), (2, shape.m2, shape.m1)):
        for i in range(width):
            for x in pattern.observed_rows(offset + i):
                equations.append((view, x, i))
    return PolynomialSystem(
        n=shape.n,
        ranks=ranks,
        v_vars=_free_v_entries(shape.n, ranks),
        t_keys=tuple(t_keys),
        equations=tuple(equations),
    )


def _view_columns(ranks: RankTriple, view: int) -> range:
    # basis columns entering a view's equations: [V1|V2] or [V2|V3]
    return range(0, ranks.r1) if view == 1 else range(ranks.r1p, ranks.r)


def _assemble_and_rank(
    system: PolynomialSystem, config: OracleConfig, rng: np.random.Generator
) -> int:
    n, ranks = system.n, system.ranks
    mask, vals = canonical_fixed_entries(n, ranks)
    n_v = len(system.v_vars)
    t_offset: dict[tuple[int, int], int] = {}
    off = n_v
    for key in system.t_keys:
        t_offset[key] = off
        off += ranks.view_rank(key[0])
    if system.n_equations == 0 or off == 0:
        return 0

    if config.arithmetic == "prime":
        p = config.prime
        V = np.zeros((n, ranks.r), dtype=np.int64)
        V[mask] = vals[mask].astype(np.int64)
        for idx, (x, c) in enumerate(system.v_vars):
            V[x, c] = rng.integers(1, p)
        tvals = {
            key: rng.integers(1, p, size=ranks.view_rank(key[0]))
            for key in system.t_keys
        }
        J = np.zeros((system.n_equations, off), dtype=np.int64)
    else:
        V = np.where(mask, vals, 0.0)
        for x, c in system.v_vars:
            V[x, c] = rng.standard_normal()
        tvals = {
            key: rng.standard_normal(ranks.view_rank(key[0]))
            for key in system.t_keys
        }
        J = np.zeros((system.n_equations, off))

    v_index = {vc: i for i, vc in enumerate(system.v_vars)}
    for e, (view, x, i) in enumerate(system.equations):
        tv = tvals[(view, i)]
        base = t_offset[(view, i)]
        for k, cv in enumerate(_view_columns(ranks, view)):
            idx = v_index.get((x, cv))
            if idx is not None:
                J[e, idx] = tv[k]
            J[e, base + k] = V[x, cv]

    if config.arithmetic == "prime":
        return _rank_mod_p(J, config.prime)
    return _rank_float(J, config.svd_tolerance)


def _rank_mod_p(A: np.ndarray, p: int) -> int:
    """Exact rank over the prime field via fraction-free row reduction.

    Entries stay below p < 2^31, so every intermediate product fits in
    int64 without wrapping.
    """
    A = np.asarray(A, dtype=np.int64) % p
    m, ncols = A.shape
    if m == 0 or ncols == 0:
        return 0
    r = 0
    for c in range(ncols):
        pivots = np.nonzero(A[r:, c])[0]
        if pivots.size == 0:
            continue
        pr = r + int(pivots[0])
        if pr != r:
            A[[r, pr]] = A[[pr, r]]
        inv = pow(int(A[r, c]), -1, p)
        A[r] = A[r] * inv % p
        below = A[r + 1 :, c]
        nz = np.nonzero(below)[0]
        if nz.size:
            A[r + 1 :][nz] = (A[r + 1 :][nz] - np.outer(below[nz], A[r])) % p
        r += 1
        if r == m:
            break
    return r


def _rank_float(A: np.ndarray, tol: float) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol * s[0]))


def _max_rank_over_trials(
    rank_once: Callable[[np.random.Generator], int],
    full: int,
    config: OracleConfig,
) -> tuple[int, list[int]]:
    """Run the trials, re-seed once on inconsistent deficiency, then surface."""
    for attempt in (0, 1):
        ranks_seen = [
            rank_once(np.random.default_rng([config.seed, attempt, t]))
            for t in range(config.trials)
        ]
        if len(set(ranks_seen)) == 1 or max(ranks_seen) == full:
            return max(ranks_seen), ranks_seen
    raise DegenerateRandomPointError(
        f"random-point ranks disagree across trials after re-seeding: {ranks_seen}"
    )


def jacobian_generic_rank(system: PolynomialSystem, config: OracleConfig | None = None) -> int:
    """Maximum Jacobian rank over random evaluation points."""
    config = config or OracleConfig()
    rank, _ = _max_rank_over_trials(
        lambda rng: _assemble_and_rank(system, config, rng),
        system.n_variables,
        config,
    )
    return rank


@dataclass(frozen=True)
class OracleReport:
    status: Status
    rank: int
    n_variables: int
    n_equations: int
    dof: int
    ranks_per_trial: tuple[int, ...]
    arithmetic: str

    def to_dict(self) -> dict:
        return {
            "status": self.status.value,
            "rank": self.rank,
            "variables": self.n_variables,
            "equations": self.n_equations,
            "dof": self.dof,
            "ranks_per_trial": list(self.ranks_per_trial),
            "arithmetic": self.arithmetic,
        }


def finiteness_oracle(
    pattern: SamplingPattern,
    ranks: RankTriple,
    config: OracleConfig | None = None,
) -> OracleReport:
    """Finite/Infinite verdict from the generic Jacobian rank.

    Requires the per-column sampling floor; below it the coefficient
    blocks are underdetermined and the caller gets an error instead of a
    verdict.
    """
    config = config or OracleConfig()
    deficient = find_deficient_column(pattern, ranks)
    if deficient is not None:
        raise InsufficientSamplesError(*deficient)
    system = build_system(pattern, ranks)
    rank, per_trial = _max_rank_over_trials(
        lambda rng: _assemble_and_rank(system, config, rng),
        system.n_variables,
        config,
    )
    status = Status.FINITE if rank == system.n_variables else Status.INFINITE
    return OracleReport(
        status=status,
        rank=rank,
        n_variables=system.n_variables,
        n_equations=system.n_equations,
        dof=basis_dof(pattern.shape, ranks),
        ranks_per_trial=tuple(per_trial),
        arithmetic=config.arithmetic,
    )


def independent_count(
    subset: ColumnSubset,
    ranks: RankTriple,
    config: OracleConfig | None = None,
) -> int:
    """Number of algebraically independent constraints in a column subset.

    Builds the sub-system holding the pivot equations of every touched
    source column plus the subset columns' own equations, and subtracts
    the pivot count from its generic rank. The pivot blocks are square
    and generically nonsingular, so the difference counts exactly the
    independent constraints left after coefficient elimination.
    """
    config = config or OracleConfig()
    parent = subset.parent
    cols = [parent.columns[i] for i in subset.indices()]
    if not cols:
        return 0
    pivot_of: dict[tuple[int, int], tuple[int, ...]] = {}
    for col in cols:
        pivot_of.setdefault((col.view, col.source_column), col.pivot_rows)
    t_keys = tuple(sorted(pivot_of))
    equations = []
    n_pivots = 0
    for view, i in t_keys:
        for x in pivot_of[(view, i)]:
            equations.append((view, x, i))
            n_pivots += 1
    for col in cols:
        equations.append((col.view, col.extra_row, col.source_column))
    system = PolynomialSystem(
        n=parent.n,
        ranks=ranks,
        v_vars=_free_v_entries(parent.n, ranks),
        t_keys=t_keys,
        equations=tuple(equations),
    )
    rank, _ = _max_rank_over_trials(
        lambda rng: _assemble_and_rank(system, config, rng),
        system.n_variables,
        config,
    )
    return rank - n_pivots
