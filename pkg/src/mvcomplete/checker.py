"""Deterministic decision procedures on the constraint matrix.

Finite completability holds iff the constraint matrix contains a subset of
``m = basis_dof`` columns such that every nonempty subset of that candidate
keeps the number of reachable basis variables at or above its column count:

    r1p*(g1 - r1)+  +  r2p*(g2 - r2)+  +  rp*(g - rp)+   >=   c

where ``g1``/``g2``/``g`` count the nonzero rows of the view-1 part, the
view-2 part and the whole subset, and ``c`` is its column count. Uniqueness
is certified by additionally finding, disjoint from that candidate, one
per-view column set of size ``n - r_v`` whose every subset satisfies the
single-view margin ``g - r_v >= c``.

Both searches are exact at desk scale: subsets are explored by DFS over
duplicate-support column groups with slack pruning, capped by a node budget
(default ``2**24``). Exceeding the budget surfaces as an Unknown verdict,
never as a wrong answer. All searches scan columns in their canonical
order, so verdicts and certificates are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

from .constraint import (
    ColumnSubset,
    ConstraintMatrix,
    build_constraint,
    split_by_view,
)
from .core import ProblemShape, RankTriple, basis_dof, find_deficient_column
from .errors import EnumerationCapExceeded
from .pattern import SamplingPattern

DEFAULT_MAX_ENUM = 1 << 24
EXHAUSTIVE_COLUMN_LIMIT = 28


class Status(str, Enum):
    FINITE = "Finite"
    INFINITE = "Infinite"
    UNIQUE = "UniqueCertified"
    UNKNOWN = "Unknown"


@dataclass(frozen=True)
class Verdict:
    status: Status
    budget: int
    reason: str = ""
    certificate: dict[str, ColumnSubset] | None = None
    witness: dict | None = None

    def to_dict(self) -> dict:
        out: dict = {
            "status": self.status.value,
            "budget": self.budget,
            "reason": self.reason,
            "certificate": None,
            "witness": self.witness,
        }
        if self.certificate is not None:
            out["certificate"] = {
                name: _subset_provenance(subset)
                for name, subset in self.certificate.items()
            }
        return out


def _subset_provenance(subset: ColumnSubset) -> list[dict]:
    cols = []
    for i in subset.indices():
        col = subset.parent.columns[i]
        cols.append(
            {
                "index": i + 1,
                "view": col.view,
                "source_column": col.source_column + 1,
                "pivot_rows": [r + 1 for r in col.pivot_rows],
                "extra_row": col.extra_row + 1,
            }
        )
    return cols


class _Budget:
    """Shared node counter; raises once the cap is exhausted."""

    __slots__ = ("left", "cap")

    def __init__(self, cap: int):
        self.cap = cap
        self.left = cap

    def spend(self, amount: int = 1) -> None:
        self.left -= amount
        if self.left < 0:
            raise EnumerationCapExceeded(self.cap)


@dataclass
class _Group:
    """Columns sharing (view, support); they enter violating subsets together."""

    view: int
    mask: int
    members: list[int] = field(default_factory=list)

    @property
    def mult(self) -> int:
        return len(self.members)


def _make_groups(parent: ConstraintMatrix, indices: list[int]) -> list[_Group]:
    by_key: dict[tuple[int, int], _Group] = {}
    for i in indices:
        col = parent.columns[i]
        key = (col.view, col.support)
        grp = by_key.get(key)
        if grp is None:
            grp = by_key[key] = _Group(view=col.view, mask=col.support)
        grp.members.append(i)
    return sorted(by_key.values(), key=lambda g: g.members[0])


def _joint_bound(ranks: RankTriple) -> Callable[[int, int], int]:
    r1p, r2p, rp = ranks.r1p, ranks.r2p, ranks.rp
    r1, r2 = ranks.r1, ranks.r2

    def bound(rows1: int, rows2: int) -> int:
        g1 = rows1.bit_count()
        g2 = rows2.bit_count()
        g = (rows1 | rows2).bit_count()
        return (
            r1p * max(0, g1 - r1)
            + r2p * max(0, g2 - r2)
            + rp * max(0, g - rp)
        )

    return bound


def _single_view_bound(r_v: int) -> Callable[[int, int], int]:
    def bound(rows1: int, rows2: int) -> int:
        return (rows1 | rows2).bit_count() - r_v

    return bound


def _violation_search(
    groups: list[_Group],
    bound_fn: Callable[[int, int], int],
    budget: _Budget,
    forced: int | None = None,
) -> list[int] | None:
    """Find a nonempty subset with bound < column count, or prove none exists.

    Groups of duplicate-support columns are taken all-or-none, which is
    exact: enlarging a violating subset by support-duplicates keeps the
    bound and raises the count. When ``forced`` names a group, only
    subsets containing it are considered (used for incremental checks).
    Returns member column indices of a violating subset, or None.
    """
    free = [g for t, g in enumerate(groups) if t != forced]
    # explore tightly overlapping supports first
    overlap = []
    for g in free:
        overlap.append(
            sum(o.mult * (g.mask & o.mask).bit_count() for o in groups if o is not g)
        )
    order = sorted(range(len(free)), key=lambda t: (-overlap[t], free[t].members[0]))
    free = [free[t] for t in order]
    rem = [0] * (len(free) + 1)
    for t in range(len(free) - 1, -1, -1):
        rem[t] = rem[t + 1] + free[t].mult

    def dfs(pos: int, rows1: int, rows2: int, c: int) -> list[_Group] | None:
        for t in range(pos, len(free)):
            g = free[t]
            budget.spend()
            nr1 = rows1 | g.mask if g.view == 1 else rows1
            nr2 = rows2 | g.mask if g.view == 2 else rows2
            nc = c + g.mult
            slack = bound_fn(nr1, nr2) - nc
            if slack < 0:
                return [g]
            if slack < rem[t + 1]:
                deeper = dfs(t + 1, nr1, nr2, nc)
                if deeper is not None:
                    return [g, *deeper]
        return None

    if forced is None:
        found = dfs(0, 0, 0, 0)
    else:
        fg = groups[forced]
        rows1 = fg.mask if fg.view == 1 else 0
        rows2 = fg.mask if fg.view == 2 else 0
        budget.spend()
        slack = bound_fn(rows1, rows2) - fg.mult
        if slack < 0:
            found = [fg]
        elif slack >= rem[0]:
            found = None
        else:
            deeper = dfs(0, rows1, rows2, fg.mult)
            found = None if deeper is None else [fg, *deeper]
    if found is None:
        return None
    return sorted(i for g in found for i in g.members)


def count_bound(subset: ColumnSubset, ranks: RankTriple) -> int:
    """Upper bound on independent constraints representable by the subset."""
    view1, view2 = split_by_view(subset)
    return _joint_bound(ranks)(view1.union_support(), view2.union_support())


def find_violating_subset(
    subset: ColumnSubset, ranks: RankTriple, max_nodes: int = DEFAULT_MAX_ENUM
) -> ColumnSubset | None:
    """Return a nonempty subset with bound < count, or None if all pass."""
    groups = _make_groups(subset.parent, subset.indices())
    hit = _violation_search(groups, _joint_bound(ranks), _Budget(max_nodes))
    if hit is None:
        return None
    return subset.parent.subset(hit)


def verify_candidate(
    candidate: ColumnSubset, ranks: RankTriple, max_nodes: int = DEFAULT_MAX_ENUM
) -> bool:
    """True iff every nonempty subset of the candidate satisfies the bound.

    Raises EnumerationCapExceeded when the node budget runs out; callers
    surface that as Unknown.
    """
    return find_violating_subset(candidate, ranks, max_nodes) is None


def single_view_condition(
    subset: ColumnSubset, r_v: int, max_nodes: int = DEFAULT_MAX_ENUM
) -> bool:
    """True iff every nonempty subset satisfies ``g - r_v >= c``.

    The subset must be drawn from a single view's block.
    """
    views = {col.view for col in subset}
    if len(views) > 1:
        raise ValueError("single_view_condition needs columns from one view only")
    groups = _make_groups(subset.parent, subset.indices())
    hit = _violation_search(groups, _single_view_bound(r_v), _Budget(max_nodes))
    return hit is None


def _clean_after_adding(
    parent: ConstraintMatrix,
    chosen: list[int],
    new_col: int,
    bound_fn: Callable[[int, int], int],
    budget: _Budget,
) -> bool:
    """Check no violating subset appears once ``new_col`` joins a clean set."""
    groups = _make_groups(parent, [*chosen, new_col])
    forced = next(
        t for t, g in enumerate(groups) if new_col in g.members
    )
    return _violation_search(groups, bound_fn, budget, forced=forced) is None


def _greedy_columns(
    parent: ConstraintMatrix,
    allowed: list[int],
    target: int,
    bound_fn: Callable[[int, int], int],
    budget: _Budget,
    strict_subsets: bool,
) -> list[int] | None:
    """Scan columns in canonical order, keeping those that stay clean."""
    chosen: list[int] = []
    sources: set[tuple[int, int]] = set()
    for i in allowed:
        if len(chosen) == target:
            break
        col = parent.columns[i]
        key = (col.view, col.source_column)
        if strict_subsets and key in sources:
            continue
        if _clean_after_adding(parent, chosen, i, bound_fn, budget):
            chosen.append(i)
            sources.add(key)
    return chosen if len(chosen) == target else None


def _exhaustive_columns(
    parent: ConstraintMatrix,
    allowed: list[int],
    target: int,
    bound_fn: Callable[[int, int], int],
    budget: _Budget,
    strict_subsets: bool,
) -> list[int] | None:
    """Complete lex-order backtracking over ``target``-column subsets.

    Returns the first clean subset in canonical order; None proves that no
    clean subset of that size exists among the allowed columns. Subsets of
    clean sets are clean, so pruning on the first violation is exact.
    """

    def rec(start: int, chosen: list[int], sources: set) -> list[int] | None:
        if len(chosen) == target:
            return list(chosen)
        need = target - len(chosen)
        for j in range(start, len(allowed) - need + 1):
            i = allowed[j]
            col = parent.columns[i]
            key = (col.view, col.source_column)
            if strict_subsets and key in sources:
                continue
            budget.spend()
            if _clean_after_adding(parent, chosen, i, bound_fn, budget):
                chosen.append(i)
                sources.add(key)
                found = rec(j + 1, chosen, sources)
                if found is not None:
                    return found
                chosen.pop()
                sources.discard(key)
        return None

    if target == 0:
        return []
    return rec(0, [], set())


def check_finite(
    constraint: ConstraintMatrix,
    ranks: RankTriple,
    shape: ProblemShape,
    search: str = "auto",
    max_nodes: int = DEFAULT_MAX_ENUM,
    strict_subsets: bool = False,
) -> Verdict:
    """Decide finite completability from a built constraint matrix.

    Finite verdicts always carry a certificate; Infinite verdicts rest on
    provable necessity (too few columns, too few reachable variables, or a
    completed exhaustive search); capped or failed greedy searches yield
    Unknown.
    """
    if search not in ("auto", "exhaustive", "greedy"):
        raise ValueError(f"unknown search mode {search!r}")
    m = basis_dof(shape, ranks)
    if m == 0:
        return Verdict(
            Status.FINITE,
            budget=0,
            reason="zero basis degrees of freedom, trivially finite",
            certificate={"finite": constraint.subset([])},
        )
    if strict_subsets:
        available = len({(c.view, c.source_column) for c in constraint.columns})
        supply = "distinct-source constraint columns"
    else:
        available = constraint.k
        supply = "constraint columns"
    if available < m:
        return Verdict(
            Status.INFINITE,
            budget=m,
            reason=f"only {available} {supply} available for a budget of {m}",
            witness={"available": available, "required": m},
        )
    full_bound = count_bound(constraint.full_subset(), ranks)
    if full_bound < m:
        return Verdict(
            Status.INFINITE,
            budget=m,
            reason=(
                f"at most {full_bound} independent constraints are reachable, "
                f"below the budget of {m}"
            ),
            witness={"available": full_bound, "required": m},
        )

    bound_fn = _joint_bound(ranks)
    budget = _Budget(max_nodes)
    allowed = list(range(constraint.k))
    use_exhaustive = search == "exhaustive" or (
        search == "auto" and constraint.k <= EXHAUSTIVE_COLUMN_LIMIT
    )
    try:
        if use_exhaustive:
            cert = _exhaustive_columns(
                constraint, allowed, m, bound_fn, budget, strict_subsets
            )
            if cert is None:
                return Verdict(
                    Status.INFINITE,
                    budget=m,
                    reason=(
                        f"complete search: no {m}-column subset satisfies the "
                        "subset-count condition"
                    ),
                    witness={"available": available, "required": m},
                )
        else:
            cert = _greedy_columns(
                constraint, allowed, m, bound_fn, budget, strict_subsets
            )
            if cert is None:
                return Verdict(
                    Status.UNKNOWN,
                    budget=m,
                    reason="greedy search found no certificate; existence unresolved",
                )
    except EnumerationCapExceeded as exc:
        return Verdict(
            Status.UNKNOWN,
            budget=m,
            reason=f"subset enumeration cap reached ({exc.budget} nodes)",
        )
    return Verdict(
        Status.FINITE,
        budget=m,
        reason="certificate subset passes the subset-count condition",
        certificate={"finite": constraint.subset(cert)},
    )


def decide_finite(
    pattern: SamplingPattern,
    ranks: RankTriple,
    search: str = "auto",
    max_nodes: int = DEFAULT_MAX_ENUM,
    strict_subsets: bool = False,
    pivot_rule: str = "smallest",
    seed: int | None = None,
) -> tuple[Verdict, ConstraintMatrix | None]:
    """Decide finite completability straight from a sampling pattern.

    A column with fewer observations than its view rank leaves the
    per-column coefficients underdetermined, so the verdict is Infinite
    without building the constraint matrix.
    """
    shape = pattern.shape
    m = basis_dof(shape, ranks)
    deficient = find_deficient_column(pattern, ranks)
    if deficient is not None:
        view, col, have, need = deficient
        return (
            Verdict(
                Status.INFINITE,
                budget=m,
                reason=(
                    f"view-{view} column {col + 1} has {have} observed entries, "
                    f"fewer than r{view}={need}; its coefficients admit "
                    "infinitely many solutions"
                ),
                witness={"view": view, "column": col + 1, "have": have, "need": need},
            ),
            None,
        )
    constraint = build_constraint(pattern, ranks, pivot_rule=pivot_rule, seed=seed)
    verdict = check_finite(
        constraint, ranks, shape, search=search, max_nodes=max_nodes,
        strict_subsets=strict_subsets,
    )
    return verdict, constraint


def _greedy_single_view(
    constraint: ConstraintMatrix,
    view: int,
    r_v: int,
    target: int,
    excluded: set[int],
    budget: _Budget,
    strict_subsets: bool,
) -> list[int] | None:
    allowed = [
        i
        for i, col in enumerate(constraint.columns)
        if col.view == view and i not in excluded
    ]
    return _greedy_columns(
        constraint, allowed, target, _single_view_bound(r_v), budget, strict_subsets
    )


def check_unique(
    constraint: ConstraintMatrix,
    ranks: RankTriple,
    shape: ProblemShape,
    search: str = "auto",
    max_nodes: int = DEFAULT_MAX_ENUM,
    strict_subsets: bool = False,
) -> Verdict:
    """Certify unique completability, or report Unknown.

    Requires three pairwise-disjoint column sets: an ``m``-column candidate
    passing the subset-count condition, plus per-view sets of sizes
    ``n - r1`` and ``n - r2`` passing the single-view margin. The condition
    is sufficient only, so the negative outcome is always Unknown.
    """
    m = basis_dof(shape, ranks)
    need1 = shape.n - ranks.r1
    need2 = shape.n - ranks.r2
    total = m + need1 + need2
    if constraint.k < total:
        return Verdict(
            Status.UNKNOWN,
            budget=m,
            reason=(
                f"only {constraint.k} constraint columns; {total} are needed "
                f"to host disjoint sets of sizes ({m}, {need1}, {need2})"
            ),
            witness={"available": constraint.k, "required": total},
        )
    budget = _Budget(max_nodes)
    bound_fn = _joint_bound(ranks)
    use_exhaustive = search == "exhaustive" or (
        search == "auto" and constraint.k <= EXHAUSTIVE_COLUMN_LIMIT
    )

    def find_cert(excluded: set[int]) -> list[int] | None:
        allowed = [i for i in range(constraint.k) if i not in excluded]
        if use_exhaustive:
            return _exhaustive_columns(
                constraint, allowed, m, bound_fn, budget, strict_subsets
            )
        return _greedy_columns(
            constraint, allowed, m, bound_fn, budget, strict_subsets
        )

    def assemble(order_cert_first: bool) -> tuple[list[int], list[int], list[int]] | None:
        used: set[int] = set()
        cert: list[int] | None = None
        if order_cert_first:
            cert = find_cert(used)
            if cert is None:
                return None
            used.update(cert)
        s1 = _greedy_single_view(
            constraint, 1, ranks.r1, need1, used, budget, strict_subsets
        )
        if s1 is None:
            return None
        used.update(s1)
        s2 = _greedy_single_view(
            constraint, 2, ranks.r2, need2, used, budget, strict_subsets
        )
        if s2 is None:
            return None
        used.update(s2)
        if not order_cert_first:
            cert = find_cert(used)
            if cert is None:
                return None
        return cert, s1, s2

    try:
        found = assemble(order_cert_first=True) or assemble(order_cert_first=False)
    except EnumerationCapExceeded as exc:
        return Verdict(
            Status.UNKNOWN,
            budget=m,
            reason=f"subset enumeration cap reached ({exc.budget} nodes)",
        )
    if found is None:
        return Verdict(
            Status.UNKNOWN,
            budget=m,
            reason="no disjoint certificate triple found; uniqueness unresolved",
        )
    cert, s1, s2 = found
    return Verdict(
        Status.UNIQUE,
        budget=m,
        reason=(
            "disjoint sets pass the subset-count condition and both "
            "single-view margins"
        ),
        certificate={
            "finite": constraint.subset(cert),
            "view1": constraint.subset(s1),
            "view2": constraint.subset(s2),
        },
    )
