"""Constraint-matrix construction and subset queries.

Every view-v column of the sampling pattern with ``l`` observed entries
contributes ``l - r_v`` binary columns: each takes the column's ``r_v``
pivot rows plus one of the surplus observed rows. A column of the
constraint matrix therefore has exactly ``r_v + 1`` ones, and stands for
one polynomial constraint on the joint basis once the per-column
coefficients have been eliminated through the pivot observations.

The default pivot rule picks the ``r_v`` observed rows with the smallest
indices, which makes rebuilds deterministic; a seeded-random rule is
available because the admissibility condition is stated for the built
matrix and pivot choice can matter at the margin.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator

import numpy as np

from .core import RankTriple, find_deficient_column
from .errors import InsufficientSamplesError
from .pattern import SamplingPattern


@dataclass(frozen=True)
class ConstraintColumn:
    """One surplus observation: its view, source column, pivots and extra row."""

    view: int
    source_column: int  # 0-based within its view
    pivot_rows: tuple[int, ...]  # sorted ascending
    extra_row: int
    support: int  # bitmask over rows: pivot_rows | {extra_row}

    @property
    def support_rows(self) -> tuple[int, ...]:
        return tuple(sorted((*self.pivot_rows, self.extra_row)))


@dataclass(frozen=True)
class ConstraintMatrix:
    n: int
    columns: tuple[ConstraintColumn, ...]
    k1: int
    k2: int

    @property
    def k(self) -> int:
        return self.k1 + self.k2

    def full_subset(self) -> "ColumnSubset":
        return ColumnSubset(self, (1 << self.k) - 1)

    def subset(self, indices) -> "ColumnSubset":
        mask = 0
        for i in indices:
            if not 0 <= i < self.k:
                raise IndexError(f"column index {i} out of range 0..{self.k - 1}")
            mask |= 1 << i
        return ColumnSubset(self, mask)

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.k), dtype=np.uint8)
        for j, col in enumerate(self.columns):
            for row in col.support_rows:
                out[row, j] = 1
        return out


@dataclass(frozen=True)
class ColumnSubset:
    """A subset of constraint-matrix columns, stored as a bitmask."""

    parent: ConstraintMatrix
    members: int

    def __post_init__(self):
        if self.members < 0 or self.members >> self.parent.k:
            raise ValueError("members bitmask addresses columns outside the parent")

    def indices(self) -> list[int]:
        return [i for i in range(self.parent.k) if self.members >> i & 1]

    def __len__(self) -> int:
        return self.members.bit_count()

    def __iter__(self) -> Iterator[ConstraintColumn]:
        for i in self.indices():
            yield self.parent.columns[i]

    def union_support(self) -> int:
        mask = 0
        for col in self:
            mask |= col.support
        return mask


def build_constraint(
    pattern: SamplingPattern,
    ranks: RankTriple,
    pivot_rule: str = "smallest",
    seed: int | None = None,
) -> ConstraintMatrix:
    """Construct the constraint matrix for a pattern and rank triple.

    Columns are ordered by (view, source column, surplus index), so the
    result is a pure function of its inputs under the default pivot rule.
    """
    deficient = find_deficient_column(pattern, ranks)
    if deficient is not None:
        view, col, have, need = deficient
        raise InsufficientSamplesError(view, col, have, need)
    if pivot_rule not in ("smallest", "random"):
        raise ValueError(f"unknown pivot rule {pivot_rule!r}")
    rng = np.random.default_rng(seed) if pivot_rule == "random" else None

    columns: list[ConstraintColumn] = []
    counts = [0, 0]
    m1 = pattern.shape.m1
    for view, width, offset in ((1, m1, 0), (2, pattern.shape.m2, m1)):
        rv = ranks.view_rank(view)
        for j in range(width):
            rows = pattern.observed_rows(offset + j)
            if pivot_rule == "smallest":
                pivots, extras = rows[:rv], rows[rv:]
            else:
                picked = sorted(rng.choice(len(rows), size=rv, replace=False))
                pivots = [rows[i] for i in picked]
                extras = [row for i, row in enumerate(rows) if i not in set(picked)]
            pivot_mask = 0
            for row in pivots:
                pivot_mask |= 1 << row
            for extra in extras:
                columns.append(
                    ConstraintColumn(
                        view=view,
                        source_column=j,
                        pivot_rows=tuple(pivots),
                        extra_row=extra,
                        support=pivot_mask | (1 << extra),
                    )
                )
                counts[view - 1] += 1
    return ConstraintMatrix(
        n=pattern.shape.n, columns=tuple(columns), k1=counts[0], k2=counts[1]
    )


def nonzero_rows(subset: ColumnSubset) -> int:
    """Number of rows touched by at least one column of the subset."""
    return subset.union_support().bit_count()


def split_by_view(subset: ColumnSubset) -> tuple[ColumnSubset, ColumnSubset]:
    m1 = m2 = 0
    for i in subset.indices():
        if subset.parent.columns[i].view == 1:
            m1 |= 1 << i
        else:
            m2 |= 1 << i
    return ColumnSubset(subset.parent, m1), ColumnSubset(subset.parent, m2)


def dump_dense(matrix: ConstraintMatrix) -> str:
    """Dense text dump in the pattern-file format, header ``n k1 k2``."""
    rows = ["".join(str(int(v)) for v in row) for row in matrix.to_dense()]
    return "\n".join([f"{matrix.n} {matrix.k1} {matrix.k2}", "dense", *rows]) + "\n"


def dump_provenance(matrix: ConstraintMatrix) -> str:
    """One line per column: ``view source_column extra_row`` (1-based)."""
    lines = [
        f"{col.view} {col.source_column + 1} {col.extra_row + 1}"
        for col in matrix.columns
    ]
    return "\n".join(lines) + "\n"
