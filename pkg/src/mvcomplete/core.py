"""Rank arithmetic, dimension formulas and validation shared by all modules.

A two-view problem is described by a joint rank ``r`` together with the two
per-view ranks ``r1`` and ``r2``. Three derived quantities recur everywhere:

* ``r1p = r - r2``: columns of the joint basis exclusive to view 1,
* ``r2p = r - r1``: columns exclusive to view 2,
* ``rp = r1 + r2 - r``: columns shared by both views.

All three are nonnegative exactly when the triple is consistent, and they
partition the joint basis: ``r1p + rp + r2p = r``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

from .errors import InvalidRankError

if TYPE_CHECKING:  # pragma: no cover
    from .pattern import SamplingPattern


@dataclass(frozen=True)
class RankTriple:
    """Joint rank plus per-view ranks, validated on construction."""

    r: int
    r1: int
    r2: int

    def __post_init__(self):
        for name in ("r", "r1", "r2"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 0:
                raise InvalidRankError(f"{name} must be a nonnegative integer, got {v!r}")
        if self.r1 > self.r or self.r2 > self.r:
            raise InvalidRankError(
                f"view ranks may not exceed the joint rank: got r={self.r}, "
                f"r1={self.r1}, r2={self.r2}"
            )
        if self.r > self.r1 + self.r2:
            raise InvalidRankError(
                f"joint rank may not exceed r1 + r2: got r={self.r}, "
                f"r1={self.r1}, r2={self.r2}"
            )

    @property
    def r1p(self) -> int:
        """Basis columns exclusive to view 1."""
        return self.r - self.r2

    @property
    def r2p(self) -> int:
        """Basis columns exclusive to view 2."""
        return self.r - self.r1

    @property
    def rp(self) -> int:
        """Basis columns shared by both views."""
        return self.r1 + self.r2 - self.r

    def view_rank(self, view: int) -> int:
        if view not in (1, 2):
            raise ValueError(f"view must be 1 or 2, got {view}")
        return self.r1 if view == 1 else self.r2


@dataclass(frozen=True)
class ProblemShape:
    """Row count and per-view column counts of the sampled matrix."""

    n: int
    m1: int
    m2: int

    def __post_init__(self):
        for name in ("n", "m1", "m2"):
            v = getattr(self, name)
            if not isinstance(v, int) or v <= 0:
                raise InvalidRankError(f"{name} must be a positive integer, got {v!r}")

    @property
    def m(self) -> int:
        return self.m1 + self.m2


def check_compatible(shape: ProblemShape, ranks: RankTriple) -> None:
    """Raise unless the shape can host a matrix with the given ranks."""
    if shape.n < ranks.r:
        raise InvalidRankError(f"n={shape.n} is smaller than the joint rank r={ranks.r}")
    if shape.m1 < ranks.r1:
        raise InvalidRankError(f"m1={shape.m1} is smaller than r1={ranks.r1}")
    if shape.m2 < ranks.r2:
        raise InvalidRankError(f"m2={shape.m2} is smaller than r2={ranks.r2}")


def derived_ranks(ranks: RankTriple) -> tuple[int, int, int]:
    """Return ``(r1p, r2p, rp)`` for a validated triple."""
    return ranks.r1p, ranks.r2p, ranks.rp


def basis_dof(shape: ProblemShape, ranks: RankTriple) -> int:
    """Degrees of freedom of the joint basis once its fixed blocks are pinned.

    Equals ``n*r - r^2 - r1^2 - r2^2 + r*(r1 + r2)``, which is also
    ``r1p*(n - r1) + r2p*(n - r2) + rp*(n - rp)``. This is the number of
    independent constraints needed to cut the solution set down to finitely
    many points.
    """
    check_compatible(shape, ranks)
    r, r1, r2 = ranks.r, ranks.r1, ranks.r2
    return shape.n * r - r * r - r1 * r1 - r2 * r2 + r * (r1 + r2)


def has_min_samples_per_column(pattern: "SamplingPattern", ranks: RankTriple) -> bool:
    """True iff every view-v column carries at least ``r_v`` observed entries.

    This is the floor below which the per-column coefficient systems are
    underdetermined; callers decide whether a failure is an error or a verdict.
    """
    return find_deficient_column(pattern, ranks) is None


def find_deficient_column(
    pattern: "SamplingPattern", ranks: RankTriple
) -> tuple[int, int, int, int] | None:
    """Return ``(view, column, have, need)`` for the first under-sampled column."""
    sums = pattern.column_sums()
    m1 = pattern.shape.m1
    for j in range(m1):
        if sums[j] < ranks.r1:
            return (1, j, int(sums[j]), ranks.r1)
    for j in range(m1, pattern.shape.m):
        if sums[j] < ranks.r2:
            return (2, j - m1, int(sums[j]), ranks.r2)
    return None
