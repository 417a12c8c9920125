"""Sampling patterns, pattern file I/O, and random pattern/instance generators.

Pattern file format (text)::

    n m1 m2
    dense
    <n lines of m1+m2 characters in {0,1}>

or::

    n m1 m2
    coords
    <one "row col" pair per line, 1-based>

All generators take an explicit seed and use numpy's PCG64 stream
(``numpy.random.default_rng``), so outputs replay bit-for-bit. Derived
streams are seeded as ``default_rng([seed, index])``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .core import ProblemShape, RankTriple, check_compatible
from .errors import (
    DimensionMismatchError,
    DuplicateCoordinateError,
    PatternFormatError,
)


@dataclass(frozen=True)
class SamplingPattern:
    """Binary observation mask over an ``n x (m1+m2)`` two-view matrix."""

    shape: ProblemShape
    observed: np.ndarray  # uint8, shape (n, m1+m2), entries in {0,1}

    def __post_init__(self):
        obs = np.asarray(self.observed, dtype=np.uint8)
        if obs.shape != (self.shape.n, self.shape.m):
            raise DimensionMismatchError(
                f"observed has shape {obs.shape}, expected "
                f"({self.shape.n}, {self.shape.m})"
            )
        if not np.isin(obs, (0, 1)).all():
            raise PatternFormatError("observed entries must be 0 or 1")
        obs.setflags(write=False)
        object.__setattr__(self, "observed", obs)

    @property
    def n_observed(self) -> int:
        return int(self.observed.sum())

    def n_observed_view(self, view: int) -> int:
        m1 = self.shape.m1
        block = self.observed[:, :m1] if view == 1 else self.observed[:, m1:]
        return int(block.sum())

    def column_sums(self) -> np.ndarray:
        return self.observed.sum(axis=0)

    def observed_rows(self, col: int) -> list[int]:
        """Ascending row indices (0-based) observed in global column ``col``."""
        return [int(x) for x in np.nonzero(self.observed[:, col])[0]]

    def without_entry(self, row: int, col: int) -> "SamplingPattern":
        """Copy with one observation removed (0-based global indices)."""
        if self.observed[row, col] != 1:
            raise ValueError(f"entry ({row}, {col}) is not observed")
        obs = self.observed.copy()
        obs[row, col] = 0
        return SamplingPattern(self.shape, obs)


def pattern_from_coords(
    shape: ProblemShape, coords: list[tuple[int, int]]
) -> SamplingPattern:
    """Build a pattern from 0-based ``(row, col)`` pairs."""
    obs = np.zeros((shape.n, shape.m), dtype=np.uint8)
    for row, col in coords:
        if not (0 <= row < shape.n and 0 <= col < shape.m):
            raise DimensionMismatchError(
                f"coordinate ({row + 1}, {col + 1}) outside a "
                f"{shape.n} x {shape.m} pattern"
            )
        if obs[row, col]:
            raise DuplicateCoordinateError(
                f"coordinate ({row + 1}, {col + 1}) listed twice"
            )
        obs[row, col] = 1
    return SamplingPattern(shape, obs)


def parse_pattern(text: str) -> SamplingPattern:
    """Parse the documented pattern file format."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if len(lines) < 2:
        raise PatternFormatError("pattern document needs a header and a mode line")
    head = lines[0].split()
    if len(head) != 3:
        raise PatternFormatError(f"header must be 'n m1 m2', got {lines[0]!r}")
    try:
        n, m1, m2 = (int(x) for x in head)
    except ValueError as exc:
        raise PatternFormatError(f"non-integer header field in {lines[0]!r}") from exc
    shape = ProblemShape(n, m1, m2)
    mode = lines[1]
    body = lines[2:]
    if mode == "dense":
        if len(body) != n:
            raise DimensionMismatchError(f"dense grid has {len(body)} rows, expected {n}")
        obs = np.zeros((n, shape.m), dtype=np.uint8)
        for i, row in enumerate(body):
            if len(row) != shape.m:
                raise DimensionMismatchError(
                    f"dense row {i + 1} has {len(row)} characters, expected {shape.m}"
                )
            if set(row) - {"0", "1"}:
                raise PatternFormatError(f"dense row {i + 1} contains non-binary characters")
            obs[i] = [int(ch) for ch in row]
        return SamplingPattern(shape, obs)
    if mode == "coords":
        coords = []
        for ln in body:
            parts = ln.split()
            if len(parts) != 2:
                raise PatternFormatError(f"coordinate line must be 'row col', got {ln!r}")
            try:
                row, col = int(parts[0]), int(parts[1])
            except ValueError as exc:
                raise PatternFormatError(f"non-integer coordinate in {ln!r}") from exc
            coords.append((row - 1, col - 1))
        return pattern_from_coords(shape, coords)
    raise PatternFormatError(f"unknown mode {mode!r}, expected 'dense' or 'coords'")


def load_pattern(path: str | Path) -> SamplingPattern:
    return parse_pattern(Path(path).read_text())


def dump_pattern(pattern: SamplingPattern, style: str = "dense") -> str:
    """Serialize a pattern in the documented format (trailing newline included)."""
    s = pattern.shape
    header = f"{s.n} {s.m1} {s.m2}"
    if style == "dense":
        rows = ["".join(str(int(v)) for v in row) for row in pattern.observed]
        return "\n".join([header, "dense", *rows]) + "\n"
    if style == "coords":
        pairs = [
            f"{r + 1} {c + 1}"
            for r, c in zip(*np.nonzero(pattern.observed))
        ]
        return "\n".join([header, "coords", *pairs]) + "\n"
    raise ValueError(f"unknown style {style!r}")


def save_pattern(pattern: SamplingPattern, path: str | Path, style: str = "dense") -> None:
    Path(path).write_text(dump_pattern(pattern, style))


def gen_fixed_per_column(
    shape: ProblemShape, l: int, seed: int | list[int]
) -> SamplingPattern:
    """Pattern with exactly ``l`` observations per column at random distinct rows."""
    if l < 0 or l > shape.n:
        raise ValueError(f"samples per column l={l} must lie in [0, n={shape.n}]")
    rng = np.random.default_rng(seed)
    obs = np.zeros((shape.n, shape.m), dtype=np.uint8)
    for j in range(shape.m):
        rows = rng.choice(shape.n, size=l, replace=False)
        obs[rows, j] = 1
    return SamplingPattern(shape, obs)


def gen_bernoulli(
    shape: ProblemShape, p: float, seed: int | list[int]
) -> SamplingPattern:
    """Pattern with i.i.d. Bernoulli(p) observations."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"probability p={p} must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    obs = (rng.random((shape.n, shape.m)) < p).astype(np.uint8)
    return SamplingPattern(shape, obs)


@dataclass(frozen=True)
class GenericInstance:
    """A random two-view matrix with exact factor structure.

    ``V`` is ``n x r`` partitioned ``[V1|V2|V3]`` of widths ``(r1p, rp, r2p)``;
    view 1 equals ``[V1|V2] @ T1`` and view 2 equals ``[V2|V3] @ T2``.
    """

    V: np.ndarray
    T1: np.ndarray
    T2: np.ndarray
    U: np.ndarray

    def __post_init__(self):
        for name in ("V", "T1", "T2", "U"):
            arr = getattr(self, name)
            arr.setflags(write=False)


def gen_generic_instance(
    shape: ProblemShape, ranks: RankTriple, seed: int | list[int]
) -> GenericInstance:
    """Draw ``V, T1, T2`` i.i.d. standard normal and assemble ``U``.

    Draw order is V, then T1, then T2 from a single ``default_rng(seed)``
    stream; this is part of the replay contract.
    """
    check_compatible(shape, ranks)
    rng = np.random.default_rng(seed)
    n, r = shape.n, ranks.r
    V = rng.standard_normal((n, r))
    T1 = rng.standard_normal((ranks.r1, shape.m1))
    T2 = rng.standard_normal((ranks.r2, shape.m2))
    U1 = V[:, : ranks.r1] @ T1  # [V1|V2]
    U2 = V[:, ranks.r1p :] @ T2  # [V2|V3]
    U = np.hstack([U1, U2])
    return GenericInstance(V=V, T1=T1, T2=T2, U=U)


def split_basis(V: np.ndarray, ranks: RankTriple) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Slice a joint basis into its ``(V1, V2, V3)`` blocks."""
    r1p, rp = ranks.r1p, ranks.rp
    return V[:, :r1p], V[:, r1p : r1p + rp], V[:, r1p + rp :]
