"""Canonical form of a joint basis, span-equivalence tests, coefficient recovery.

Two bases span the same two-view structure when their shared block spans
match, and each view's block pair spans match. Every such class contains
exactly one representative whose fixed blocks are pinned:

* top ``r1p x r1p`` of the exclusive view-1 block is the identity,
* top ``r2p x r2p`` of the exclusive view-2 block is the identity,
* rows ``q .. q+rp-1`` (with ``q = max(r1p, r2p)``) of the shared block are
  the identity, and the same rows of both exclusive blocks are zero.

``nr`` entries minus those pinned ones is exactly ``basis_dof``.
"""

from __future__ import annotations

import numpy as np

from .core import ProblemShape, RankTriple, find_deficient_column
from .errors import InsufficientSamplesError, SingularBlockError
from .pattern import SamplingPattern, split_basis

SINGULAR_RTOL = 1e-12


def canonical_fixed_entries(n: int, ranks: RankTriple) -> tuple[np.ndarray, np.ndarray]:
    """Mask and values of the pinned entries of an ``n x r`` canonical basis.

    Returns ``(fixed_mask, fixed_values)`` where ``fixed_mask`` is boolean
    ``n x r`` and ``fixed_values`` holds the pinned constants (0 or 1).
    """
    r1p, r2p, rp = ranks.r1p, ranks.r2p, ranks.rp
    q = max(r1p, r2p)
    mask = np.zeros((n, ranks.r), dtype=bool)
    vals = np.zeros((n, ranks.r))
    c2 = r1p  # first column of the shared block
    c3 = r1p + rp  # first column of the exclusive view-2 block
    mask[:r1p, :r1p] = True
    vals[:r1p, :r1p] = np.eye(r1p)
    mask[:r2p, c3 : c3 + r2p] = True
    vals[:r2p, c3 : c3 + r2p] = np.eye(r2p)
    mask[q : q + rp, c2 : c2 + rp] = True
    vals[q : q + rp, c2 : c2 + rp] = np.eye(rp)
    mask[q : q + rp, :r1p] = True
    mask[q : q + rp, c3 : c3 + r2p] = True
    return mask, vals


def is_canonical(V: np.ndarray, ranks: RankTriple, rtol: float = 1e-9) -> bool:
    """True iff all pinned blocks match their constants to relative tolerance."""
    mask, vals = canonical_fixed_entries(V.shape[0], ranks)
    scale = max(1.0, float(np.abs(V).max())) if V.size else 1.0
    return bool(np.all(np.abs(V[mask] - vals[mask]) <= rtol * scale))


def _invert_block(M: np.ndarray, what: str) -> np.ndarray:
    if M.shape[0] != M.shape[1]:
        raise ValueError(f"{what} block is not square: {M.shape}")
    if M.size == 0:
        return M.copy()
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] <= SINGULAR_RTOL * np.abs(M).max():
        raise SingularBlockError(f"{what} block is numerically singular")
    return np.linalg.inv(M)


def canonicalize(V: np.ndarray, ranks: RankTriple) -> np.ndarray:
    """Map a generic basis to the unique canonical member of its class.

    All three column transforms are built from the input blocks, so the
    operation is a single change of basis per block group and is idempotent
    on canonical inputs.
    """
    V = np.asarray(V, dtype=float)
    n = V.shape[0]
    if V.shape[1] != ranks.r:
        raise ValueError(f"basis has {V.shape[1]} columns, expected r={ranks.r}")
    r1p, r2p, rp = ranks.r1p, ranks.r2p, ranks.rp
    q = max(r1p, r2p)
    if n < q + rp:
        raise ValueError(f"basis needs at least {q + rp} rows, got {n}")
    V1, V2, V3 = split_basis(V, ranks)
    shared_rows = list(range(q, q + rp))

    A2 = _invert_block(V2[shared_rows, :], "shared")
    W1 = np.hstack([V1, V2])
    rows1 = list(range(r1p)) + shared_rows
    A1 = _invert_block(W1[rows1, :], "view-1")[:, :r1p]
    W2 = np.hstack([V2, V3])
    rows2 = list(range(r2p)) + shared_rows
    A3 = _invert_block(W2[rows2, :], "view-2")[:, :r2p]

    return np.hstack([W1 @ A1, V2 @ A2, W2 @ A3])


def numeric_rank(A: np.ndarray, rtol: float = 1e-9) -> int:
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > rtol * s[0]))


def is_span_equivalent(
    V: np.ndarray, Vp: np.ndarray, ranks: RankTriple, rtol: float = 1e-9
) -> bool:
    """True iff the two bases lie in the same span-equivalence class.

    Checks that the shared blocks, the view-1 block pairs and the view-2
    block pairs each span the same column space, via numerical ranks.
    """
    V = np.asarray(V, dtype=float)
    Vp = np.asarray(Vp, dtype=float)
    if V.shape != Vp.shape or V.shape[1] != ranks.r:
        return False
    V1, V2, V3 = split_basis(V, ranks)
    P1, P2, P3 = split_basis(Vp, ranks)
    pairs = (
        (V2, P2, ranks.rp),
        (np.hstack([V1, V2]), np.hstack([P1, P2]), ranks.r1),
        (np.hstack([V2, V3]), np.hstack([P2, P3]), ranks.r2),
    )
    for A, B, k in pairs:
        if numeric_rank(A, rtol) != k or numeric_rank(B, rtol) != k:
            return False
        if numeric_rank(np.hstack([A, B]), rtol) != k:
            return False
    return True


def solve_coefficients(
    V: np.ndarray,
    pattern: SamplingPattern,
    U_values: np.ndarray,
    ranks: RankTriple,
) -> tuple[np.ndarray, np.ndarray]:
    """Recover the per-view coefficient matrices from pivot observations.

    For each view-v column, the ``r_v`` smallest observed rows form a square
    system in that column's coefficients; generic bases make it solvable.
    Returns ``(T1, T2)`` reproducing every pivot observation.
    """
    V = np.asarray(V, dtype=float)
    U_values = np.asarray(U_values, dtype=float)
    shape = pattern.shape
    if U_values.shape != (shape.n, shape.m):
        raise ValueError(
            f"values have shape {U_values.shape}, expected ({shape.n}, {shape.m})"
        )
    deficient = find_deficient_column(pattern, ranks)
    if deficient is not None:
        raise InsufficientSamplesError(*deficient)
    W1 = V[:, : ranks.r1]
    W2 = V[:, ranks.r1p :]
    T1 = np.zeros((ranks.r1, shape.m1))
    T2 = np.zeros((ranks.r2, shape.m2))
    for view, width, offset, W, T in (
        (1, shape.m1, 0, W1, T1),
        (2, shape.m2, shape.m1, W2, T2),
    ):
        rv = ranks.view_rank(view)
        if rv == 0:
            continue
        for j in range(width):
            pivots = pattern.observed_rows(offset + j)[:rv]
            M = W[pivots, :]
            s = np.linalg.svd(M, compute_uv=False)
            if s[-1] <= SINGULAR_RTOL * max(1.0, float(np.abs(M).max())):
                raise SingularBlockError(
                    f"pivot system of view-{view} column {j + 1} is singular"
                )
            T[:, j] = np.linalg.solve(M, U_values[pivots, offset + j])
    return T1, T2
