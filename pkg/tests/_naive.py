"""Independent brute-force reference implementations used only by tests.

These deliberately avoid the library's bitmask DFS machinery: subsets are
enumerated exhaustively and row counts are computed with Python sets, so
they stay an independent oracle for the pruned search paths.
"""

from itertools import combinations


def naive_bound(columns, ranks):
    """columns: list of (view, set_of_rows). Returns the counting bound."""
    rows1 = set().union(*(rows for view, rows in columns if view == 1), set())
    rows2 = set().union(*(rows for view, rows in columns if view == 2), set())
    rows = rows1 | rows2
    return (
        ranks.r1p * max(0, len(rows1) - ranks.r1)
        + ranks.r2p * max(0, len(rows2) - ranks.r2)
        + ranks.rp * max(0, len(rows) - ranks.rp)
    )


def naive_candidate_ok(columns, ranks):
    """Check every nonempty subset satisfies bound >= count, by enumeration."""
    for size in range(1, len(columns) + 1):
        for combo in combinations(columns, size):
            if naive_bound(list(combo), ranks) < size:
                return False
    return True


def naive_single_view_ok(columns, r_v):
    """Check every nonempty subset satisfies g - r_v >= c, by enumeration."""
    for size in range(1, len(columns) + 1):
        for combo in combinations(columns, size):
            rows = set().union(*(rows for _, rows in combo))
            if len(rows) - r_v < size:
                return False
    return True


def columns_of(subset):
    """Convert a library ColumnSubset to the plain (view, rows) form."""
    return [
        (col.view, set(col.support_rows)) for col in subset
    ]
