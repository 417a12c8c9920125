import numpy as np
import pytest
from hypothesis import given, strategies as st

from mvcomplete.core import (
    ProblemShape,
    RankTriple,
    basis_dof,
    derived_ranks,
    has_min_samples_per_column,
)
from mvcomplete.errors import InvalidRankError
from mvcomplete.pattern import SamplingPattern, pattern_from_coords


def valid_triples(max_view=6):
    return st.tuples(
        st.integers(0, max_view), st.integers(0, max_view)
    ).flatmap(
        lambda pair: st.integers(max(pair), pair[0] + pair[1]).map(
            lambda r: RankTriple(r, pair[0], pair[1])
        )
    )


@pytest.mark.parametrize(
    "triple, expected",
    [
        ((2, 1, 2), (0, 1, 1)),
        ((4, 2, 3), (1, 2, 1)),
        ((5, 5, 5), (0, 0, 5)),
    ],
)
def test_derived_ranks(triple, expected):
    assert derived_ranks(RankTriple(*triple)) == expected


@pytest.mark.parametrize(
    "triple",
    [(1, 2, 1), (1, 1, 2), (3, 1, 1), (-1, 0, 0), (2, -1, 2)],
)
def test_invalid_triples_rejected(triple):
    with pytest.raises(InvalidRankError):
        RankTriple(*triple)


@given(valid_triples())
def test_derived_components_nonnegative_and_partition(ranks):
    r1p, r2p, rp = derived_ranks(ranks)
    assert r1p >= 0 and r2p >= 0 and rp >= 0
    assert r1p + r2p + rp == ranks.r


@pytest.mark.parametrize(
    "shape, triple, expected",
    [
        ((4, 2, 2), (2, 1, 2), 5),
        ((4, 3, 4), (4, 2, 3), 7),
        ((6, 1, 1), (0, 0, 0), 0),
    ],
)
def test_basis_dof_values(shape, triple, expected):
    assert basis_dof(ProblemShape(*shape), RankTriple(*triple)) == expected


@given(valid_triples(max_view=5), st.integers(0, 20))
def test_basis_dof_identity(ranks, extra):
    n = ranks.r + extra
    if n == 0:
        return
    shape = ProblemShape(n, max(1, ranks.r1), max(1, ranks.r2))
    lhs = basis_dof(shape, ranks)
    rhs = (
        ranks.r1p * (n - ranks.r1)
        + ranks.r2p * (n - ranks.r2)
        + ranks.rp * (n - ranks.rp)
    )
    assert lhs == rhs
    assert lhs >= 0


def test_basis_dof_rejects_incompatible_shape():
    with pytest.raises(InvalidRankError):
        basis_dof(ProblemShape(2, 3, 3), RankTriple(3, 2, 2))


def test_min_samples_on_worked_example(worked_pattern, worked_ranks):
    assert has_min_samples_per_column(worked_pattern, worked_ranks)


def test_min_samples_all_zero():
    shape = ProblemShape(3, 2, 2)
    pattern = SamplingPattern(shape, np.zeros((3, 4), dtype=np.uint8))
    assert not has_min_samples_per_column(pattern, RankTriple(1, 1, 1))
    assert has_min_samples_per_column(pattern, RankTriple(0, 0, 0))


def test_min_samples_boundary():
    # one view-2 column holding exactly r2 - 1 samples fails the floor
    shape = ProblemShape(4, 1, 2)
    coords = [(0, 0), (0, 1), (1, 1), (0, 2)]  # view-2 col 2 has 1 < r2=2
    pattern = pattern_from_coords(shape, coords)
    assert not has_min_samples_per_column(pattern, RankTriple(2, 1, 2))
    coords.append((2, 2))
    pattern = pattern_from_coords(shape, coords)
    assert has_min_samples_per_column(pattern, RankTriple(2, 1, 2))
