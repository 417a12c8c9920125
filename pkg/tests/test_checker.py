import numpy as np
import pytest

from _naive import columns_of, naive_bound, naive_candidate_ok, naive_single_view_ok
from mvcomplete.checker import (
    Status,
    check_finite,
    check_unique,
    count_bound,
    decide_finite,
    find_violating_subset,
    single_view_condition,
    verify_candidate,
)
from mvcomplete.constraint import build_constraint, split_by_view
from mvcomplete.core import ProblemShape, RankTriple, basis_dof
from mvcomplete.pattern import (
    SamplingPattern,
    gen_bernoulli,
    gen_fixed_per_column,
    pattern_from_coords,
)


@pytest.fixture
def worked_constraint(worked_pattern, worked_ranks):
    return build_constraint(worked_pattern, worked_ranks)


# ---------------------------------------------------------------- count_bound

def test_count_bound_worked_cases(worked_constraint, worked_ranks):
    cm = worked_constraint
    assert count_bound(cm.subset([]), worked_ranks) == 0
    assert count_bound(cm.full_subset(), worked_ranks) == 5
    # a view-2 pair reaching all four rows: bound = (4-2) + (4-1) = 5
    assert count_bound(cm.subset([2, 3]), worked_ranks) == 5


def test_count_bound_matches_naive_random():
    shape = ProblemShape(8, 4, 4)
    ranks = RankTriple(3, 2, 2)
    rng = np.random.default_rng(0)
    for seed in range(20):
        pattern = gen_fixed_per_column(shape, 4, seed=seed)
        cm = build_constraint(pattern, ranks)
        members = int(rng.integers(0, 1 << cm.k))
        subset = type(cm.full_subset())(cm, members)
        assert count_bound(subset, ranks) == naive_bound(columns_of(subset), ranks)


# ----------------------------------------------------------- verify_candidate

def test_worked_candidate_passes(worked_constraint, worked_ranks):
    assert verify_candidate(worked_constraint.full_subset(), worked_ranks)


def test_all_31_subsets_satisfy_the_count(worked_constraint, worked_ranks):
    # the worked example's case analysis: every nonempty subset passes
    cm = worked_constraint
    for members in range(1, 1 << cm.k):
        subset = cm.subset([i for i in range(cm.k) if members >> i & 1])
        v1, v2 = split_by_view(subset)
        g2 = v2.union_support().bit_count()
        g1 = v1.union_support().bit_count()
        g = subset.union_support().bit_count()
        bound = count_bound(subset, worked_ranks)
        # case reductions for ranks (2,1,2): r1p=0, r2p=1, rp=1
        if g2 == 0:
            assert bound == max(0, g1 - 1)
        elif g2 == 3:
            assert bound == 1 + max(0, g - 1)
        elif g2 == 4:
            assert g == 4 and bound == 5
        else:
            raise AssertionError(f"unexpected g2={g2}")
        assert bound >= len(subset)


def test_duplicate_support_pigeonhole():
    # three view-1 columns sharing one support: bound r1p*1 < 3 columns
    shape = ProblemShape(3, 3, 1)
    ranks = RankTriple(2, 2, 0)
    coords = [(r, c) for c in range(3) for r in range(3)]
    pattern = pattern_from_coords(shape, coords)
    cm = build_constraint(pattern, ranks)
    assert cm.k1 == 3 and cm.k2 == 0
    assert not verify_candidate(cm.full_subset(), ranks)
    witness = find_violating_subset(cm.full_subset(), ranks)
    assert count_bound(witness, ranks) < len(witness)


def test_verify_matches_naive_on_random_instances():
    rng = np.random.default_rng(42)
    checked = 0
    for seed in range(250):
        n = int(rng.integers(5, 9))
        shape = ProblemShape(n, int(rng.integers(2, 5)), int(rng.integers(2, 5)))
        r1 = int(rng.integers(1, 4))
        r2 = int(rng.integers(1, 4))
        r = int(rng.integers(max(r1, r2), min(n, r1 + r2) + 1))
        ranks = RankTriple(r, r1, r2)
        pattern = gen_bernoulli(shape, 0.8, seed=seed)
        sums = pattern.column_sums()
        if (sums[: shape.m1] < r1).any() or (sums[shape.m1 :] < r2).any():
            continue
        cm = build_constraint(pattern, ranks)
        if cm.k == 0 or cm.k > 12:
            continue
        subset = cm.full_subset()
        expected = naive_candidate_ok(columns_of(subset), ranks)
        assert verify_candidate(subset, ranks) == expected
        witness = find_violating_subset(subset, ranks)
        if witness is not None:
            assert naive_bound(columns_of(witness), ranks) < len(witness)
        checked += 1
    assert checked >= 15


# ------------------------------------------------------ single-view condition

def test_single_view_distinct_extras():
    n = 6
    shape = ProblemShape(n, 1, 1)
    pattern = SamplingPattern(shape, np.ones((n, 2), dtype=np.uint8))
    ranks = RankTriple(1, 1, 1)
    cm = build_constraint(pattern, ranks)
    view1, _ = split_by_view(cm.full_subset())
    assert single_view_condition(view1, ranks.r1)


def test_single_view_identical_pair_fails():
    shape = ProblemShape(3, 2, 1)
    ranks = RankTriple(1, 1, 0)
    coords = [(0, 0), (1, 0), (0, 1), (1, 1)]
    pattern = pattern_from_coords(shape, coords)
    cm = build_constraint(pattern, ranks)
    view1, _ = split_by_view(cm.full_subset())
    assert len(view1) == 2
    assert not single_view_condition(view1, ranks.r1)


def test_single_view_matches_naive_random():
    rng = np.random.default_rng(7)
    checked = 0
    for seed in range(150):
        shape = ProblemShape(8, 4, 1)
        r1 = int(rng.integers(1, 4))
        ranks = RankTriple(r1, r1, 0)
        pattern = gen_bernoulli(shape, 0.75, seed=1000 + seed)
        sums = pattern.column_sums()
        if (sums[: shape.m1] < r1).any():
            continue
        cm = build_constraint(pattern, ranks)
        view1, _ = split_by_view(cm.full_subset())
        if not 0 < len(view1) <= 10:
            continue
        cols = [(v, set(rows)) for v, rows in (
            (c.view, c.support_rows) for c in view1
        )]
        assert single_view_condition(view1, r1) == naive_single_view_ok(cols, r1)
        checked += 1
    assert checked >= 10


def test_single_view_rejects_mixed_views(worked_constraint):
    with pytest.raises(ValueError):
        single_view_condition(worked_constraint.full_subset(), 1)


# ----------------------------------------------------------------- check_finite

def test_worked_example_finite(worked_pattern, worked_ranks):
    verdict, cm = decide_finite(worked_pattern, worked_ranks)
    assert verdict.status == Status.FINITE
    assert verdict.budget == 5
    cert = verdict.certificate["finite"]
    assert len(cert) == 5
    assert verify_candidate(cert, worked_ranks)


def test_missing_corner_infinite(worked_pattern, worked_ranks):
    verdict, _ = decide_finite(worked_pattern.without_entry(3, 3), worked_ranks)
    assert verdict.status == Status.INFINITE
    assert verdict.witness == {"available": 4, "required": 5}


def test_zero_rank_trivially_finite():
    shape = ProblemShape(2, 1, 1)
    pattern = SamplingPattern(shape, np.zeros((2, 2), dtype=np.uint8))
    verdict, _ = decide_finite(pattern, RankTriple(0, 0, 0))
    assert verdict.status == Status.FINITE
    assert verdict.budget == 0
    assert len(verdict.certificate["finite"]) == 0


def test_floor_violation_is_infinite(worked_pattern, worked_ranks):
    # removing the only observation of view-1 column 2 underdetermines it
    verdict, cm = decide_finite(worked_pattern.without_entry(0, 1), worked_ranks)
    assert verdict.status == Status.INFINITE
    assert cm is None
    assert verdict.witness["view"] == 1 and verdict.witness["column"] == 2


def _clique_instance():
    # nine view-1 columns in three support cliques; counting passes but no
    # 4-column certificate exists, so only a complete search proves Infinite
    shape = ProblemShape(5, 9, 1)
    ranks = RankTriple(1, 1, 0)
    cliques = [((0, 1), 3), ((2, 3), 3), ((0, 4), 3)]
    coords = []
    col = 0
    for rows, count in cliques:
        for _ in range(count):
            coords.extend((r, col) for r in rows)
            col += 1
    return pattern_from_coords(shape, coords), ranks, shape


def test_complete_search_proves_infinite():
    pattern, ranks, shape = _clique_instance()
    m = basis_dof(shape, ranks)
    cm = build_constraint(pattern, ranks)
    assert cm.k >= m
    assert count_bound(cm.full_subset(), ranks) >= m
    verdict = check_finite(cm, ranks, shape, search="exhaustive")
    assert verdict.status == Status.INFINITE
    assert "complete search" in verdict.reason


def test_greedy_failure_is_unknown_never_infinite():
    pattern, ranks, shape = _clique_instance()
    cm = build_constraint(pattern, ranks)
    verdict = check_finite(cm, ranks, shape, search="greedy")
    assert verdict.status == Status.UNKNOWN


def test_enumeration_cap_yields_unknown(worked_pattern, worked_ranks):
    verdict, _ = decide_finite(worked_pattern, worked_ranks, max_nodes=2)
    assert verdict.status == Status.UNKNOWN
    assert "cap" in verdict.reason


def test_verdict_determinism(worked_pattern, worked_ranks):
    a, _ = decide_finite(worked_pattern, worked_ranks)
    b, _ = decide_finite(worked_pattern, worked_ranks)
    assert a == b
    assert a.to_dict() == b.to_dict()


def test_monotone_in_observations():
    # Adding an observation must not flip Finite to Infinite. The counting
    # criterion has a narrow sufficiency gap at equality margins (its
    # certificate can overcount independence; re-pivoting after an insert
    # then exposes the truth), so any observed flip must trace to that
    # edge: the Jacobian oracle has to call the *before* pattern Infinite
    # already. Genuine regressions would flip on oracle-Finite patterns.
    from mvcomplete.oracle import finiteness_oracle

    shape = ProblemShape(6, 3, 3)
    ranks = RankTriple(2, 1, 2)
    flips = []
    for seed in range(30):
        pattern = gen_fixed_per_column(shape, 4, seed=seed)
        before, _ = decide_finite(pattern, ranks)
        zeros = np.argwhere(pattern.observed == 0)
        if len(zeros) == 0:
            continue
        row, col = zeros[seed % len(zeros)]
        obs = pattern.observed.copy()
        obs[row, col] = 1
        after, _ = decide_finite(SamplingPattern(shape, obs), ranks)
        if before.status == Status.FINITE and after.status == Status.INFINITE:
            flips.append((seed, pattern))
    assert len(flips) <= 2
    for seed, pattern in flips:
        assert finiteness_oracle(pattern, ranks).status == Status.INFINITE


# ----------------------------------------------------------------- check_unique

def test_worked_example_unique_unknown(worked_constraint, worked_ranks, worked_shape):
    verdict = check_unique(worked_constraint, worked_ranks, worked_shape)
    assert verdict.status == Status.UNKNOWN
    assert verdict.witness == {"available": 5, "required": 10}


def test_fully_observed_unique_certified():
    n = 6
    shape = ProblemShape(n, 5, 5)
    ranks = RankTriple(2, 1, 1)
    pattern = SamplingPattern(shape, np.ones((n, 10), dtype=np.uint8))
    cm = build_constraint(pattern, ranks)
    verdict = check_unique(cm, ranks, shape)
    assert verdict.status == Status.UNIQUE
    cert = verdict.certificate
    m = basis_dof(shape, ranks)
    assert len(cert["finite"]) == m
    assert len(cert["view1"]) == n - ranks.r1
    assert len(cert["view2"]) == n - ranks.r2
    # pairwise disjoint
    masks = [cert[k].members for k in ("finite", "view1", "view2")]
    assert masks[0] & masks[1] == 0
    assert masks[0] & masks[2] == 0
    assert masks[1] & masks[2] == 0
    # the per-view sets really satisfy the single-view margin
    assert single_view_condition(cert["view1"], ranks.r1)
    assert single_view_condition(cert["view2"], ranks.r2)
    assert verify_candidate(cert["finite"], ranks)


def test_unique_strict_mode_still_works_when_sources_abound():
    n = 6
    shape = ProblemShape(n, 5, 5)
    ranks = RankTriple(2, 1, 1)
    pattern = SamplingPattern(shape, np.ones((n, 10), dtype=np.uint8))
    cm = build_constraint(pattern, ranks)
    verdict = check_unique(cm, ranks, shape, strict_subsets=True)
    # strict mode allows one column per source column: 10 sources for
    # 10 + 5 + 5 = 20 needed columns, so it must fail with Unknown
    assert verdict.status == Status.UNKNOWN


def test_strict_mode_blocks_worked_certificate(worked_pattern, worked_ranks):
    # the worked certificate reuses source columns, so the strict reading
    # cannot reach the 5-column budget (only 3 distinct sources exist)
    verdict, _ = decide_finite(worked_pattern, worked_ranks, strict_subsets=True)
    assert verdict.status == Status.INFINITE
    assert verdict.witness["available"] == 3
