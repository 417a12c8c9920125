import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from mvcomplete.core import ProblemShape, RankTriple
from mvcomplete.pattern import pattern_from_coords

# The running 4x4 two-view example: view 1 is columns 1-2, view 2 is 3-4,
# ranks (r, r1, r2) = (2, 1, 2). Eleven observations.
WORKED_COORDS = [
    (0, 0), (0, 1), (0, 2), (0, 3),
    (1, 0), (1, 2), (1, 3),
    (2, 0), (2, 2),
    (3, 2), (3, 3),
]

WORKED_DENSE_CONSTRAINT = "4 2 3\ndense\n11111\n10111\n01100\n00011\n"


@pytest.fixture
def worked_shape():
    return ProblemShape(4, 2, 2)


@pytest.fixture
def worked_ranks():
    return RankTriple(2, 1, 2)


@pytest.fixture
def worked_pattern(worked_shape):
    return pattern_from_coords(worked_shape, WORKED_COORDS)


@pytest.fixture
def worked_pattern_file(tmp_path, worked_pattern):
    from mvcomplete.pattern import save_pattern

    path = tmp_path / "worked.pat"
    save_pattern(worked_pattern, path, style="coords")
    return path
