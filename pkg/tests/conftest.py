import pytest

from dlab.surjective import select_ladder
from dlab.weights import WeightSpec


@pytest.fixture(scope="session")
def series4():
    """The desk-scale construction: one_minus_r2, r = 1/2, four terms."""
    return select_ladder(WeightSpec.one_minus_r2(), r=0.5, n_terms=4)
