import math
import numpy as np
import pytest
from collections import namedtuple

from helixrec.helix import EXAMPLE_CURVES

ExampleCase = namedtuple('ExampleCase', ['kind', 'params', 'domain'])

# parameters and domains of the four closed-form examples
EXAMPLE_CASES = {
    'plane': ExampleCase('plane', {'a': 1.0}, (0.5, 3.0)),
    'circular': ExampleCase('circular', {'a': 2.0, 'alpha': math.pi / 3}, (0.0, 10.0)),
    'conical': ExampleCase('conical', {'a': 1.0, 'alpha': math.pi / 4}, (1.0, 5.0)),
    'catenary': ExampleCase('catenary', {'a': 1.0, 'alpha': math.pi / 3}, (-2.0, 2.0)),
}


@pytest.fixture(params=sorted(EXAMPLE_CASES))
def example_case(request):
    return EXAMPLE_CASES[request.param]


@pytest.fixture
def example_profile():
    """Factory: ``example_profile(kind, domain=None)`` builds the intrinsic profile of an example."""

    def make(kind, domain=None):
        case = EXAMPLE_CASES[kind]
        return EXAMPLE_CURVES[kind].profile(case.params, domain or case.domain)

    return make


@pytest.fixture
def rng():
    return np.random.default_rng(20240417)
