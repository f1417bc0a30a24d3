import math

import numpy as np
import pytest

from cahs import (AnalyticDistance, EuclideanFlat, Hyperplane, TransnormalBuilder,
                  TransnormalField, WarpedProduct, WarpingProfile)


def hyperbolic_field(C, n=2):
    """f = sqrt(2 C x_n + 1) over the half-space x_n > 0 with rho = 1/t."""
    prof = WarpingProfile.reciprocal()
    seed = Hyperplane(np.eye(n)[-1], 0.0)
    builder = TransnormalBuilder(prof, C=C, s0=1.0)
    return TransnormalField(builder, AnalyticDistance(seed, EuclideanFlat(n)))


def hyperbolic_ambient(n=2):
    return WarpedProduct(WarpingProfile.reciprocal(), EuclideanFlat(n))


def great_circle_xy():
    e1, e2 = np.array([1.0, 0, 0]), np.array([0, 1.0, 0])
    return (lambda v: math.cos(v) * e1 + math.sin(v) * e2,
            lambda v: -math.sin(v) * e1 + math.cos(v) * e2)


@pytest.fixture
def rng():
    return np.random.default_rng(0)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = {}


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for k in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(ACCEPTANCE_LINES[k])
