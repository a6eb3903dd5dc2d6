import math

import numpy as np
import pytest

from giant_router.core import RouterConfig


def random_config(rng, *, allow_three=True, max_site=6):
    """Equal-band config drawn from the ranges used by the cross-checks."""
    n_out = int(rng.integers(1, 3)) if allow_three else 1
    site = 1 if n_out == 2 else int(rng.integers(1, max_site + 1))
    return RouterConfig.build(
        rabi=rng.uniform(0.0, 2.0),
        g_in=rng.uniform(0.1, 2.0),
        g_out=list(rng.uniform(0.1, 2.0, n_out)),
        site=site,
    )


def random_k(rng):
    return rng.uniform(0.01, 0.99) * math.pi


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def perfect_cfg():
    return RouterConfig.build(rabi=1.0, g_in=1.0, g_out=1.0)


# Filled by the acceptance module; printed once at the end of the session.
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, name, passed, detail in sorted(ACCEPTANCE_RESULTS):
        terminalreporter.write_line(f"{'PASS' if passed else 'FAIL'}  [{number:2d}] {name}: {detail}")
