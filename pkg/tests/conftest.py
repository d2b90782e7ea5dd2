import numpy as np
import pytest

from liftput.prob import validate_joint


def random_joint(rng, s_card, x_card, conc=1.0):
    while True:
        t = rng.dirichlet(np.full(s_card * x_card, conc)).reshape(s_card, x_card)
        if t.sum(axis=0).min() > 1e-3 and t.sum(axis=1).min() > 1e-3:
            return validate_joint(t, renormalize=True)


def random_mechanism_columns(rng, p_x, n_out):
    """Random backward channel consistent with p_x: Bayes-invert a random forward channel."""
    fwd = rng.dirichlet(np.full(n_out, 0.5), size=p_x.size)  # (x, y)
    p_xy = p_x[:, None] * fwd
    p_y = p_xy.sum(axis=0)
    keep = p_y > 0
    return (p_xy[:, keep] / p_y[keep]).T, p_y[keep]


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


@pytest.fixture
def sym_joint():
    return validate_joint([[0.4, 0.1], [0.1, 0.4]])


# (criterion, "PASS"/"FAIL", detail) filled in by the acceptance module
ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, detail in sorted(ACCEPTANCE):
        terminalreporter.write_line(f"{verdict} {name}: {detail}")
