import numpy as np
import pytest

# Filled by test_acceptance.py; printed after the run.
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def normal_equations(A, y):
    """Brute-force OLS oracle: explicit normal equations and inverse."""
    XtX = A.T @ A
    beta = np.linalg.solve(XtX, A.T @ y)
    resid = y - A @ beta
    n, k = A.shape
    sigma2 = resid @ resid / (n - k)
    se = np.sqrt(np.diag(sigma2 * np.linalg.inv(XtX)))
    r2 = 1 - (resid @ resid) / np.sum((y - y.mean()) ** 2)
    return beta, se, r2
