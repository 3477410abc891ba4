import numpy as np
import pytest

from potapov import MatPoly, RationalMatFn

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def zI(d=2, n=1):
    c = np.zeros((n + 1, d, d), dtype=complex)
    c[n] = np.eye(d)
    return RationalMatFn(MatPoly(c))


def const(A):
    return RationalMatFn(MatPoly.constant(A))


def two_by_two_divisor():
    """``(1/sqrt 2) [[1, -z], [1, z]]``."""
    s = 1 / np.sqrt(2)
    return RationalMatFn(MatPoly(np.array([[[s, 0], [s, 0]], [[0, -s], [0, s]]])))


def diag_b(alpha):
    """``diag(b_alpha, 1)``."""
    a = complex(alpha)
    num = np.array([[[-a, 0], [0, 1]], [[1, 0], [0, -np.conj(a)]]])
    return RationalMatFn(MatPoly(num), [a])


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
