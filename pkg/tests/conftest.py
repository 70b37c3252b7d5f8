import numpy as np
import pytest

from infeasible_di import CASE_STUDY, BoundaryData

# (a, c1, c2, ts) as printed in the reference table, 15 decimals
REF_ROOTS = [
    (2.0, 0.971167995377200, -0.680944121562971, 0.701159969031407),
    (1.5, 2.172720275813312, -1.506394502798288, 0.693321878369456),
    (1.0, 3.410002343912741, -2.335315565026760, 0.684842803464806),
    (0.5, 4.685608293782471, -3.166921471137164, 0.675882675754071),
    (0.1, 5.734078050140310, -3.833335390181957, 0.668518174440991),
]
REF_TS = {a: ts for a, _, _, ts in REF_ROOTS}

# DR reference runs, lambda = 0.5, gamma = 0.95, eps = 1e-6: N -> [(a, iterations, ts)]
DR_REFERENCE = {
    1000: [(0.1, 9, 0.6678), (0.5, 30, 0.6729), (1.0, 55, 0.6799), (1.5, 102, 0.6870), (2.0, 201, 0.6959)],
    10_000: [(0.1, 11, 0.6684), (0.5, 27, 0.6757), (1.0, 50, 0.6844), (1.5, 94, 0.6928), (2.0, 238, 0.7005)],
    100_000: [(0.1, 11, 0.6685), (0.5, 27, 0.6760), (1.0, 51, 0.6848), (1.5, 94, 0.6933), (2.0, 237, 0.7011)],
}


@pytest.fixture
def case_study() -> BoundaryData:
    return CASE_STUDY


def exact_terminal_state(pieces, s0, v0):
    """Integrate a piecewise polynomial control twice, exactly.

    ``pieces`` is a list of ``(t_start, t_end, coeffs)`` with ``coeffs`` in
    increasing powers of the global time ``t``.  Velocity and position are
    carried across the breakpoints by evaluating antiderivatives.
    """
    x1, x2 = s0, v0
    for lo, hi, coeffs in pieces:
        if hi <= lo:
            continue
        u = np.polynomial.Polynomial(coeffs)
        vel = u.integ(lbnd=lo) + x2
        pos = vel.integ(lbnd=lo) + x1
        x1, x2 = pos(hi), vel(hi)
    return x1, x2


def random_smooth(seed, modes=4):
    """A random smooth function on [0, 1] (low-order trigonometric series)."""
    rng = np.random.default_rng(seed)
    a = rng.normal(size=modes + 1)
    b = rng.normal(size=modes + 1)
    shift = rng.normal()

    def f(t):
        t = np.asarray(t, dtype=float)
        k = np.arange(modes + 1)[:, None]
        return shift + (a[:, None] * np.cos(np.pi * k * t) + b[:, None] * np.sin(np.pi * k * t)).sum(0)

    return f


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(label, ok, detail=""):
        line = f"[{'PASS' if ok else 'FAIL'}] {label}" + (f" -- {detail}" if detail else "")
        lines.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
