import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

settings.register_profile("default", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


def one_based(path):
    return (np.asarray(path) + 1).tolist()


@st.composite
def instances(draw, t_max=64, s_max=256, integer_values=None):
    """(q, t, s) with q float32 of shape [t, s]; integer values force frequent ties."""
    t = draw(st.integers(1, t_max))
    s = draw(st.integers(t, max(t, s_max)))
    seed = draw(st.integers(0, 2**32 - 1))
    rng = np.random.default_rng(seed)
    if integer_values if integer_values is not None else draw(st.booleans()):
        q = rng.integers(-2, 3, size=(t, s)).astype(np.float32)
    else:
        q = rng.uniform(-5, 5, size=(t, s)).astype(np.float32)
    return q, t, s


ACCEPTANCE_LINES = []


def record_criterion(number, name, ok, detail=""):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {name}: {detail}")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
