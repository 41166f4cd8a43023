import os

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from concurgraph import build_csr

settings.register_profile(
    "default", deadline=None, suppress_health_check=[HealthCheck.too_slow], max_examples=60
)
settings.register_profile("ci", deadline=None, suppress_health_check=[HealthCheck.too_slow],
                          max_examples=200)
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

N_CRITERIA = 10
_acceptance: dict[int, tuple[bool, str]] = {}


def record(k: int, ok: bool, detail: str = "") -> None:
    """Remember the outcome of acceptance criterion ``k`` for the summary."""
    prev = _acceptance.get(k)
    if prev is not None:
        ok = ok and prev[0]
        detail = f"{prev[1]}; {detail}" if prev[1] else detail
    _acceptance[k] = (ok, detail)
    print(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


@pytest.fixture
def acceptance():
    return record


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for k in range(1, N_CRITERIA + 1):
        ok, detail = _acceptance.get(k, (False, "not run"))
        tr.write_line(f"criterion {k}: {'PASS' if ok else 'FAIL'} - {detail}")


# ---------------------------------------------------------------------------
# shared helpers


def thread_counts():
    return sorted({1, 4, os.cpu_count() or 1})


def graph_from(n, edges, directed=True):
    return build_csr(n, np.asarray(edges, np.int64).reshape(-1, 2), directed=directed)


@st.composite
def digraphs(draw, max_n=30, max_deg=4):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, max_deg * n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                          min_size=k, max_size=k))
    edges = [(u, v) for u, v in pairs if u != v]
    return graph_from(n, edges)


@st.composite
def ugraphs(draw, max_n=30, max_deg=3):
    n = draw(st.integers(1, max_n))
    k = draw(st.integers(0, max_deg * n))
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)),
                          min_size=k, max_size=k))
    edges = [(u, v) for u, v in pairs if u != v]
    return graph_from(n, edges, directed=False)
