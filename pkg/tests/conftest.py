from __future__ import annotations

import sys
from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = ROOT / "scenarios"
GOLDEN = Path(__file__).resolve().parent / "golden"

sys.path.insert(0, str(ROOT / "src"))

from penvelope.corpus import random_corpus  # noqa: E402
from penvelope.exactlin import GaussianRational  # noqa: E402

settings.register_profile(
    "repo", derandomize=True, deadline=None, max_examples=60,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("repo")


def small_gq(bound: int = 4):
    """Gaussian rationals with small numerators and denominators."""
    part = st.fractions(min_value=-bound, max_value=bound, max_denominator=4)
    return st.builds(GaussianRational, part, part)


def vectors(n: int, bound: int = 3):
    return st.lists(small_gq(bound), min_size=n, max_size=n).map(tuple)


@pytest.fixture(scope="session")
def corpus():
    return random_corpus()


@pytest.fixture(scope="session")
def corpus_decisions(corpus):
    from penvelope.envelope import decide_envelope

    return [decide_envelope(case.alpha) for case in corpus]


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not getattr(mod, "RESULTS", None):
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[n])
