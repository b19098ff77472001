import re

import numpy as np
import pytest

from glintkit import scene

_CRITERION = re.compile(r"test_criterion_(\d+)")


def pytest_terminal_summary(terminalreporter):
    """Print one PASS/FAIL line per acceptance criterion."""
    results = {}
    for outcome in ("passed", "failed", "error"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = _CRITERION.search(getattr(rep, "nodeid", ""))
            if m:
                ok = outcome == "passed" and results.get(m.group(1), True)
                results[m.group(1)] = ok
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        status = "PASS" if results[num] else "FAIL"
        terminalreporter.write_line(f"criterion {num} ... {status}")


@pytest.fixture(scope="session")
def rig():
    return scene.default_rig()


@pytest.fixture(scope="session")
def small_session(rig):
    """10 calib records (5 targets x 2 frames) + 5 test records, one subject."""
    cfg = scene.SceneConfig(seed=13)
    calib, test = scene.generate_session(rig, cfg, 5, 5, subject_id=0)
    return calib, test


@pytest.fixture()
def rng():
    return np.random.default_rng(0)
