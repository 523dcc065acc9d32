"""Shared fixtures: synthetic face corpora reused across test modules."""

import numpy as np
import pytest

from blendforge.seeding import derive_seed
from blendforge.synthetic import make_face_image, write_fixture_corpus


@pytest.fixture(scope="session")
def corpus128():
    """50 synthetic frames as 10 videos x 5 frames at 128x128."""
    corpus = []
    for v in range(10):
        video_id = f"vid{v:03d}"
        for f in range(5):
            seed = derive_seed(7, f"{video_id}#{f}")
            img, lm = make_face_image(seed, size=128)
            corpus.append((video_id, f, img, lm))
    return corpus


@pytest.fixture(scope="session")
def face96():
    """One small synthetic portrait plus landmarks."""
    return make_face_image(11, size=96)


@pytest.fixture(scope="session")
def fixture_tree(tmp_path_factory):
    """On-disk 10-image corpus (PNG frames, landmarks JSON, manifest)."""
    root = tmp_path_factory.mktemp("fixture_corpus")
    manifest_path, landmarks_path = write_fixture_corpus(
        root, n_videos=10, frames_per_video=1, size=96, seed=21
    )
    return root, manifest_path, landmarks_path


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Print one PASS/FAIL line per acceptance criterion."""
    lines = []
    for outcome in ("passed", "failed", "error"):
        for report in terminalreporter.stats.get(outcome, []):
            nodeid = getattr(report, "nodeid", "")
            if "test_acceptance.py" in nodeid:
                status = "PASS" if outcome == "passed" else "FAIL"
                name = nodeid.split("::")[-1]
                lines.append((name, status))
    if lines:
        terminalreporter.section("acceptance criteria")
        for name, status in sorted(lines):
            terminalreporter.write_line(f"{status}  {name}")
