import json
import subprocess
import sys

import pytest

from lab_paths import FIXTURE_DIR


@pytest.fixture()
def spawn_mock():
    """Boot the primary package's mock-controller subcommand on an
    ephemeral port and hand back its base URL. Subprocess only: the
    harness talks to the primary exclusively over its CLI and HTTP."""
    procs = []

    def _spawn(fixture_dir) -> str:
        proc = subprocess.Popen(
            [
                sys.executable, "-m", "rlpathctl.cli", "mock",
                "--fixture", str(fixture_dir), "--bind", "127.0.0.1:0",
            ],
            stdout=subprocess.PIPE,
            stderr=subprocess.PIPE,
            text=True,
        )
        procs.append(proc)
        line = proc.stdout.readline().strip()
        assert line.startswith("mock controller listening on "), line
        return line.rsplit(" ", 1)[-1]

    yield _spawn
    for proc in procs:
        proc.terminate()
        proc.wait(timeout=10)


@pytest.fixture()
def reduced_fixture(tmp_path):
    """Copy of the canonical fixture with its last link record removed;
    returns (directory, the dropped raw record)."""
    links = json.loads((FIXTURE_DIR / "two-branch.links.json").read_text())
    dropped = links.pop()
    fdir = tmp_path / "reduced"
    fdir.mkdir()
    (fdir / "reduced.links.json").write_text(json.dumps(links))
    (fdir / "reduced.devices.json").write_text(
        (FIXTURE_DIR / "two-branch.devices.json").read_text()
    )
    return fdir, dropped
