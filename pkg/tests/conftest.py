import shlex
import sys
from pathlib import Path

import pytest

HERE = Path(__file__).parent


def external_command(engine: str = "cadical153") -> str:
    return f"{shlex.quote(sys.executable)} {shlex.quote(str(HERE / 'pysat_solver.py'))} {{file}} {engine}"


@pytest.fixture
def external_cmd():
    pytest.importorskip("pysat")
    return external_command()


@pytest.fixture(autouse=True)
def _isolated_cache(tmp_path, monkeypatch):
    monkeypatch.setenv("GRAHAM_BOUNDS_CACHE", str(tmp_path / "cache"))
