"""Shared fixtures and the acceptance verdict summary.

test_acceptance records one verdict per criterion through the
``acceptance`` fixture; a terminal-summary hook prints the collected
PASS/FAIL/SKIP lines at the end of every run so the gate is visible
without -s.
"""

import contextlib

import pytest
from hypothesis import settings

from hmlfc.container import EncodeParams, encode_light_field
from hmlfc.harness import SyntheticScene, generate_synthetic

# shared-host timing is noisy; example counts stay the default
settings.register_profile("ci", deadline=None)
settings.load_profile("ci")

_VERDICTS = []


class _Criterion:
    def __init__(self, name: str):
        self.name = name
        self.note = ""


class AcceptanceLog:
    """``with acceptance("criterion name") as c: ... c.note = "detail"``.

    A clean exit records PASS, pytest.skip records SKIP, anything else
    records FAIL with the first line of the exception.
    """

    @contextlib.contextmanager
    def __call__(self, name: str):
        crit = _Criterion(name)
        try:
            yield crit
        except BaseException as exc:
            if isinstance(exc, pytest.skip.Exception):
                _VERDICTS.append((name, "SKIP", str(exc).splitlines()[0]))
            else:
                msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
                _VERDICTS.append((name, "FAIL", msg))
            print(f"acceptance {_VERDICTS[-1][1]}: {name}")
            raise
        _VERDICTS.append((name, "PASS", crit.note))
        print(f"acceptance PASS: {name}" + (f" ({crit.note})" if crit.note else ""))


@pytest.fixture(scope="session")
def acceptance():
    return AcceptanceLog()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, verdict, note in _VERDICTS:
        line = f"{verdict:4s} {name}"
        if note:
            line += f"  [{note}]"
        terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def parallax_field():
    """3x3 views, 64x64, textured quads drifting over a shared background."""
    scene = SyntheticScene(kind="quads", grid_s=3, grid_t=3, width=64, height=64,
                           seed=9, background_disparity=(1.0, 1.0))
    return generate_synthetic(scene)


@pytest.fixture(scope="session")
def lossless_stream(parallax_field):
    params = EncodeParams(tree_height=1, block_size=8, window=4,
                          tau_ref=0, tau_res=0)
    return encode_light_field(parallax_field, params)


@pytest.fixture(scope="session")
def stream_file(lossless_stream, tmp_path_factory):
    p = tmp_path_factory.mktemp("stream") / "scene.hmlfc"
    p.write_bytes(lossless_stream)
    return p
