from __future__ import annotations

import socket
import subprocess
import sys
import time

import pytest

from rslice.analysis import analyze
from rslice.source import SourceText

WALKTHROUGH = '''library(ggplot2)

data <- read.csv("/data/data.csv")
min_age <- 42
by_age <- data |>
    dplyr::filter(age >= min_age)

ggplot(by_age, aes(x=age, y=m)) +
    geom_count()
'''


@pytest.fixture(scope="session")
def walkthrough_source() -> SourceText:
    return SourceText(WALKTHROUGH, "walkthrough.R")


@pytest.fixture(scope="session")
def walkthrough(walkthrough_source):
    return analyze(walkthrough_source)


def free_port() -> int:
    with socket.socket() as probe:
        probe.bind(("127.0.0.1", 0))
        return probe.getsockname()[1]


def wait_for_port(port: int, timeout: float = 10.0) -> None:
    deadline = time.time() + timeout
    while time.time() < deadline:
        try:
            with socket.create_connection(("127.0.0.1", port), timeout=0.5):
                return
        except OSError:
            time.sleep(0.05)
    raise RuntimeError(f"server did not come up on port {port}")


def _spawn_server(extra: list[str]):
    port = free_port()
    process = subprocess.Popen(
        [sys.executable, "-m", "rslice.cli", "--server", "--port", str(port), *extra],
        stdout=subprocess.DEVNULL,
        stderr=subprocess.DEVNULL,
    )
    return port, process


@pytest.fixture(scope="session")
def live_server():
    port, process = _spawn_server([])
    try:
        wait_for_port(port)
        yield port
    finally:
        process.terminate()
        process.wait(timeout=5)


@pytest.fixture(scope="session")
def live_ws_server():
    port, process = _spawn_server(["--ws"])
    try:
        wait_for_port(port)
        yield port
    finally:
        process.terminate()
        process.wait(timeout=5)
