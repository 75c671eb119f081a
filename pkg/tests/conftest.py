import socket
import subprocess
import sys

import pytest


def free_port() -> int:
    probe = socket.socket()
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def spawn_worker(port, workdir=None):
    cmd = [sys.executable, "-m", "microcas.worker", "--port", str(port)]
    if workdir:
        cmd += ["--workdir", workdir]
    return subprocess.Popen(cmd, stdout=subprocess.DEVNULL)


@pytest.fixture
def worker():
    """A live worker process and its port; killed on teardown if still up."""
    port = free_port()
    proc = spawn_worker(port)
    yield proc, port
    if proc.poll() is None:
        proc.terminate()
        proc.wait(timeout=5)


@pytest.fixture
def client():
    from microcas.client import Client

    c = Client()
    yield c
    try:
        c.stop()
    except Exception:
        if c.conn is not None and c.conn.process is not None:
            c.conn.process.kill()
