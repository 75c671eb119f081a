"""Port-dispatch gateway: one worker process per client.

The gateway listens on a static port.  Each client that connects gets the
lowest free port from the configured range, a freshly spawned worker on
that port, and a newline-terminated ASCII reply carrying the port number
(`ERR <reason>` lines report failure; ports are all-digit, so the two are
distinguishable).  The gateway then closes that connection and resumes
listening.

Workers are reaped when their process exits.  A worker that nobody
connected to within the idle timeout is shut down through its own
protocol (connect + zero-length frame), which lets it exit cleanly.
"""

from __future__ import annotations

import argparse
import signal
import socket
import subprocess
import sys
import threading
import time
from dataclasses import dataclass, field

from .session import write_shutdown

STATE_STARTING = "starting"
STATE_SERVING = "serving"
STATE_EXITED = "exited"

_REAP_INTERVAL = 0.2


@dataclass
class WorkerRecord:
    port: int
    process: subprocess.Popen
    started_at: float
    state: str = STATE_STARTING


@dataclass
class Gateway:
    port: int
    port_range: range
    idle_timeout: float
    worker_cmd: list
    host: str = "127.0.0.1"
    workers: dict = field(default_factory=dict)

    def __post_init__(self):
        self._lock = threading.Lock()
        self._stop = threading.Event()
        self._stopped = threading.Event()
        self.ready = threading.Event()

    # -- lifecycle -----------------------------------------------------------

    def serve_forever(self):
        # the accepting thread owns the listener for its whole lifetime;
        # closing it from another thread would race fd reuse under accept()
        listener = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
        listener.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        listener.bind((self.host, self.port))
        listener.listen()
        listener.settimeout(0.25)
        self.ready.set()
        reaper = threading.Thread(target=self._reap_loop, daemon=True)
        reaper.start()
        try:
            while not self._stop.is_set():
                try:
                    conn, _ = listener.accept()
                except TimeoutError:
                    continue
                except OSError:
                    break
                threading.Thread(target=self._handshake, args=(conn,), daemon=True).start()
        finally:
            listener.close()
            self._terminate_workers()
            self._stopped.set()

    def shutdown(self):
        """Stop accepting and reap every worker; safe to call repeatedly."""
        self._stop.set()
        if self.ready.is_set():
            self._stopped.wait(timeout=5)
        else:
            self._terminate_workers()
            self._stopped.set()

    def _terminate_workers(self):
        with self._lock:
            records = list(self.workers.values())
            self.workers.clear()
        for rec in records:
            if rec.process.poll() is None:
                rec.process.terminate()
            try:
                rec.process.wait(timeout=5)
            except subprocess.TimeoutExpired:
                rec.process.kill()
                rec.process.wait()

    # -- handshake -------------------------------------------------------------

    def _handshake(self, conn: socket.socket):
        with conn:
            try:
                reply = self._allocate()
            except OSError:
                reply = "ERR spawn"
            try:
                conn.sendall((reply + "\n").encode("ascii"))
            except OSError:
                pass

    def _allocate(self) -> str:
        with self._lock:
            port = next((p for p in self.port_range if p not in self.workers), None)
            if port is None:
                return "ERR no-ports"
            try:
                process = subprocess.Popen(
                    self.worker_cmd + ["--port", str(port)],
                    stdout=subprocess.DEVNULL,
                )
            except OSError:
                return "ERR spawn"
            self.workers[port] = WorkerRecord(port, process, time.monotonic())
            return str(port)

    # -- reaping ----------------------------------------------------------------

    def _reap_loop(self):
        while not self._stop.wait(_REAP_INTERVAL):
            now = time.monotonic()
            with self._lock:
                records = list(self.workers.values())
            for rec in records:
                if rec.process.poll() is not None:
                    rec.state = STATE_EXITED
                    rec.process.wait()
                    with self._lock:
                        self.workers.pop(rec.port, None)
                elif rec.state == STATE_STARTING and now - rec.started_at > self.idle_timeout:
                    self._probe(rec)

    def _probe(self, rec: WorkerRecord):
        """Decide whether an aging worker ever got its client.

        The worker accepts exactly one connection and closes its listener
        afterwards, so a refused probe means a client is (or was) attached;
        an accepted probe means the worker sat idle, and the probe itself
        shuts it down cleanly with the zero-length frame.
        """
        try:
            probe = socket.create_connection((self.host, rec.port), timeout=0.5)
        except OSError:
            rec.state = STATE_SERVING
            return
        with probe:
            try:
                write_shutdown(probe)
            except OSError:
                pass
        rec.state = STATE_EXITED


def parse_port_range(text: str) -> range:
    low, sep, high = text.partition("-")
    if not sep or not low.isdigit() or not high.isdigit() or int(low) > int(high):
        raise argparse.ArgumentTypeError(f"bad port range {text!r}, expected A-B")
    return range(int(low), int(high) + 1)


def default_worker_command(explicit: str | None = None) -> list:
    """Worker launch command: explicit path, env override, PATH, then -m."""
    import os
    import shutil

    if explicit:
        return [explicit]
    env = os.environ.get("CAS_WORKER_BIN")
    if env:
        return [env]
    found = shutil.which("cas-worker")
    if found:
        return [found]
    return [sys.executable, "-m", "microcas.worker"]


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cas-gateway",
                                     description="per-client worker dispatch server")
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--worker-ports", type=parse_port_range, required=True,
                        metavar="A-B")
    parser.add_argument("--idle-timeout", type=float, default=30.0, metavar="SECONDS")
    parser.add_argument("--worker-bin", default=None, metavar="PATH")
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)

    gateway = Gateway(
        port=args.port,
        port_range=args.worker_ports,
        idle_timeout=args.idle_timeout,
        worker_cmd=default_worker_command(args.worker_bin),
        host=args.host,
    )
    for sig in (signal.SIGINT, signal.SIGTERM):
        signal.signal(sig, lambda *_: gateway.shutdown())
    try:
        gateway.serve_forever()
    except OSError as exc:
        print(f"cas-gateway: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
