"""Client library: connections, eval forms, and kernel wrappers.

A connection speaks the framed request/response protocol with exactly one
outstanding request.  Three evaluation forms are offered: `eval_raw`
(the worker's output text, verbatim), `eval_value` (parsed through the
wire grammar), and `eval_ref` (a lazy `RemoteRef` handle naming the
worker-side binding, nothing parsed).

Every kernel builtin has a wrapper in value form (`client.gb(...)`) and a
deferred form (`client.deferred.gb(...)`) returning a `RemoteRef`.
Wrapper arguments may be local values (serialized on send) or RemoteRefs
(sent by name).
"""

from __future__ import annotations

import os
import shutil
import socket
import subprocess
import sys
import time
from dataclasses import dataclass

from .errors import (
    CasError,
    ConnectionClosedError,
    GatewayError,
    ProtocolError,
    RemoteEvalError,
)
from .poly import Polynomial, to_text
from .session import Response, encode_frame, read_frame, write_shutdown
from .wirefmt import ParseRegistry, default_registry, parse, serialize

RETRY_INTERVAL = 0.1
RETRY_CAP = 10.0
WORKER_ENV_VAR = "CAS_WORKER_BIN"


@dataclass(frozen=True)
class RemoteRef:
    external_string: str
    remote_name: str
    type_tag: str


def _head_tag(text: str) -> str:
    """Type tag of a wire text: the leading NAME of a tagged form, else a scalar kind."""
    stripped = text.lstrip()
    head = ""
    for ch in stripped:
        if ch.isalnum() or ch == "_":
            head += ch
        else:
            break
    if head and len(stripped) > len(head) and stripped[len(head)] == "(":
        return head
    if stripped.startswith('"'):
        return "text"
    if stripped.startswith("["):
        return "list"
    if head in ("true", "false"):
        return "boolean"
    if head == "null":
        return "null"
    if "." in stripped.split(",")[0] or "e" in head:
        return "real"
    if "/" in stripped:
        return "rational"
    return "integer"


def find_worker_command(explicit: str | None = None) -> list:
    """Discovery chain: explicit path, environment variable, search path."""
    if explicit:
        return [explicit]
    env = os.environ.get(WORKER_ENV_VAR)
    if env:
        return [env]
    found = shutil.which("cas-worker")
    if found:
        return [found]
    return [sys.executable, "-m", "microcas.worker"]


def _free_port(host: str = "127.0.0.1") -> int:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.bind((host, 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def _connect_with_retry(host: str, port: int, cap: float) -> socket.socket:
    deadline = time.monotonic() + cap
    while True:
        try:
            return socket.create_connection((host, port), timeout=max(cap, 1.0))
        except OSError as exc:
            if time.monotonic() >= deadline:
                raise ConnectionClosedError(
                    f"could not connect to {host}:{port} within {cap:.0f}s: {exc}") from None
            time.sleep(RETRY_INTERVAL)


class ClientConn:
    """One socket to one worker; strict request/response alternation."""

    def __init__(self, host: str, port: int, timeout: float = RETRY_CAP,
                 process: subprocess.Popen | None = None):
        self.host = host
        self.port = port
        self.process = process
        self._sock = _connect_with_retry(host, port, timeout)
        self._closed = False

    def request(self, source: str) -> Response:
        if self._closed:
            raise ConnectionClosedError("connection already stopped")
        frame = encode_frame(source.encode("utf-8"))
        try:
            self._sock.sendall(frame)
            payload = read_frame(self._sock)
        except OSError as exc:
            self._closed = True
            raise ConnectionClosedError(f"connection lost: {exc}") from None
        if payload is None:
            self._closed = True
            raise ConnectionClosedError("worker closed the connection")
        return Response.decode(payload)

    def stop(self):
        """Send the shutdown frame and close; the worker exits cleanly."""
        if self._closed:
            return
        self._closed = True
        try:
            write_shutdown(self._sock)
        except OSError:
            pass
        self._sock.close()
        if self.process is not None:
            self.process.wait(timeout=10)

    def disconnect(self):
        """Close the socket without asking the worker to exit."""
        if self._closed:
            return
        self._closed = True
        self._sock.close()

    @property
    def closed(self) -> bool:
        return self._closed


def connect(host: str, port: int, timeout: float = RETRY_CAP) -> ClientConn:
    return ClientConn(host, port, timeout)


def connect_via_gateway(host: str, gateway_port: int,
                        timeout: float = RETRY_CAP) -> ClientConn:
    """Ask the gateway for a worker port, then connect to it."""
    sock = _connect_with_retry(host, gateway_port, timeout)
    try:
        line = b""
        while not line.endswith(b"\n"):
            chunk = sock.recv(64)
            if not chunk:
                break
            line += chunk
    finally:
        sock.close()
    reply = line.decode("ascii", "replace").strip()
    if not reply:
        raise GatewayError("gateway sent no reply")
    if not reply.isdigit():
        raise GatewayError(f"gateway refused: {reply}")
    return ClientConn(host, int(reply), timeout)


def start_local(worker_path: str | None = None, timeout: float = RETRY_CAP,
                host: str = "127.0.0.1") -> ClientConn:
    """Spawn a worker on a free port and connect to it."""
    cmd = find_worker_command(worker_path)
    port = _free_port(host)
    try:
        process = subprocess.Popen(cmd + ["--port", str(port)],
                                   stdout=subprocess.DEVNULL)
    except OSError as exc:
        raise CasError(f"cannot spawn worker {cmd!r}: {exc}") from None
    try:
        return ClientConn(host, port, timeout, process=process)
    except CasError:
        process.terminate()
        process.wait()
        raise


class _Deferred:
    """Namespace exposing every wrapper in reference (lazy) form."""

    def __init__(self, client: "Client"):
        self._client = client

    def __getattr__(self, name):
        value_form = getattr(type(self._client), name, None)
        if value_form is None or name.startswith("_"):
            raise AttributeError(name)

        def deferred(*args, **kwargs):
            return value_form(self._client, *args, _deferred=True, **kwargs)

        return deferred


class Client:
    """High-level handle bundling a connection, a parser registry and wrappers.

    Construct with an explicit endpoint, or leave everything unset and the
    first call will start a local worker (falling back to the configured
    gateway when no local worker binary can be found).
    """

    def __init__(self, host: str | None = None, port: int | None = None,
                 gateway: tuple | None = None, local_path: str | None = None,
                 timeout: float = RETRY_CAP,
                 registry: ParseRegistry | None = None):
        self.host = host
        self.port = port
        self.gateway = gateway
        self.local_path = local_path
        self.timeout = timeout
        self.registry = registry or default_registry()
        self.conn: ClientConn | None = None
        self._history = 0
        self.deferred = _Deferred(self)

    # -- connection management ----------------------------------------------

    def ensure_connected(self) -> ClientConn:
        if self.conn is not None and not self.conn.closed:
            return self.conn
        if self.conn is not None:
            raise ConnectionClosedError("connection already stopped")
        if self.port is not None:
            self.conn = connect(self.host or "127.0.0.1", self.port, self.timeout)
        elif self.host is None and self.gateway is None:
            self.conn = start_local(self.local_path, self.timeout)
        else:
            self.conn = self._auto_start()
        return self.conn

    def _auto_start(self):
        try:
            return start_local(self.local_path, self.timeout)
        except CasError:
            if self.gateway is not None:
                ghost, gport = self.gateway
                return connect_via_gateway(ghost, gport, self.timeout)
            raise

    def stop(self):
        if self.conn is not None:
            self.conn.stop()

    # -- evaluation forms ------------------------------------------------------

    def _request(self, source: str) -> Response:
        conn = self.ensure_connected()
        response = conn.request(source)
        if response.status == 0:
            self._history += 1
        return response

    def eval_raw(self, source: str) -> str:
        response = self._request(source)
        if response.status != 0:
            raise RemoteEvalError(response.status, "\n".join(response.lines))
        return "\n".join(response.lines)

    def eval_value(self, source: str):
        return parse(self.eval_raw(source), self.registry)

    def eval_ref(self, source: str) -> RemoteRef:
        text = self.eval_raw(source)
        return RemoteRef(external_string=text,
                         remote_name=f"o{self._history}",
                         type_tag=_head_tag(text))

    # -- session builtins ----------------------------------------------------

    def remote_ls(self, all_names: bool = False) -> list:
        return self.eval_value("ls(true)" if all_names else "ls()")

    def remote_exists(self, names) -> list:
        return self.eval_value(f"exists({serialize(list(names))})")

    def remote_getwd(self) -> str:
        return self.eval_value("getwd()")

    # -- argument encoding ------------------------------------------------------

    @staticmethod
    def _arg(value) -> str:
        if isinstance(value, RemoteRef):
            return value.remote_name
        if isinstance(value, str):
            return value  # raw command fragment (polynomial text, name)
        if isinstance(value, Polynomial):
            return to_text(value)  # bare expression, scoped by the call
        return serialize(value)

    def _poly_args(self, gens) -> str:
        return "[" + ",".join(self._arg(g) for g in gens) + "]"

    def _call(self, text: str, deferred: bool):
        if deferred:
            return self.eval_ref(text)
        return self.eval_value(text)

    # -- kernel wrappers ---------------------------------------------------------

    def ring_make(self, variables, coefring: str = "QQ", order: str = "grevlex",
                  *, _deferred: bool = False):
        if coefring.startswith("Zp(") or coefring == "QQ" or coefring == "ZZ":
            field = coefring
        elif coefring.isdigit():
            field = f"Zp({coefring})"
        else:
            raise ValueError(f"unknown coefficient tag {coefring!r}")
        text = f"ring({field},[{','.join(variables)}],{order})"
        return self._call(text, _deferred)

    def ideal_make(self, ring, gens, *, _deferred: bool = False):
        return self._call(f"ideal({self._arg(ring)},{self._poly_args(gens)})", _deferred)

    def gb(self, ideal, *, _deferred: bool = False):
        return self._call(f"gb({self._arg(ideal)})", _deferred)

    def radical(self, ideal, *, _deferred: bool = False):
        return self._call(f"radical({self._arg(ideal)})", _deferred)

    def saturate(self, ideal, by, *, _deferred: bool = False):
        return self._call(f"saturate({self._arg(ideal)},{self._arg(by)})", _deferred)

    def quotient(self, ideal, by, *, _deferred: bool = False):
        return self._call(f"quotient({self._arg(ideal)},{self._arg(by)})", _deferred)

    def dimension(self, ideal, *, _deferred: bool = False):
        return self._call(f"dimension({self._arg(ideal)})", _deferred)

    def primary_decomposition(self, ideal, *, _deferred: bool = False):
        return self._call(f"primaryDecomposition({self._arg(ideal)})", _deferred)

    def eliminate(self, ideal, names, *, _deferred: bool = False):
        inner = ",".join(names)
        return self._call(f"eliminate({self._arg(ideal)},[{inner}])", _deferred)

    def member(self, f, ideal, *, _deferred: bool = False):
        return self._call(f"member({self._arg(f)},{self._arg(ideal)})", _deferred)

    def snf(self, matrix, *, _deferred: bool = False):
        return self._call(f"snf({self._arg(matrix)})", _deferred)

    def factor_n(self, n: int, *, _deferred: bool = False):
        return self._call(f"factorn({n})", _deferred)

    def solve(self, ideal, tol: float | None = None, *, _deferred: bool = False):
        if tol is None:
            return self._call(f"solve({self._arg(ideal)})", _deferred)
        return self._call(f"solve({self._arg(ideal)},{tol!r})", _deferred)

    def use_ring(self, ring, *, _deferred: bool = False):
        text = f"use {self._arg(ring)}"
        if _deferred:
            return self.eval_ref(text)
        return self.eval_value(text)
