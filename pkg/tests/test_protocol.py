"""Worker and gateway integration over real sockets and processes."""

import socket
import struct
import subprocess
import sys
import threading
import time

import pytest

from microcas.client import _connect_with_retry
from microcas.gateway import Gateway, default_worker_command, parse_port_range
from microcas.session import Response, encode_frame, read_frame, write_shutdown

from conftest import free_port, spawn_worker


def roundtrip(sock, source: str) -> Response:
    sock.sendall(encode_frame(source.encode("utf-8")))
    payload = read_frame(sock)
    assert payload is not None
    return Response.decode(payload)


class TestWorker:
    def test_basic_transcript(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
            assert roundtrip(sock, "1 + 1") == Response(0, ("2",))
            assert roundtrip(sock, "a = 1").lines == ("1",)
            assert roundtrip(sock, "a").lines == ("1",)
            assert roundtrip(sock, "ls()").lines == ('["a"]',)
            assert roundtrip(sock, 'exists(["a","b"])').lines == ("[true,false]",)
            write_shutdown(sock)
        assert proc.wait(timeout=10) == 0

    def test_shutdown_leaves_no_listener(self, worker):
        proc, port = worker
        sock = _connect_with_retry("127.0.0.1", port, 10.0)
        write_shutdown(sock)
        sock.close()
        assert proc.wait(timeout=10) == 0
        with pytest.raises(OSError):
            socket.create_connection(("127.0.0.1", port), timeout=0.5)

    def test_eof_also_shuts_down(self, worker):
        proc, port = worker
        sock = _connect_with_retry("127.0.0.1", port, 10.0)
        sock.close()  # abrupt EOF, no zero frame
        assert proc.wait(timeout=10) == 0

    def test_malformed_frame_then_continue(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
            bad = b"\xff\xfe\xfd"
            sock.sendall(struct.pack(">I", len(bad)) + bad)
            response = Response.decode(read_frame(sock))
            assert response.status == 3
            # the stream stays in sync afterwards
            assert roundtrip(sock, "2 + 2").lines == ("4",)
            write_shutdown(sock)
        assert proc.wait(timeout=10) == 0

    def test_second_connection_refused(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as first:
            roundtrip(first, "1")
            with pytest.raises(OSError):
                socket.create_connection(("127.0.0.1", port), timeout=0.5)
            write_shutdown(first)
        proc.wait(timeout=10)

    def test_error_statuses_on_the_wire(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
            assert roundtrip(sock, "u + 1").status == 1
            assert roundtrip(sock, "nonsense(").status == 2
            write_shutdown(sock)
        proc.wait(timeout=10)

    def test_persistence_across_many_statements(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
            for i in range(20):
                assert roundtrip(sock, f"v{i} = {i}").status == 0
            for i in range(20):
                assert roundtrip(sock, f"v{i}").lines == (str(i),)
            assert roundtrip(sock, "o1").lines == ("0",)
            write_shutdown(sock)
        proc.wait(timeout=10)

    def test_pipelined_frames_stay_in_sync(self, worker):
        proc, port = worker
        with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
            # several requests written before any response is read
            for source in ["1", "2 + 2", "a = 9", "a"]:
                sock.sendall(encode_frame(source.encode()))
            answers = [Response.decode(read_frame(sock)).lines for _ in range(4)]
            assert answers == [("1",), ("4",), ("9",), ("9",)]
            write_shutdown(sock)
        assert proc.wait(timeout=10) == 0

    def test_bind_failure_exits_nonzero(self):
        port = free_port()
        blocker = socket.socket()
        blocker.setsockopt(socket.SOL_SOCKET, socket.SO_REUSEADDR, 1)
        blocker.bind(("127.0.0.1", port))
        blocker.listen(1)
        try:
            proc = subprocess.Popen(
                [sys.executable, "-m", "microcas.worker", "--port", str(port)],
                stdout=subprocess.DEVNULL, stderr=subprocess.DEVNULL)
            assert proc.wait(timeout=10) != 0
        finally:
            blocker.close()

    def test_workdir_flag(self, tmp_path):
        port = free_port()
        proc = spawn_worker(port, workdir=str(tmp_path))
        try:
            with _connect_with_retry("127.0.0.1", port, 10.0) as sock:
                response = roundtrip(sock, "getwd()")
                assert response.lines[0].strip('"') == str(tmp_path)
                write_shutdown(sock)
            assert proc.wait(timeout=10) == 0
        finally:
            if proc.poll() is None:
                proc.kill()


def start_gateway(port_range, idle_timeout=8.0):
    port = free_port()
    gw = Gateway(port=port, port_range=port_range, idle_timeout=idle_timeout,
                 worker_cmd=default_worker_command())
    thread = threading.Thread(target=gw.serve_forever, daemon=True)
    thread.start()
    assert gw.ready.wait(5)
    return gw, port


@pytest.fixture
def gateway():
    gw, port = start_gateway(range(42000, 42050))
    yield gw, port
    gw.shutdown()


def ask_gateway(port: int) -> str:
    with socket.create_connection(("127.0.0.1", port), timeout=5) as sock:
        line = b""
        while not line.endswith(b"\n"):
            chunk = sock.recv(64)
            if not chunk:
                break
            line += chunk
    return line.decode().strip()


class TestGateway:
    def test_lowest_free_allocation(self, gateway):
        gw, port = gateway
        reply = ask_gateway(port)
        assert reply == "42000"
        with _connect_with_retry("127.0.0.1", 42000, 10.0) as sock:
            assert roundtrip(sock, "1 + 1").lines == ("2",)
            write_shutdown(sock)

    def test_two_concurrent_clients(self, gateway):
        gw, port = gateway
        replies = [ask_gateway(port), ask_gateway(port)]
        ports = sorted(int(r) for r in replies)
        assert len(set(ports)) == 2
        socks = [_connect_with_retry("127.0.0.1", p, 10.0) for p in ports]
        try:
            for sock in socks:
                assert roundtrip(sock, "1 + 1").lines == ("2",)
        finally:
            for sock in socks:
                write_shutdown(sock)
                sock.close()

    def test_port_reuse_after_shutdown(self):
        gw, port = start_gateway(range(42100, 42101))
        try:
            first = ask_gateway(port)
            assert first == "42100"
            with _connect_with_retry("127.0.0.1", 42100, 10.0) as sock:
                roundtrip(sock, "1")
                write_shutdown(sock)
            # range is exhausted until the worker exit is reaped
            deadline = time.monotonic() + 8
            reply = "ERR no-ports"
            while time.monotonic() < deadline and not reply.isdigit():
                time.sleep(0.1)
                reply = ask_gateway(port)
            assert reply == "42100"
            with _connect_with_retry("127.0.0.1", 42100, 10.0) as sock:
                assert roundtrip(sock, "3 + 4").lines == ("7",)
                write_shutdown(sock)
        finally:
            gw.shutdown()

    def test_range_exhaustion_error_line(self):
        gw, port = start_gateway(range(42200, 42201), idle_timeout=30.0)
        try:
            assert ask_gateway(port) == "42200"
            assert ask_gateway(port) == "ERR no-ports"
        finally:
            gw.shutdown()

    def test_idle_worker_reaped(self):
        gw, port = start_gateway(range(42300, 42301), idle_timeout=0.5)
        try:
            assert ask_gateway(port) == "42300"
            # nobody connects; the reaper should free the port
            deadline = time.monotonic() + 8
            reply = "ERR no-ports"
            while time.monotonic() < deadline and not reply.isdigit():
                time.sleep(0.2)
                reply = ask_gateway(port)
            assert reply == "42300"
        finally:
            gw.shutdown()

    def test_spawn_failure_error_line(self):
        port = free_port()
        gw = Gateway(port=port, port_range=range(42600, 42610), idle_timeout=8.0,
                     worker_cmd=["/definitely/not/a/worker"])
        thread = threading.Thread(target=gw.serve_forever, daemon=True)
        thread.start()
        assert gw.ready.wait(5)
        try:
            assert ask_gateway(port) == "ERR spawn"
        finally:
            gw.shutdown()

    def test_parse_port_range(self):
        assert parse_port_range("40000-40100") == range(40000, 40101)
        import argparse
        with pytest.raises(argparse.ArgumentTypeError):
            parse_port_range("oops")
