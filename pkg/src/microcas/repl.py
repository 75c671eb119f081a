"""Interactive REPL over the client library."""

from __future__ import annotations

import argparse
import sys

from .client import Client
from .errors import CasError, RemoteEvalError

_BANNER = "\x1b[31m"
_RESET = "\x1b[0m"

META_COMMANDS = {
    ":ls": "ls()",
    ":ls all": "ls(true)",
    ":vars": "vars()",
    ":getwd": "getwd()",
}


def run_line(client: Client, line: str, out) -> bool:
    """Process one input line; False means quit. One line, one request."""
    line = line.strip()
    if not line:
        return True
    if line == ":quit":
        return False
    source = META_COMMANDS.get(line, line)
    if source.startswith(":"):
        print(f"{_BANNER}unknown meta-command {source}{_RESET}", file=out)
        return True
    try:
        print(client.eval_raw(source), file=out)
    except RemoteEvalError as exc:
        print(f"{_BANNER}[status {exc.status}] {exc.message}{_RESET}", file=out)
    except CasError as exc:
        print(f"{_BANNER}{exc}{_RESET}", file=out)
        return False
    return True


def run_loop(client: Client, lines, out) -> None:
    for line in lines:
        if not run_line(client, line, out):
            break


def _parse_gateway(text: str):
    host, sep, port = text.rpartition(":")
    if not sep or not port.isdigit():
        raise argparse.ArgumentTypeError(f"bad gateway {text!r}, expected HOST:PORT")
    return host, int(port)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cas-repl",
                                     description="computer algebra REPL")
    parser.add_argument("--host", default=None)
    parser.add_argument("--port", type=int, default=None)
    parser.add_argument("--gateway", type=_parse_gateway, default=None,
                        metavar="H:N")
    parser.add_argument("--local", default=None, metavar="PATH",
                        help="worker binary to spawn locally")
    parser.add_argument("--timeout", type=float, default=10.0, metavar="S")
    args = parser.parse_args(argv)

    client = Client(host=args.host, port=args.port, gateway=args.gateway,
                    local_path=args.local, timeout=args.timeout)
    try:
        client.ensure_connected()
    except CasError as exc:
        print(f"cas-repl: {exc}", file=sys.stderr)
        return 1

    spawned_locally = client.conn is not None and client.conn.process is not None
    try:
        while True:
            try:
                line = input("cas> ")
            except EOFError:
                print()
                break
            if not run_line(client, line, sys.stdout):
                break
    except KeyboardInterrupt:
        print()
    finally:
        # :quit shuts the worker down only when this REPL spawned it
        if spawned_locally:
            client.stop()
        elif client.conn is not None:
            client.conn.disconnect()
    return 0


if __name__ == "__main__":
    sys.exit(main())
