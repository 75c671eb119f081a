"""Worker process entry point: host one session on a TCP port."""

import argparse
import sys

from .session import serve


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="cas-worker",
                                     description="single-session evaluation worker")
    parser.add_argument("--port", type=int, required=True)
    parser.add_argument("--workdir", default=None)
    parser.add_argument("--host", default="127.0.0.1")
    args = parser.parse_args(argv)
    try:
        return serve(args.port, workdir=args.workdir, host=args.host)
    except OSError as exc:
        print(f"cas-worker: cannot serve on port {args.port}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
