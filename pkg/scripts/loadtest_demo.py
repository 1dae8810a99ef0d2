#!/usr/bin/env python3
"""Boot the recommendation service in-process and load-test it.

Builds the built-in synthetic workloads (a 5-node linear workflow and a
25-node branching one, in both index modes), starts the HTTP service on
a free port in a background thread, fires the load test against it, and
prints the latency statistics.

    python3 scripts/loadtest_demo.py                 # quick: 10 users, 500 requests
    python3 scripts/loadtest_demo.py --full          # 100 users, 10000 requests
"""

import argparse
import socket
import sys
import threading
import time

import uvicorn

from procomplete import (
    HashEmbedder,
    MODES,
    build_index,
    load_test,
    workload_corpus,
)
from procomplete.service import create_app


def free_port() -> int:
    with socket.socket() as sock:
        sock.bind(("127.0.0.1", 0))
        return sock.getsockname()[1]


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--users", type=int, default=10, help="concurrent simulated users")
    parser.add_argument("--requests", type=int, default=500, help="total requests")
    parser.add_argument("--full", action="store_true",
                        help="run the full profile: 100 users, 10000 requests")
    parser.add_argument("--dimension", type=int, default=512, help="embedding dimension")
    parser.add_argument("--seed", type=int, default=0, help="random seed")
    args = parser.parse_args(argv)

    users = 100 if args.full else args.users
    total = 10_000 if args.full else args.requests

    provider = HashEmbedder(dimension=args.dimension)
    corpus = workload_corpus()
    indexes = {
        mode: build_index(corpus, slice_length=3, provider=provider, mode=mode)
        for mode in sorted(MODES)
    }
    app = create_app(indexes, provider)

    port = free_port()
    config = uvicorn.Config(app, host="127.0.0.1", port=port,
                            log_level="warning", access_log=False)
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10.0
    while not server.started:
        if time.time() > deadline:
            print("error: service did not start", file=sys.stderr)
            return 1
        time.sleep(0.01)

    url = f"http://127.0.0.1:{port}"
    print(f"service up at {url}; sending {total} requests from {users} users...")
    result = load_test(url, users=users, total_requests=total,
                       think_time=None, seed=args.seed)

    server.should_exit = True
    thread.join(timeout=5.0)

    print(f"requests:     {result.requests}")
    print(f"failures:     {result.failure_rate:.4%}")
    print(f"duration:     {result.duration_s:.2f}s ({result.avg_rps:.0f} req/s)")
    print(f"latency avg:  {result.response.avg_ms:.2f} ms")
    print(f"latency min:  {result.response.min_ms:.2f} ms")
    print(f"latency p90:  {result.response.p90_ms:.2f} ms")
    print(f"latency max:  {result.response.max_ms:.2f} ms")
    return 0


if __name__ == "__main__":
    sys.exit(main())
