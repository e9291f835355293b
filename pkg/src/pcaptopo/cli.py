"""Headless command-line access to the full pipeline.

Parse a capture (or fall back to the built-in demo), apply a display filter,
and emit topology JSON, a legend table, packet summaries, or capture stats;
`--serve` launches the HTTP API instead. Exit codes: 0 success, 1 input or
filter errors, 2 usage errors.
"""

from __future__ import annotations

import argparse
import os
import sys
from pathlib import Path

from .capture import CaptureError
from .filters import ParseError
from .session import Session
from .topology import to_json_bytes

MODES = ("topology-json", "legend-table", "packets-table", "stats")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcaptopo",
        description="Topology-first packet capture explorer (PCAP/PCAPNG).",
    )
    parser.add_argument("capture", nargs="?", help="capture file; built-in demo when omitted")
    parser.add_argument("--filter", default="", metavar="TEXT", help="display filter expression")
    parser.add_argument("--mode", choices=MODES, default=None,
                        help="output mode (default: topology-json)")
    parser.add_argument("--limit", type=int, default=100, metavar="N",
                        help="max packets for packets-table (default: 100)")
    parser.add_argument("--serve", action="store_true", help="run the HTTP API and UI")
    parser.add_argument("--port", type=int, default=None, metavar="N",
                        help="port for --serve (default: $PCAPTOPO_PORT or 8460)")
    parser.add_argument("--ui-dir", default=None, metavar="DIR",
                        help="static UI bundle directory for --serve")
    return parser


def _build_session(args, stderr) -> Session | None:
    if args.capture is None:
        session = Session()
    else:
        try:
            data = Path(args.capture).read_bytes()
        except OSError as err:
            print(f"error: cannot read {args.capture}: {err.strerror or err}", file=stderr)
            return None
        session = Session(with_demo=False)
        session.load_capture_sync(data)
    if args.filter:
        session.set_filter(args.filter)
    return session


def _render_legend_table(session: Session, out) -> None:
    for entry in session.snapshot().topology.legend:
        print(f"{entry.label:<16} {entry.packet_count:>8}", file=out)


def _render_packets_table(session: Session, limit: int, out) -> None:
    page = session.packet_page(0, max(1, min(limit, 1000)))
    header = f"{'No.':>6} {'Time':>12} {'Source':<22} {'Destination':<22} {'Protocol':<10} {'Length':>6} Info"
    print(header, file=out)
    for row in page["rows"]:
        print(
            f"{row['number']:>6} {row['time']:>12} {row['src']:<22} {row['dst']:<22} "
            f"{row['protocol']:<10} {row['length']:>6} {row['info']}",
            file=out,
        )
    print(f"({len(page['rows'])} of {page['total_filtered']} filtered packets)", file=out)


def _render_stats(session: Session, out) -> None:
    snap = session.snapshot()
    raw = snap.raw
    graph = snap.topology
    print(f"format: {raw.format.kind.value if raw else 'none'}", file=out)
    print(f"packets: {len(snap.packets or ())}", file=out)
    print(f"filtered: {len(snap.filtered_indices)}", file=out)
    print(f"hosts: {graph.total_hosts_before_cap}", file=out)
    print(f"conversations: {len(graph.edges)}", file=out)
    print(f"protocols: {len(graph.legend)}", file=out)
    print(f"truncated_at_safeguard: {str(bool(raw and raw.truncated_at_safeguard)).lower()}", file=out)
    if snap.packets:
        span_ns = snap.packets[-1].ts_ns - snap.packets[0].ts_ns
        print(f"duration_seconds: {span_ns / 1e9:.6f}", file=out)


def run(argv: list[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout if stdout is not None else sys.stdout
    stderr = stderr if stderr is not None else sys.stderr
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.serve and args.mode is not None:
        parser.error("--serve cannot be combined with --mode")
    mode = args.mode or "topology-json"

    try:
        session = _build_session(args, stderr)
    except CaptureError as err:
        print(f"error: {err}", file=stderr)
        return 1
    except ParseError as err:
        print(f"filter error: {err}", file=stderr)
        return 1
    if session is None:
        return 1

    if args.serve:
        from .service import serve

        port = args.port if args.port is not None else int(os.environ.get("PCAPTOPO_PORT", 8460))
        print(f"serving on http://127.0.0.1:{port}", file=stderr)
        serve(session, port=port, ui_dir=args.ui_dir)
        return 0

    if mode == "topology-json":
        stdout.write(to_json_bytes(session.topology_payload()).decode("utf-8") + "\n")
    elif mode == "legend-table":
        _render_legend_table(session, stdout)
    elif mode == "packets-table":
        _render_packets_table(session, args.limit, stdout)
    else:
        _render_stats(session, stdout)
    return 0


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
