"""The single shared analytic state: capture, filter, and derived views.

All views (topology, legend, packet list, CLI output) are projections of one
immutable snapshot identified by a monotonically increasing generation.
Mutations (loading a capture, changing the filter) swap the snapshot
atomically; a chunked background load publishes only at completion and can
be cancelled by a newer load.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from .capture import CaptureError, FormatError, RawCapture, detect_format, parse_capture
from .demo import generate_demo
from .dissect import DissectedPacket, dissect_all
from .filters import MATCH_ALL, FilterExpr, apply_filter, parse_filter
from .topology import (
    TopologyGraph,
    build_topology,
    conversation_detail,
    lookup_host,
    topology_to_dict,
)

MAX_UPLOAD_BYTES = 500 * 1024 * 1024
MAX_PAGE_SIZE = 1000


@dataclass(frozen=True)
class Snapshot:
    """One consistent (capture, filter, derived views) state; never mutated."""

    generation: int
    raw: RawCapture | None
    packets: list[DissectedPacket] | None
    filter_text: str
    filter_expr: FilterExpr
    filtered_indices: list[int]
    topology: TopologyGraph
    source: str  # "none" | "demo" | "upload"


class LoadJob:
    """Handle for one background parse+dissect run."""

    def __init__(self):
        self.cancel_event = threading.Event()
        self.done = threading.Event()
        self.progress = 0.0
        self.error: CaptureError | None = None
        self.thread: threading.Thread | None = None

    def cancel(self) -> None:
        self.cancel_event.set()

    def wait(self, timeout: float | None = None) -> bool:
        return self.done.wait(timeout)


def _empty_topology() -> TopologyGraph:
    return TopologyGraph([], [], 0, [])


class Session:
    """Owns the shared state; one writer at a time, lock-free consistent reads."""

    def __init__(self, *, with_demo: bool = True):
        self._lock = threading.RLock()
        self._job: LoadJob | None = None
        self._last_error: CaptureError | None = None
        self._snapshot = Snapshot(0, None, None, "", MATCH_ALL, [], _empty_topology(), "none")
        if with_demo:
            raw = parse_capture(generate_demo())
            packets = dissect_all(raw)
            self._snapshot = self._derive(raw, packets, "", MATCH_ALL, 0, "demo")

    @staticmethod
    def _derive(raw, packets, filter_text, expr, generation, source) -> Snapshot:
        indices = apply_filter(packets, expr)
        graph = build_topology([packets[i] for i in indices])
        return Snapshot(generation, raw, packets, filter_text, expr, indices, graph, source)

    def snapshot(self) -> Snapshot:
        return self._snapshot

    # -- mutations ----------------------------------------------------------

    def load_capture(self, data: bytes) -> LoadJob:
        """Start a chunked parse+dissect job; cancels any job already running.

        Raises FormatError immediately when the magic bytes are unrecognizable
        (the previous state is untouched); later failures are reported via
        status() and equally preserve the previous state.
        """
        if len(data) < 4:
            raise FormatError(data.hex().upper())
        detect_format(data)
        with self._lock:
            if self._job is not None:
                self._job.cancel()
            job = LoadJob()
            self._job = job
            job.thread = threading.Thread(target=self._run_load, args=(job, data), daemon=True)
            job.thread.start()
        return job

    def load_capture_sync(self, data: bytes) -> Snapshot:
        """Inline load used by the CLI; same pipeline, no thread."""
        raw = parse_capture(data)
        packets = dissect_all(raw)
        with self._lock:
            snap = self._derive(raw, packets, "", MATCH_ALL, self._snapshot.generation + 1, "upload")
            self._snapshot = snap
            self._last_error = None
            return snap

    def _run_load(self, job: LoadJob, data: bytes) -> None:
        try:
            def parse_sink(_records, consumed, total):
                job.progress = 0.5 * consumed / total if total else 0.5
                return not job.cancel_event.is_set()

            raw = parse_capture(data, parse_sink)
            if raw.cancelled or job.cancel_event.is_set():
                return
            total_records = len(raw.records)

            def dissect_sink(done, _done, total):
                job.progress = 0.5 + 0.5 * done / total if total else 1.0
                return not job.cancel_event.is_set()

            packets = dissect_all(raw, dissect_sink)
            if job.cancel_event.is_set() or len(packets) < total_records:
                return
            with self._lock:
                if self._job is not job or job.cancel_event.is_set():
                    return
                self._snapshot = self._derive(
                    raw, packets, "", MATCH_ALL, self._snapshot.generation + 1, "upload"
                )
                self._last_error = None
        except CaptureError as err:
            job.error = err
            with self._lock:
                if self._job is job:
                    self._last_error = err
        finally:
            with self._lock:
                if self._job is job:
                    self._job = None
            job.done.set()

    def set_filter(self, text: str) -> int:
        """Apply new filter text atomically; returns the new generation.

        ParseError propagates with the state unchanged; a load in progress
        rejects filter changes (phase must be Ready).
        """
        with self._lock:
            if self._job is not None and not self._job.done.is_set():
                raise RuntimeError("capture load in progress")
            snap = self._snapshot
            if snap.packets is None:
                raise RuntimeError("no capture loaded")
            expr = parse_filter(text)
            new = self._derive(
                snap.raw, snap.packets, text, expr, snap.generation + 1, snap.source
            )
            self._snapshot = new
            return new.generation

    def wait_idle(self, timeout: float | None = 30.0) -> None:
        job = self._job
        if job is not None:
            job.wait(timeout)

    # -- read-side payloads (shared verbatim by the HTTP API and the CLI) ----

    def status_payload(self) -> dict:
        snap = self._snapshot
        job = self._job
        if job is not None and not job.done.is_set():
            phase = "parsing"
            progress = min(max(job.progress, 0.0), 1.0)
        else:
            phase = "ready" if snap.packets is not None else "empty"
            progress = None
        err = self._last_error
        error = None
        if err is not None:
            error = {"message": str(err)}
            if isinstance(err, FormatError):
                error["magic_hex"] = err.magic_hex
        return {
            "generation": snap.generation,
            "phase": phase,
            "progress": progress,
            "packet_count": len(snap.packets) if snap.packets is not None else 0,
            "truncated_at_safeguard": bool(snap.raw and snap.raw.truncated_at_safeguard),
            "filter": snap.filter_text,
            "source": snap.source,
            "error": error,
        }

    def topology_payload(self) -> dict:
        snap = self._snapshot
        payload = {"generation": snap.generation}
        payload.update(topology_to_dict(snap.topology))
        return payload

    def legend_payload(self) -> dict:
        snap = self._snapshot
        return {
            "generation": snap.generation,
            "legend": [
                {"label": e.label, "packets": e.packet_count} for e in snap.topology.legend
            ],
        }

    def packet_page(self, offset: int, count: int) -> dict:
        if offset < 0:
            raise ValueError("offset must be >= 0")
        if not 1 <= count <= MAX_PAGE_SIZE:
            raise ValueError(f"count must be between 1 and {MAX_PAGE_SIZE}")
        snap = self._snapshot
        packets = snap.packets or []
        base_ts = packets[0].ts_ns if packets else 0
        rows = []
        for idx in snap.filtered_indices[offset : offset + count]:
            p = packets[idx]
            rows.append(
                {
                    "number": p.index + 1,
                    "time": f"{(p.ts_ns - base_ts) / 1e9:.6f}",
                    "src": str(p.src_addr) if p.src_addr else "",
                    "dst": str(p.dst_addr) if p.dst_addr else "",
                    "protocol": p.label,
                    "length": p.length,
                    "info": p.info,
                }
            )
        return {
            "generation": snap.generation,
            "rows": rows,
            "total_filtered": len(snap.filtered_indices),
        }

    def conversations_payload(self, host_text: str) -> dict:
        snap = self._snapshot
        key = lookup_host(snap.topology, host_text)
        if key is None:
            raise KeyError(host_text)
        entries = conversation_detail(snap.topology, key)
        return {
            "generation": snap.generation,
            "host": str(key),
            "peers": [
                {
                    "peer": str(e.peer),
                    "kind": e.peer.kind,
                    "packets": e.packet_count,
                    "bytes": e.byte_count,
                    "protocols": {k: e.protocol_breakdown[k] for k in sorted(e.protocol_breakdown)},
                }
                for e in entries
            ],
            "total_packets": sum(e.packet_count for e in entries),
        }
