"""Hosts, conversations, and the capped topology graph over a filtered packet set.

A conversation is an unordered host pair. Nodes are capped at the 80 most
active hosts by packet count (ties: byte count, then address order) so the
rendered graph stays readable; the cap never hides the true host total.
"""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field

from .fields import Address, parse_address

NODE_CAP = 80

HostKey = Address


@dataclass(slots=True)
class HostNode:
    key: HostKey
    packet_count: int = 0
    byte_count: int = 0
    protocols: set = field(default_factory=set)


@dataclass(slots=True)
class ConversationEdge:
    a: HostKey  # endpoints stored in canonical (ascending) order
    b: HostKey
    packet_count: int = 0
    byte_count: int = 0
    protocol_breakdown: dict = field(default_factory=dict)
    first_seen: int = 0  # ts_ns
    last_seen: int = 0


@dataclass(frozen=True, slots=True)
class ProtocolLegendEntry:
    label: str
    packet_count: int
    rank: int


@dataclass(slots=True)
class TopologyGraph:
    nodes: list[HostNode]
    edges: list[ConversationEdge]
    total_hosts_before_cap: int
    legend: list[ProtocolLegendEntry]


@dataclass(frozen=True, slots=True)
class ConversationDetailEntry:
    peer: HostKey
    packet_count: int
    byte_count: int
    protocol_breakdown: dict


def legend(packets) -> list[ProtocolLegendEntry]:
    """Protocol frequency over the packet set: count descending, label ascending."""
    counts = Counter(p.label for p in packets)
    ordered = sorted(counts.items(), key=lambda kv: (-kv[1], kv[0]))
    return [ProtocolLegendEntry(label, n, rank) for rank, (label, n) in enumerate(ordered, 1)]


def host_pairs(packets) -> dict[tuple[HostKey, HostKey], ConversationEdge]:
    """One conversation edge per distinct unordered (src, dst) pair.

    Packets lacking either address contribute nothing; src == dst packets
    count toward node totals only (no self-loop edges).
    """
    edges: dict[tuple[HostKey, HostKey], ConversationEdge] = {}
    for p in packets:
        s, d = p.src_addr, p.dst_addr
        if s is None or d is None or s == d:
            continue
        key = (s, d) if s.sort_key <= d.sort_key else (d, s)
        edge = edges.get(key)
        if edge is None:
            edge = edges[key] = ConversationEdge(key[0], key[1], 0, 0, {}, p.ts_ns, p.ts_ns)
        edge.packet_count += 1
        edge.byte_count += p.length
        edge.protocol_breakdown[p.label] = edge.protocol_breakdown.get(p.label, 0) + 1
        if p.ts_ns < edge.first_seen:
            edge.first_seen = p.ts_ns
        if p.ts_ns > edge.last_seen:
            edge.last_seen = p.ts_ns
    return edges


def build_topology(packets) -> TopologyGraph:
    """Derive the capped graph: top-80 hosts, edges among them, full legend."""
    stats: dict[HostKey, HostNode] = {}
    for p in packets:
        s, d = p.src_addr, p.dst_addr
        for key in (s,) if s == d else (s, d):
            if key is None:
                continue
            node = stats.get(key)
            if node is None:
                node = stats[key] = HostNode(key)
            node.packet_count += 1
            node.byte_count += p.length
            node.protocols.add(p.label)

    ranked = sorted(
        stats.values(), key=lambda n: (-n.packet_count, -n.byte_count, n.key.sort_key)
    )
    nodes = ranked[:NODE_CAP]
    included = {n.key for n in nodes}
    edges = [
        e for (a, b), e in host_pairs(packets).items() if a in included and b in included
    ]
    edges.sort(key=lambda e: (e.a.sort_key, e.b.sort_key))
    return TopologyGraph(nodes, edges, len(stats), legend(packets))


def conversation_detail(graph: TopologyGraph, host: HostKey) -> list[ConversationDetailEntry]:
    """Per-peer traffic for one node, busiest conversation first."""
    if all(n.key != host for n in graph.nodes):
        raise KeyError(f"host {host} is not in the current topology")
    entries = []
    for e in graph.edges:
        if e.a == host or e.b == host:
            peer = e.b if e.a == host else e.a
            entries.append(
                ConversationDetailEntry(peer, e.packet_count, e.byte_count, dict(e.protocol_breakdown))
            )
    entries.sort(key=lambda entry: (-entry.packet_count, entry.peer.sort_key))
    return entries


# ---------------------------------------------------------------------------
# Wire shape shared by the HTTP API and the CLI
# ---------------------------------------------------------------------------


def topology_to_dict(graph: TopologyGraph) -> dict:
    """The documented JSON shape consumed by the UI and emitted by the CLI."""
    return {
        "nodes": [
            {
                "id": str(n.key),
                "kind": n.key.kind,
                "packets": n.packet_count,
                "bytes": n.byte_count,
                "protocols": sorted(n.protocols),
            }
            for n in graph.nodes
        ],
        "edges": [
            {
                "a": str(e.a),
                "b": str(e.b),
                "packets": e.packet_count,
                "bytes": e.byte_count,
                "protocols": {k: e.protocol_breakdown[k] for k in sorted(e.protocol_breakdown)},
            }
            for e in graph.edges
        ],
        "totalHosts": graph.total_hosts_before_cap,
        "legend": [{"label": item.label, "packets": item.packet_count} for item in graph.legend],
    }


def to_json_bytes(payload: dict) -> bytes:
    """Canonical compact JSON; both the service and the CLI emit these bytes."""
    return json.dumps(payload, separators=(",", ":"), ensure_ascii=False).encode("utf-8")


def lookup_host(graph: TopologyGraph, text: str) -> HostKey | None:
    """Resolve a rendered host id back to the node key, if present."""
    key = parse_address(text)
    if key is None:
        return None
    for n in graph.nodes:
        if n.key == key:
            return key
    return None
