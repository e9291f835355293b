"""Generate frontend test fixtures from the engine's real wire format.

The UI tests run against these captured responses, and a test on the Python
side regenerates them to fail loudly if the wire format drifts.
"""

from __future__ import annotations

import sys
from pathlib import Path

from pcaptopo import Session
from pcaptopo.topology import to_json_bytes


def fixture_payloads() -> dict[str, bytes]:
    session = Session()
    out = {
        "status_demo.json": to_json_bytes(session.status_payload()),
        "topology_demo.json": to_json_bytes(session.topology_payload()),
        "legend_demo.json": to_json_bytes(session.legend_payload()),
        "packets_demo_p0.json": to_json_bytes(session.packet_page(0, 100)),
    }
    generation = session.set_filter("dns")
    out["filter_dns_response.json"] = to_json_bytes({"generation": generation, "ok": True})
    out["topology_dns.json"] = to_json_bytes(session.topology_payload())
    out["legend_dns.json"] = to_json_bytes(session.legend_payload())
    out["packets_dns_p0.json"] = to_json_bytes(session.packet_page(0, 100))
    out["packets_dns_p100.json"] = to_json_bytes(session.packet_page(100, 100))
    out["conversations_dns_server.json"] = to_json_bytes(
        session.conversations_payload("10.0.1.200")
    )
    return out


def main(out_dir: str) -> None:
    target = Path(out_dir)
    target.mkdir(parents=True, exist_ok=True)
    for name, payload in fixture_payloads().items():
        (target / name).write_bytes(payload + b"\n")
    print(f"wrote {len(fixture_payloads())} fixtures to {target}")


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).parent.parent / "tests" / "fixtures"))
