"""Test-side capture synthesis, independent of the package's own writer.

The PCAP/PCAPNG byte builders here are assembled directly from the published
file-format layouts so they can serve as an independent encoding oracle for
the parser (and vice versa). Packet-level builders reuse pcaptopo.demo's
frame helpers, which are themselves independent of the dissectors.
"""

from __future__ import annotations

import random
import struct

from pcaptopo.demo import (
    arp_message,
    dns_query,
    dns_response,
    eth_frame,
    icmp_echo,
    ipv4_packet,
    ntp_message,
    tcp_segment,
    tls_record,
    udp_datagram,
)
from pcaptopo.dissect import DissectedPacket, ProtocolLayer
from pcaptopo.fields import Address, ipv4

# ---------------------------------------------------------------------------
# Legacy PCAP encoders (independent of pcaptopo.demo.write_pcap)
# ---------------------------------------------------------------------------

MAGIC_MICRO = 0xA1B2C3D4
MAGIC_NANO = 0xA1B23C4D


def pcap_bytes(records, *, endian="<", nano=False, link_type=1) -> bytes:
    """records: iterable of (ts_sec, ts_frac, data[, orig_len])."""
    magic = MAGIC_NANO if nano else MAGIC_MICRO
    out = [struct.pack(endian + "IHHiIII", magic, 2, 4, 0, 0, 0x40000, link_type)]
    for rec in records:
        ts_sec, ts_frac, data = rec[0], rec[1], rec[2]
        orig = rec[3] if len(rec) > 3 else len(data)
        out.append(struct.pack(endian + "IIII", ts_sec, ts_frac, len(data), orig))
        out.append(data)
    return b"".join(out)


# ---------------------------------------------------------------------------
# PCAPNG encoders
# ---------------------------------------------------------------------------


def _pad32(data: bytes) -> bytes:
    return data + b"\x00" * (-len(data) % 4)


def ng_block(block_type: int, body: bytes, endian="<") -> bytes:
    body = _pad32(body)
    total = 12 + len(body)
    return (
        struct.pack(endian + "II", block_type, total) + body + struct.pack(endian + "I", total)
    )


def ng_option(code: int, value: bytes, endian="<") -> bytes:
    return struct.pack(endian + "HH", code, len(value)) + _pad32(value)


def ng_shb(endian="<") -> bytes:
    body = struct.pack(endian + "IHHq", 0x1A2B3C4D, 1, 0, -1)
    return ng_block(0x0A0D0D0A, body, endian)


def ng_idb(link_type=1, endian="<", tsresol: int | None = None, name: str | None = None) -> bytes:
    body = struct.pack(endian + "HHI", link_type, 0, 0x40000)
    options = b""
    if tsresol is not None:
        options += ng_option(9, bytes([tsresol]), endian)
    if name is not None:
        options += ng_option(2, name.encode(), endian)
    if options:
        options += ng_option(0, b"", endian)
    return ng_block(0x00000001, body + options, endian)


def ng_epb(interface_id: int, ticks: int, data: bytes, endian="<", orig_len=None) -> bytes:
    body = struct.pack(
        endian + "IIIII",
        interface_id,
        (ticks >> 32) & 0xFFFFFFFF,
        ticks & 0xFFFFFFFF,
        len(data),
        orig_len if orig_len is not None else len(data),
    )
    return ng_block(0x00000006, body + data, endian)


def ng_spb(data: bytes, endian="<", orig_len=None) -> bytes:
    body = struct.pack(endian + "I", orig_len if orig_len is not None else len(data))
    return ng_block(0x00000003, body + data, endian)


# ---------------------------------------------------------------------------
# Random raw records / synthetic dissected packets
# ---------------------------------------------------------------------------


def random_raw_records(rng: random.Random, count: int, *, max_len=160):
    """(ts_sec, ts_frac_ns, data) triples suitable for write_pcap round trips."""
    out = []
    for _ in range(count):
        data = rng.randbytes(rng.randrange(0, max_len))
        out.append((rng.randrange(0, 2**31), rng.randrange(0, 10**9), data))
    return out


def make_packet(index=0, label="tcp", layers=None, src=None, dst=None, length=60, ts_ns=0,
                info=""):
    """Directly build a DissectedPacket for filter/topology tests."""
    if layers is None:
        layers = [ProtocolLayer(label, {}, (0, 0))]
    return DissectedPacket(
        index=index, ts_ns=ts_ns, layers=layers, label=layers[-1].protocol,
        src_addr=src, dst_addr=dst, length=length, info=info,
    )


def host(n: int) -> Address:
    return ipv4(bytes((10, 1, (n >> 8) & 0xFF, n & 0xFF)))


# ---------------------------------------------------------------------------
# Benchmark-scale capture (48,640 packets, ~14.1 MB)
# ---------------------------------------------------------------------------

BENCHMARK_PACKETS = 48_640


def benchmark_capture_bytes(rng: random.Random | None = None) -> bytes:
    """A desk-scale analogue of a large mixed-protocol capture.

    Templates are patched per packet (addresses/ports) rather than rebuilt;
    checksums are not maintained since dissection does not verify them.
    """
    rng = rng or random.Random(0xBE7C)
    mac_a = bytes.fromhex("020000000001")
    mac_b = bytes.fromhex("020000000002")
    src0 = bytes((10, 2, 0, 1))
    dst0 = bytes((10, 2, 0, 2))

    def frame(proto, payload):
        return eth_frame(mac_b, mac_a, 0x0800, ipv4_packet(src0, dst0, proto, payload))

    http_body = b"<html>" + bytes(691) + b"</html>"
    templates = [
        # (weight, frame bytes)
        (18, frame(17, udp_datagram(src0, dst0, 40000, 53, dns_query(0x1234, "bench.example.net")))),
        (14, frame(17, udp_datagram(src0, dst0, 53, 40000,
                                    dns_response(0x1234, "bench.example.net", b"\x0a\x02\x00\x09")))),
        (16, frame(6, tcp_segment(src0, dst0, 40001, 80, 1, 1, 0x18,
                                  b"GET /bench HTTP/1.1\r\nHost: bench\r\n\r\n"))),
        (12, frame(6, tcp_segment(src0, dst0, 80, 40001, 1, 40, 0x18,
                                  b"HTTP/1.1 200 OK\r\nContent-Length: 704\r\n\r\n" + http_body))),
        (16, frame(6, tcp_segment(src0, dst0, 40002, 443, 1, 1, 0x10))),
        (12, frame(6, tcp_segment(src0, dst0, 443, 40002, 1, 1, 0x18,
                                  tls_record(23, bytes(961))))),
        (5, frame(1, icmp_echo(False, 7, 1, bytes(48)))),
        (4, frame(17, udp_datagram(src0, dst0, 40003, 123, ntp_message(3)))),
        (3, eth_frame(mac_b, mac_a, 0x0806,
                      arp_message(1, mac_a, src0, mac_b, dst0))),
    ]
    pool = []
    for weight, data in templates:
        pool.extend([data] * weight)

    header = struct.pack("<IHHiIII", MAGIC_MICRO, 2, 4, 0, 0, 0x40000, 1)
    chunks = [header]
    ts_sec = 1_700_000_000
    n_hosts = 180
    for i in range(BENCHMARK_PACKETS):
        template = pool[rng.randrange(len(pool))]
        # Patch IPv4 src/dst (offsets 26/30 in an Ethernet+IPv4 frame).
        if template[12:14] == b"\x08\x00":
            a = 1 + (i * 7) % n_hosts
            b = 1 + (i * 13 + 5) % n_hosts
            data = (
                template[:26]
                + bytes((10, 2, a >> 8, a & 0xFF))
                + bytes((10, 2, b >> 8, b & 0xFF))
                + template[34:]
            )
        else:
            data = template
        chunks.append(struct.pack("<IIII", ts_sec + i // 1000, (i % 1000) * 1000, len(data), len(data)))
        chunks.append(data)
    return b"".join(chunks)
