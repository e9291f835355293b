"""Built-in demo capture and legacy-PCAP serialization.

The demo is generated as real capture bytes from a fixed address plan and a
fixed RNG seed, so repeated generation is byte-identical and every count the
rest of the system promises (20 hosts, 24 conversations, 10 protocols, 153
DNS packets around 10.0.1.200) is produced by actually parsing and
dissecting these bytes, never by bookkeeping.
"""

from __future__ import annotations

import random
import struct
from dataclasses import dataclass

from .capture import (
    ByteOrder,
    CaptureFormat,
    FormatKind,
    InterfaceDescription,
    RawCapture,
    RawPacketRecord,
)
from .dissect import default_registry

_NS = 1_000_000_000
_EPOCH_NS = 1_716_000_000 * _NS  # fixed demo epoch
_SEED = 0x20240518

_PCAP_NANO_MAGIC = 0xA1B23C4D


def write_pcap(capture: RawCapture) -> bytes:
    """Serialize to little-endian nanosecond legacy PCAP (lossless round trip)."""
    if capture.records:
        link_type = capture.records[0].link_type
    elif capture.interfaces:
        link_type = capture.interfaces[0].link_type
    else:
        link_type = 1
    chunks = [struct.pack("<IHHiIII", _PCAP_NANO_MAGIC, 2, 4, 0, 0, 262144, link_type)]
    for r in capture.records:
        chunks.append(
            struct.pack("<IIII", r.ts_ns // _NS, r.ts_ns % _NS, len(r.data), r.original_length)
        )
        chunks.append(r.data)
    return b"".join(chunks)


# ---------------------------------------------------------------------------
# Frame builders (independent of the dissectors; also used as test fixtures)
# ---------------------------------------------------------------------------

FIN, SYN, RST, PSH, ACK = 0x01, 0x02, 0x04, 0x08, 0x10


def checksum16(data: bytes) -> int:
    if len(data) % 2:
        data += b"\x00"
    total = sum(struct.unpack(f">{len(data) // 2}H", data))
    while total >> 16:
        total = (total & 0xFFFF) + (total >> 16)
    return ~total & 0xFFFF


def eth_frame(dst_mac: bytes, src_mac: bytes, ethertype: int, payload: bytes) -> bytes:
    return dst_mac + src_mac + struct.pack(">H", ethertype) + payload


def ipv4_packet(src: bytes, dst: bytes, proto: int, payload: bytes, ttl=64, ident=0) -> bytes:
    header = struct.pack(
        ">BBHHHBBH4s4s", 0x45, 0, 20 + len(payload), ident, 0x4000, ttl, proto, 0, src, dst
    )
    header = header[:10] + struct.pack(">H", checksum16(header)) + header[12:]
    return header + payload


def udp_datagram(src: bytes, dst: bytes, sport: int, dport: int, payload: bytes) -> bytes:
    length = 8 + len(payload)
    pseudo = src + dst + struct.pack(">BBH", 0, 17, length)
    header = struct.pack(">HHHH", sport, dport, length, 0)
    ck = checksum16(pseudo + header + payload) or 0xFFFF
    return struct.pack(">HHHH", sport, dport, length, ck) + payload


def tcp_segment(
    src: bytes, dst: bytes, sport: int, dport: int, seq: int, ack: int, flags: int,
    payload: bytes = b"", window: int = 64240,
) -> bytes:
    header = struct.pack(
        ">HHIIBBHHH", sport, dport, seq & 0xFFFFFFFF, ack & 0xFFFFFFFF,
        5 << 4, flags, window, 0, 0,
    )
    pseudo = src + dst + struct.pack(">BBH", 0, 6, len(header) + len(payload))
    ck = checksum16(pseudo + header + payload)
    return header[:16] + struct.pack(">H", ck) + header[18:] + payload


def _dns_qsection(name: str, qtype: int) -> bytes:
    encoded = b"".join(bytes([len(p)]) + p.encode("ascii") for p in name.split("."))
    return encoded + b"\x00" + struct.pack(">HH", qtype, 1)


def dns_query(ident: int, name: str, qtype: int = 1) -> bytes:
    return struct.pack(">HHHHHH", ident, 0x0100, 1, 0, 0, 0) + _dns_qsection(name, qtype)


def dns_response(ident: int, name: str, answer: bytes, qtype: int = 1) -> bytes:
    rr = b"\xc0\x0c" + struct.pack(">HHIH", qtype, 1, 300, len(answer)) + answer
    return struct.pack(">HHHHHH", ident, 0x8180, 1, 1, 0, 0) + _dns_qsection(name, qtype) + rr


def arp_message(opcode: int, sha: bytes, spa: bytes, tha: bytes, tpa: bytes) -> bytes:
    return struct.pack(">HHBBH", 1, 0x0800, 6, 4, opcode) + sha + spa + tha + tpa


def icmp_echo(reply: bool, ident: int, seq: int, payload: bytes) -> bytes:
    header = struct.pack(">BBHHH", 0 if reply else 8, 0, 0, ident, seq)
    ck = checksum16(header + payload)
    return header[:2] + struct.pack(">H", ck) + header[4:] + payload


def ntp_message(mode: int, version: int = 4, stratum: int = 0) -> bytes:
    first = (version << 3) | mode
    body = struct.pack(">BBBb", first, stratum, 6, -20) + bytes(44)
    return body  # 48 bytes


def dhcp_message(op: int, msg_type: int, xid: int, ciaddr: bytes, chaddr: bytes,
                 yiaddr: bytes = bytes(4), siaddr: bytes = bytes(4)) -> bytes:
    fixed = (
        struct.pack(">BBBBIHH", op, 1, 6, 0, xid, 0, 0)
        + ciaddr + yiaddr + siaddr + bytes(4)
        + chaddr + bytes(10) + bytes(64) + bytes(128)
    )
    options = b"\x63\x82\x53\x63" + bytes([53, 1, msg_type]) + bytes([54, 4]) + siaddr + b"\xff"
    return fixed + options + bytes(32)


def tls_record(content_type: int, body: bytes, version: int = 0x0303) -> bytes:
    return struct.pack(">BHH", content_type, version, len(body)) + body


def tls_handshake(hs_type: int, body_len: int, rng: random.Random) -> bytes:
    inner = bytes([hs_type]) + (body_len - 1).to_bytes(3, "big") + rng.randbytes(body_len - 4)
    return tls_record(22, inner, version=0x0301 if hs_type == 1 else 0x0303)


# ---------------------------------------------------------------------------
# The demo address plan (exact, checked-in: tests assert against this table)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class _Host:
    ip: str | None
    mac: str

    @property
    def ip_b(self) -> bytes:
        return bytes(int(p) for p in self.ip.split("."))

    @property
    def mac_b(self) -> bytes:
        return bytes.fromhex(self.mac.replace(":", ""))


GATEWAY = _Host("10.0.1.1", "aa:00:00:00:00:01")
DHCP_SERVER = _Host("10.0.1.2", "aa:00:00:00:00:02")
SSH_BASTION = _Host("10.0.1.10", "aa:00:00:00:00:03")
FTP_SERVER = _Host("10.0.1.20", "aa:00:00:00:00:04")
WS50 = _Host("10.0.1.50", "aa:00:00:00:00:05")
WS51 = _Host("10.0.1.51", "aa:00:00:00:00:06")
WS52 = _Host("10.0.1.52", "aa:00:00:00:00:07")
WS53 = _Host("10.0.1.53", "aa:00:00:00:00:08")
WS54 = _Host("10.0.1.54", "aa:00:00:00:00:09")
WS55 = _Host("10.0.1.55", "aa:00:00:00:00:0a")
WS56 = _Host("10.0.1.56", "aa:00:00:00:00:0b")
DNS_SERVER = _Host("10.0.1.200", "aa:00:00:00:00:0c")
WEB1 = _Host("93.184.216.34", "aa:00:00:00:00:0d")
WEB2 = _Host("151.101.1.140", "aa:00:00:00:00:0e")
NTP_SERVER = _Host("129.6.15.28", "aa:00:00:00:00:0f")
RESOLVER_A = _Host("8.8.8.8", "aa:00:00:00:00:10")
RESOLVER_B = _Host("1.1.1.1", "aa:00:00:00:00:11")
EXT_TCP = _Host("198.51.100.9", "aa:00:00:00:00:12")
# MAC-only devices: seen exclusively in ARP traffic, so downstream they are
# keyed by MAC. Their claimed IPv4 addresses appear only inside ARP payloads.
IOT1 = _Host("10.0.1.61", "aa:00:00:00:0e:01")
IOT2 = _Host("10.0.1.62", "aa:00:00:00:0e:02")

# (client, server, total DNS packets) per conversation; totals 153.
DNS_PLAN = (
    (WS50, DNS_SERVER, 40),
    (WS51, DNS_SERVER, 36),
    (WS52, DNS_SERVER, 30),
    (DNS_SERVER, RESOLVER_A, 26),
    (DNS_SERVER, RESOLVER_B, 21),
)

_INTRANET_NAMES = ("intranet.corp", "files.corp", "mail.corp", "wiki.corp", "git.corp")
_EXTERNAL_NAMES = ("example.com", "cdn.example.net", "updates.vendor.io", "pool.ntp.org")


@dataclass(frozen=True)
class DemoSpec:
    """The counts the generated demo must satisfy end to end."""

    host_count: int = 20
    conversation_count: int = 24
    protocol_count: int = 10
    dns_packet_count: int = 153
    dns_conversation_count: int = 5
    dns_server: str = "10.0.1.200"
    dns_clients: tuple = ("10.0.1.50", "10.0.1.51", "10.0.1.52")
    upstream_resolvers: tuple = ("8.8.8.8", "1.1.1.1")
    protocols: tuple = ("arp", "dhcp", "dns", "ftp", "http", "icmp", "ntp", "ssh", "tcp", "tls")


DEMO_SPEC = DemoSpec()


def generate_demo() -> bytes:
    """Produce the demo capture as legacy PCAP bytes; deterministic."""
    rng = random.Random(_SEED)
    frames: list[tuple[int, bytes]] = []

    reg = default_registry()
    reserved_ports = (
        set(reg.tcp_ports) | set(reg.udp_ports)
        | set(reg.tcp_port_labels) | set(reg.udp_port_labels)
    )

    def ephemeral() -> int:
        while True:
            port = rng.randrange(49152, 65536)
            if port not in reserved_ports:
                return port

    def clock():
        # conversation start times spread packets over a roughly minute-long window
        t = rng.uniform(0.0, 52.0)

        def tick() -> int:
            nonlocal t
            t += rng.uniform(0.005, 0.9)
            return int(t * _NS)

        return tick

    def ip_frame(src: _Host, dst: _Host, proto: int, payload: bytes) -> bytes:
        packet = ipv4_packet(src.ip_b, dst.ip_b, proto, payload, ident=rng.randrange(0x10000))
        return eth_frame(dst.mac_b, src.mac_b, 0x0800, packet)

    def udp_frame(src: _Host, dst: _Host, sport: int, dport: int, payload: bytes) -> bytes:
        return ip_frame(src, dst, 17, udp_datagram(src.ip_b, dst.ip_b, sport, dport, payload))

    def tcp_frame(src, dst, sport, dport, seq, ack, flags, payload=b"") -> bytes:
        seg = tcp_segment(src.ip_b, dst.ip_b, sport, dport, seq, ack, flags, payload)
        return ip_frame(src, dst, 6, seg)

    # --- DNS subsystem: 153 packets across exactly the 5 planned pairs ----
    for client, server, total in DNS_PLAN:
        tick = clock()
        names = _INTRANET_NAMES if server is DNS_SERVER else _EXTERNAL_NAMES
        queries = (total + 1) // 2
        responses = total // 2
        for i in range(queries):
            ident = rng.randrange(0x10000)
            sport = ephemeral()
            name = names[i % len(names)]
            frames.append((tick(), udp_frame(client, server, sport, 53, dns_query(ident, name))))
            if i < responses:
                answer = bytes([10, 9, rng.randrange(256), rng.randrange(1, 255)])
                frames.append(
                    (tick(), udp_frame(server, client, 53, sport, dns_response(ident, name, answer)))
                )

    # --- TCP application sessions -----------------------------------------
    def tcp_session(client, server, dport, exchanges, ack_each=True):
        """exchanges: list of (client_payload|None, server_payload|None)."""
        tick = clock()
        sport = ephemeral()
        cseq = rng.randrange(1 << 31)
        sseq = rng.randrange(1 << 31)
        frames.append((tick(), tcp_frame(client, server, sport, dport, cseq, 0, SYN)))
        frames.append((tick(), tcp_frame(server, client, dport, sport, sseq, cseq + 1, SYN | ACK)))
        cseq += 1
        sseq += 1
        frames.append((tick(), tcp_frame(client, server, sport, dport, cseq, sseq, ACK)))
        for c_payload, s_payload in exchanges:
            if c_payload:
                frames.append(
                    (tick(), tcp_frame(client, server, sport, dport, cseq, sseq, PSH | ACK, c_payload))
                )
                cseq += len(c_payload)
            if s_payload:
                frames.append(
                    (tick(), tcp_frame(server, client, dport, sport, sseq, cseq, PSH | ACK, s_payload))
                )
                sseq += len(s_payload)
                if ack_each:
                    frames.append((tick(), tcp_frame(client, server, sport, dport, cseq, sseq, ACK)))
        frames.append((tick(), tcp_frame(client, server, sport, dport, cseq, sseq, FIN | ACK)))
        frames.append((tick(), tcp_frame(server, client, dport, sport, sseq, cseq + 1, FIN | ACK)))
        frames.append((tick(), tcp_frame(client, server, sport, dport, cseq + 1, sseq + 1, ACK)))

    def http_exchange(host, path):
        request = (
            f"GET {path} HTTP/1.1\r\nHost: {host}\r\nUser-Agent: demo-client/1.0\r\n"
            "Accept: */*\r\n\r\n"
        ).encode()
        body = rng.randbytes(rng.randrange(180, 700))
        response = (
            "HTTP/1.1 200 OK\r\nServer: demo-web\r\nContent-Type: text/html\r\n"
            f"Content-Length: {len(body)}\r\n\r\n"
        ).encode() + body
        return request, response

    tcp_session(WS52, WEB1, 80, [http_exchange("www.demo-web.test", p) for p in ("/", "/news")])
    tcp_session(WS53, WEB1, 80, [http_exchange("www.demo-web.test", "/status")], ack_each=False)

    def tls_exchanges():
        return [
            (tls_handshake(1, 192, rng), tls_handshake(2, 90, rng)),
            (tls_record(20, b"\x01"), tls_record(20, b"\x01")),
            (tls_record(23, rng.randbytes(rng.randrange(64, 400))),
             tls_record(23, rng.randbytes(rng.randrange(200, 900)))),
            (None, tls_record(23, rng.randbytes(rng.randrange(64, 300)))),
        ]

    tcp_session(WS50, WEB2, 443, tls_exchanges())
    tcp_session(WS54, WEB2, 443, tls_exchanges(), ack_each=False)

    def ssh_exchanges(encrypted):
        out = [(b"SSH-2.0-OpenSSH_9.6\r\n", b"SSH-2.0-OpenSSH_8.9p1\r\n")]
        for _ in range(encrypted):
            out.append((rng.randbytes(rng.randrange(48, 160)), rng.randbytes(rng.randrange(48, 160))))
        return out

    tcp_session(WS55, SSH_BASTION, 22, ssh_exchanges(3), ack_each=False)
    tcp_session(WS56, SSH_BASTION, 22, ssh_exchanges(1), ack_each=False)

    ftp_dialogue = [
        (None, b"220 FTP service ready\r\n"),
        (b"USER alice\r\n", b"331 Password required\r\n"),
        (b"PASS hunter2\r\n", b"230 Login successful\r\n"),
        (b"RETR report.pdf\r\n", b"150 Opening data connection\r\n"),
        (b"QUIT\r\n", b"221 Goodbye\r\n"),
    ]
    tcp_session(WS52, FTP_SERVER, 21, ftp_dialogue, ack_each=False)
    tcp_session(WS50, FTP_SERVER, 21, ftp_dialogue[:3], ack_each=False)

    # Opaque service traffic: stays labeled tcp (payload matches no dissector).
    opaque = [(b"\x02\x00" + rng.randbytes(60), b"\x03\x00" + rng.randbytes(120)) for _ in range(2)]
    tcp_session(WS55, EXT_TCP, 8999, opaque, ack_each=False)

    # --- ICMP pings --------------------------------------------------------
    def ping(a, b, count):
        tick = clock()
        ident = rng.randrange(0x10000)
        for seq in range(1, count + 1):
            payload = bytes(range(0x20, 0x50))
            frames.append((tick(), ip_frame(a, b, 1, icmp_echo(False, ident, seq, payload))))
            frames.append((tick(), ip_frame(b, a, 1, icmp_echo(True, ident, seq, payload))))

    ping(WS50, GATEWAY, 4)
    ping(WS51, GATEWAY, 3)
    ping(WS52, GATEWAY, 2)
    ping(WS56, GATEWAY, 2)

    # --- NTP ----------------------------------------------------------------
    def ntp(client, server, count):
        tick = clock()
        for _ in range(count):
            sport = ephemeral()
            frames.append((tick(), udp_frame(client, server, sport, 123, ntp_message(3))))
            frames.append((tick(), udp_frame(server, client, 123, sport, ntp_message(4, stratum=2))))

    ntp(WS51, NTP_SERVER, 2)
    ntp(WS54, NTP_SERVER, 2)
    ntp(WS55, NTP_SERVER, 1)

    # --- DHCP lease renewals -------------------------------------------------
    def dhcp_renew(client, server, count):
        tick = clock()
        for _ in range(count):
            xid = rng.randrange(1 << 32)
            frames.append(
                (tick(), udp_frame(client, server, 68, 67,
                                   dhcp_message(1, 3, xid, client.ip_b, client.mac_b)))
            )
            frames.append(
                (tick(), udp_frame(server, client, 67, 68,
                                   dhcp_message(2, 5, xid, client.ip_b, client.mac_b,
                                                yiaddr=client.ip_b, siaddr=server.ip_b)))
            )

    dhcp_renew(WS53, DHCP_SERVER, 2)
    dhcp_renew(WS56, DHCP_SERVER, 2)

    # --- ARP between MAC-only devices (unicast revalidation) ----------------
    tick = clock()
    for _ in range(3):
        frames.append(
            (tick(), eth_frame(IOT2.mac_b, IOT1.mac_b, 0x0806,
                               arp_message(1, IOT1.mac_b, IOT1.ip_b, IOT2.mac_b, IOT2.ip_b)))
        )
        frames.append(
            (tick(), eth_frame(IOT1.mac_b, IOT2.mac_b, 0x0806,
                               arp_message(2, IOT2.mac_b, IOT2.ip_b, IOT1.mac_b, IOT1.ip_b)))
        )

    frames.sort(key=lambda item: item[0])
    records = [
        RawPacketRecord(
            index=i,
            ts_ns=_EPOCH_NS + offset,
            captured_length=len(frame),
            original_length=len(frame),
            link_type=1,
            interface_id=0,
            data=frame,
        )
        for i, (offset, frame) in enumerate(frames)
    ]
    capture = RawCapture(
        format=CaptureFormat(FormatKind.PCAP_NANOSECONDS, ByteOrder.LITTLE),
        records=records,
        interfaces=[InterfaceDescription(0, 1, _NS)],
    )
    return write_pcap(capture)
