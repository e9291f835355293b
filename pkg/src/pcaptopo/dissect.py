"""Layered protocol dissection over raw packet records.

A dissector registry chains decoders from the link layer upward: exact
link-type/ethertype/ip-protocol tables first, then transport port tables,
then ordered payload probes. Dissection is total: malformed bytes degrade
to a "data" layer, unknown payloads stay with the deepest parsed layer,
and no input can raise out of dissect().
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from typing import Callable

from .capture import PROGRESS_CHUNK_RECORDS, ProgressSink, RawCapture, RawPacketRecord
from .fields import Address

MAX_LAYERS = 16


@dataclass(slots=True)
class ProtocolLayer:
    protocol: str
    fields: dict
    payload_span: tuple[int, int]  # this layer's payload as [start, end) into record data


@dataclass(slots=True)
class DissectedPacket:
    index: int
    ts_ns: int
    layers: list[ProtocolLayer]
    label: str  # protocol of the topmost layer
    src_addr: Address | None
    dst_addr: Address | None
    length: int  # original (on-the-wire) length
    info: str

    @property
    def number(self) -> int:
        """1-based frame number, stable across filtering."""
        return self.index + 1


class _Malformed(Exception):
    """Internal: layer bytes are structurally unparseable; degrade to data."""


# A dissector decodes one layer inside data[start:end] and returns
# (layer, next_dissector, payload_start, payload_end), or None to decline.
Dissector = Callable[[bytes, int, int, "DissectorRegistry"], object]


@dataclass
class DissectorRegistry:
    """Lookup tables driving chained dissection; lookup order is fixed:
    exact tables, then port tables, then port labels, then payload probes."""

    link_types: dict[int, Dissector] = field(default_factory=dict)
    ethertypes: dict[int, Dissector] = field(default_factory=dict)
    ip_protocols: dict[int, Dissector] = field(default_factory=dict)
    tcp_ports: dict[int, Dissector] = field(default_factory=dict)
    udp_ports: dict[int, Dissector] = field(default_factory=dict)
    tcp_port_labels: dict[int, str] = field(default_factory=dict)
    udp_port_labels: dict[int, str] = field(default_factory=dict)
    tcp_probes: list[Dissector] = field(default_factory=list)
    udp_probes: list[Dissector] = field(default_factory=list)
    core_protocols: frozenset = frozenset()

    def protocol_names(self) -> frozenset:
        """Every protocol label this registry can assign."""
        return (
            self.core_protocols
            | frozenset(self.tcp_port_labels.values())
            | frozenset(self.udp_port_labels.values())
        )


# ---------------------------------------------------------------------------
# Link / network / transport decoders
# ---------------------------------------------------------------------------


def _d_eth(data, start, end, reg):
    if end - start < 14:
        raise _Malformed
    fields = {
        "dst": Address("mac", data[start : start + 6]),
        "src": Address("mac", data[start + 6 : start + 12]),
        "type": (data[start + 12] << 8) | data[start + 13],
    }
    etype = fields["type"]
    nxt = reg.ethertypes.get(etype) if etype >= 0x0600 else None
    return ProtocolLayer("eth", fields, (start + 14, end)), nxt, start + 14, end


def _d_vlan(data, start, end, reg):
    if end - start < 4:
        raise _Malformed
    tci = (data[start] << 8) | data[start + 1]
    etype = (data[start + 2] << 8) | data[start + 3]
    fields = {"id": tci & 0x0FFF, "priority": tci >> 13, "type": etype}
    nxt = reg.ethertypes.get(etype) if etype >= 0x0600 else None
    return ProtocolLayer("vlan", fields, (start + 4, end)), nxt, start + 4, end


def _d_null(data, start, end, reg):
    # BSD loopback: 4-byte address family, host byte order (try both).
    if end - start < 4:
        raise _Malformed
    fam_le = int.from_bytes(data[start : start + 4], "little")
    fam_be = int.from_bytes(data[start : start + 4], "big")
    fields = {"family": fam_le if fam_le < 0x10000 else fam_be}
    fam = fields["family"]
    nxt = _d_ipv4 if fam == 2 else _d_ipv6 if fam in (10, 24, 28, 30) else None
    return ProtocolLayer("null", fields, (start + 4, end)), nxt, start + 4, end


def _d_rawip(data, start, end, reg):
    if end - start < 1:
        raise _Malformed
    version = data[start] >> 4
    if version == 4:
        return _d_ipv4(data, start, end, reg)
    if version == 6:
        return _d_ipv6(data, start, end, reg)
    raise _Malformed


def _d_sll(data, start, end, reg):
    # Linux cooked capture v1: 16-byte pseudo header ending in a protocol type.
    if end - start < 16:
        raise _Malformed
    etype = (data[start + 14] << 8) | data[start + 15]
    fields = {"pkttype": (data[start] << 8) | data[start + 1], "type": etype}
    nxt = reg.ethertypes.get(etype) if etype >= 0x0600 else None
    return ProtocolLayer("sll", fields, (start + 16, end)), nxt, start + 16, end


def _d_arp(data, start, end, reg):
    if end - start < 8:
        raise _Malformed
    _htype, _ptype, hlen, plen, oper = struct.unpack_from(">HHBBH", data, start)
    fields = {"opcode": oper}
    off = start + 8
    if hlen == 6 and plen == 4 and end - off >= 20:
        fields["src_hw"] = Address("mac", data[off : off + 6])
        fields["src_proto"] = Address("ipv4", data[off + 6 : off + 10])
        fields["dst_hw"] = Address("mac", data[off + 10 : off + 16])
        fields["dst_proto"] = Address("ipv4", data[off + 16 : off + 20])
    return ProtocolLayer("arp", fields, (end, end)), None, end, end


def _d_ipv4(data, start, end, reg):
    if end - start < 20:
        raise _Malformed
    vihl = data[start]
    if vihl >> 4 != 4:
        raise _Malformed
    ihl = (vihl & 0x0F) * 4
    if ihl < 20 or start + ihl > end:
        raise _Malformed
    total_len, ident = struct.unpack_from(">HH", data, start + 2)
    flags_frag = (data[start + 6] << 8) | data[start + 7]
    ttl = data[start + 8]
    proto = data[start + 9]
    frag_offset = (flags_frag & 0x1FFF) * 8
    fields = {
        "src": Address("ipv4", data[start + 12 : start + 16]),
        "dst": Address("ipv4", data[start + 16 : start + 20]),
        "proto": proto,
        "ttl": ttl,
        "len": total_len,
        "id": ident,
        "frag_offset": frag_offset,
    }
    payload_end = min(start + total_len, end) if total_len >= ihl else end
    nxt = reg.ip_protocols.get(proto) if frag_offset == 0 else None
    return ProtocolLayer("ip", fields, (start + ihl, payload_end)), nxt, start + ihl, payload_end


_IPV6_EXT_HEADERS = frozenset({0, 43, 44, 60})


def _d_ipv6(data, start, end, reg):
    if end - start < 40:
        raise _Malformed
    if data[start] >> 4 != 6:
        raise _Malformed
    plen = (data[start + 4] << 8) | data[start + 5]
    next_header = data[start + 6]
    fields = {
        "src": Address("ipv6", data[start + 8 : start + 24]),
        "dst": Address("ipv6", data[start + 24 : start + 40]),
        "nxt": next_header,
        "hlim": data[start + 7],
        "plen": plen,
    }
    off = start + 40
    payload_end = min(off + plen, end) if plen else end
    fragmented = False
    hops = 0
    while next_header in _IPV6_EXT_HEADERS and hops < 8:
        if off + 8 > payload_end:
            next_header = -1
            break
        nh = data[off]
        if next_header == 44:  # fragment header: fixed 8 bytes
            if (data[off + 2] << 8 | data[off + 3]) & 0xFFF8:
                fragmented = True
            ext_len = 8
        else:
            ext_len = (data[off + 1] + 1) * 8
        if off + ext_len > payload_end:
            next_header = -1
            break
        off += ext_len
        next_header = nh
        hops += 1
    nxt = None if fragmented else reg.ip_protocols.get(next_header)
    return ProtocolLayer("ipv6", fields, (off, payload_end)), nxt, off, payload_end


def _icmp_like(name):
    def dissector(data, start, end, reg):
        if end - start < 4:
            raise _Malformed
        fields = {"type": data[start], "code": data[start + 1]}
        if name == "icmp" and fields["type"] in (0, 8) and end - start >= 8:
            fields["id"], fields["seq"] = struct.unpack_from(">HH", data, start + 4)
        if name == "icmpv6" and fields["type"] in (128, 129) and end - start >= 8:
            fields["id"], fields["seq"] = struct.unpack_from(">HH", data, start + 4)
        return ProtocolLayer(name, fields, (end, end)), None, end, end

    return dissector


_d_icmp = _icmp_like("icmp")
_d_icmpv6 = _icmp_like("icmpv6")


def _d_tcp(data, start, end, reg):
    if end - start < 20:
        raise _Malformed
    sport, dport, seq, ack = struct.unpack_from(">HHII", data, start)
    doff = (data[start + 12] >> 4) * 4
    if doff < 20 or start + doff > end:
        raise _Malformed
    flags = data[start + 13]
    fields = {
        "srcport": sport,
        "dstport": dport,
        "seq": seq,
        "ack": ack,
        "flags": flags,
        "flags.fin": flags & 1,
        "flags.syn": (flags >> 1) & 1,
        "flags.rst": (flags >> 2) & 1,
        "flags.psh": (flags >> 3) & 1,
        "flags.ack": (flags >> 4) & 1,
        "flags.urg": (flags >> 5) & 1,
        "win": (data[start + 14] << 8) | data[start + 15],
    }
    ps = start + doff
    nxt = _payload_resolver(reg, True, sport, dport) if end > ps else None
    return ProtocolLayer("tcp", fields, (ps, end)), nxt, ps, end


def _d_udp(data, start, end, reg):
    if end - start < 8:
        raise _Malformed
    sport, dport, ulen, _cksum = struct.unpack_from(">HHHH", data, start)
    if ulen < 8:
        raise _Malformed
    fields = {"srcport": sport, "dstport": dport, "len": ulen}
    ps = start + 8
    pe = min(start + ulen, end)
    nxt = _payload_resolver(reg, False, sport, dport) if pe > ps else None
    return ProtocolLayer("udp", fields, (ps, pe)), nxt, ps, pe


def _payload_resolver(reg, is_tcp, sport, dport):
    """Transport payload hand-off: port table, then port labels, then probes.

    Application decoders decline (None) on bytes they cannot claim; a declined
    payload stays with the transport layer rather than becoming a data layer.
    """
    table = reg.tcp_ports if is_tcp else reg.udp_ports
    labels = reg.tcp_port_labels if is_tcp else reg.udp_port_labels
    probes = reg.tcp_probes if is_tcp else reg.udp_probes

    def attempt(data, start, end, inner_reg):
        dissector = table.get(dport) or table.get(sport)
        if dissector is not None:
            decoded = _quietly(dissector, data, start, end, inner_reg)
            if decoded is not None:
                return decoded
        label = labels.get(dport) or labels.get(sport)
        if label is not None:
            return ProtocolLayer(label, {}, (end, end)), None, end, end
        for probe in probes:
            decoded = _quietly(probe, data, start, end, inner_reg)
            if decoded is not None:
                return decoded
        return None

    return attempt


def _quietly(dissector, data, start, end, reg):
    try:
        return dissector(data, start, end, reg)
    except Exception:
        return None


# ---------------------------------------------------------------------------
# Application decoders (all decline rather than raise)
# ---------------------------------------------------------------------------


def _dns_name(data, off, end, msg_start):
    """Decode a possibly-compressed DNS name; returns (name, next_offset) or None."""
    labels = []
    jumped_ret = -1
    hops = 0
    while True:
        if off >= end or hops > 40:
            return None
        length = data[off]
        if length == 0:
            off += 1
            break
        if length & 0xC0 == 0xC0:
            if off + 1 >= end:
                return None
            if jumped_ret < 0:
                jumped_ret = off + 2
            off = msg_start + (((length & 0x3F) << 8) | data[off + 1])
            hops += 1
            continue
        if length & 0xC0:
            return None
        if off + 1 + length > end or len(labels) > 127:
            return None
        labels.append(data[off + 1 : off + 1 + length].decode("ascii", "replace"))
        off += 1 + length
    name = ".".join(labels) if labels else "<root>"
    return name, (jumped_ret if jumped_ret >= 0 else off)


_DNS_QTYPE_NAMES = {
    1: "A", 2: "NS", 5: "CNAME", 6: "SOA", 12: "PTR", 15: "MX", 16: "TXT",
    28: "AAAA", 33: "SRV", 255: "ANY",
}


def _dns_like(name, tcp_framed=False):
    def dissector(data, start, end, reg):
        msg_start = start
        if tcp_framed:
            if end - start < 14:
                return None
            declared = (data[start] << 8) | data[start + 1]
            if declared < 12:
                return None
            msg_start = start + 2
            end = min(end, msg_start + declared)
        if end - msg_start < 12:
            return None
        ident, flags, qd, an, ns, ar = struct.unpack_from(">HHHHHH", data, msg_start)
        if qd > 32 or an > 512 or ns > 512 or ar > 512:
            return None
        fields = {
            "id": ident,
            "qr": flags >> 15,
            "opcode": (flags >> 11) & 0xF,
            "rcode": flags & 0xF,
            "qd": qd,
            "an": an,
        }
        if qd:
            parsed = _dns_name(data, msg_start + 12, end, msg_start)
            if parsed is None:
                return None
            qname, off = parsed
            if off + 4 > end:
                return None
            fields["qry.name"] = qname
            fields["qry.type"] = (data[off] << 8) | data[off + 1]
        return ProtocolLayer(name, fields, (end, end)), None, end, end

    return dissector


_d_dns = _dns_like("dns")
_d_mdns = _dns_like("mdns")
_d_dns_tcp = _dns_like("dns", tcp_framed=True)

_DHCP_COOKIE = b"\x63\x82\x53\x63"
_DHCP_TYPE_NAMES = {
    1: "Discover", 2: "Offer", 3: "Request", 4: "Decline",
    5: "ACK", 6: "NAK", 7: "Release", 8: "Inform",
}


def _d_dhcp(data, start, end, reg):
    if end - start < 240 or data[start + 236 : start + 240] != _DHCP_COOKIE:
        return None
    fields = {"op": data[start], "xid": struct.unpack_from(">I", data, start + 4)[0]}
    off = start + 240
    while off + 2 <= end:
        code = data[off]
        if code == 255:
            break
        if code == 0:
            off += 1
            continue
        length = data[off + 1]
        if off + 2 + length > end:
            break
        if code == 53 and length >= 1:
            fields["msg_type"] = data[off + 2]
        off += 2 + length
    return ProtocolLayer("dhcp", fields, (end, end)), None, end, end


def _d_dhcpv6(data, start, end, reg):
    if end - start < 4:
        return None
    msg_type = data[start]
    if not 1 <= msg_type <= 13:
        return None
    xid = int.from_bytes(data[start + 1 : start + 4], "big")
    fields = {"msg_type": msg_type, "xid": xid}
    return ProtocolLayer("dhcpv6", fields, (end, end)), None, end, end


def _d_ntp(data, start, end, reg):
    if end - start < 48:
        return None
    first = data[start]
    version = (first >> 3) & 0x7
    mode = first & 0x7
    if not 1 <= version <= 4:
        return None
    fields = {"version": version, "mode": mode, "stratum": data[start + 1]}
    return ProtocolLayer("ntp", fields, (end, end)), None, end, end


_HTTP_METHODS = (
    b"GET ", b"POST ", b"PUT ", b"HEAD ", b"DELETE ", b"OPTIONS ", b"PATCH ",
    b"TRACE ", b"CONNECT ",
)


def _d_http(data, start, end, reg):
    head = bytes(data[start : min(end, start + 2048)])
    is_response = head.startswith(b"HTTP/")
    if not is_response and not head.startswith(_HTTP_METHODS):
        return None
    line_end = head.find(b"\r\n")
    if line_end < 0:
        line_end = head.find(b"\n")
        if line_end < 0:
            line_end = len(head)
    first_line = head[:line_end].decode("latin-1")
    fields = {}
    parts = first_line.split(" ", 2)
    if is_response:
        if len(parts) < 2 or not parts[1][:3].isdigit():
            return None
        fields["response.version"] = parts[0]
        fields["response.code"] = int(parts[1][:3])
        fields["response.phrase"] = parts[2] if len(parts) > 2 else ""
    else:
        if len(parts) < 3 or not parts[2].startswith("HTTP/"):
            return None
        fields["request.method"] = parts[0]
        fields["request.uri"] = parts[1]
        fields["request.version"] = parts[2]
        host_at = head.find(b"\r\nHost: ")
        if host_at >= 0:
            host_end = head.find(b"\r\n", host_at + 8)
            if host_end > 0:
                fields["host"] = head[host_at + 8 : host_end].decode("latin-1")
    body_at = head.find(b"\r\n\r\n")
    span_start = start + body_at + 4 if body_at >= 0 else end
    return ProtocolLayer("http", fields, (span_start, end)), None, end, end


_TLS_HANDSHAKE_NAMES = {
    1: "Client Hello", 2: "Server Hello", 4: "New Session Ticket",
    11: "Certificate", 12: "Server Key Exchange", 14: "Server Hello Done",
    16: "Client Key Exchange", 20: "Finished",
}


def _d_tls(data, start, end, reg):
    if end - start < 5:
        return None
    content_type = data[start]
    if content_type not in (20, 21, 22, 23):
        return None
    if data[start + 1] != 3 or data[start + 2] > 4:
        return None
    rec_len = (data[start + 3] << 8) | data[start + 4]
    if rec_len == 0 or start + 5 + rec_len > end:
        return None
    fields = {
        "record.type": content_type,
        "record.version": (data[start + 1] << 8) | data[start + 2],
        "record.len": rec_len,
    }
    if content_type == 22:
        fields["handshake.type"] = data[start + 5]
    return ProtocolLayer("tls", fields, (end, end)), None, end, end


def _d_ssh(data, start, end, reg):
    fields = {}
    if data[start : start + 4] == b"SSH-":
        line_end = data.find(b"\n", start, min(end, start + 256))
        banner = bytes(data[start : line_end if line_end > 0 else min(end, start + 256)])
        fields["banner"] = banner.rstrip(b"\r").decode("latin-1")
    return ProtocolLayer("ssh", fields, (end, end)), None, end, end


def _line_proto(name):
    """FTP/SMTP-style text command/reply decoder; declines on non-text payloads."""

    def dissector(data, start, end, reg):
        line_end = data.find(b"\r\n", start, min(end, start + 512))
        if line_end < 0:
            return None
        raw = bytes(data[start:line_end])
        if not raw or any(b < 0x20 and b != 0x09 for b in raw):
            return None
        line = raw.decode("latin-1")
        fields = {}
        if len(line) >= 3 and line[:3].isdigit():
            fields["code"] = int(line[:3])
            fields["message"] = line[4:] if len(line) > 4 else ""
        else:
            command, _, argument = line.partition(" ")
            if not command.isalpha() or len(command) > 16:
                return None
            fields["command"] = command.upper()
            if argument:
                fields["arg"] = argument
        return ProtocolLayer(name, fields, (end, end)), None, end, end

    return dissector


_d_ftp = _line_proto("ftp")
_d_smtp = _line_proto("smtp")


def _ber_length(data, off, end):
    if off >= end:
        return None
    first = data[off]
    if first < 0x80:
        return first, off + 1
    count = first & 0x7F
    if count == 0 or count > 4 or off + 1 + count > end:
        return None
    return int.from_bytes(data[off + 1 : off + 1 + count], "big"), off + 1 + count


def _d_snmp(data, start, end, reg):
    if end - start < 8 or data[start] != 0x30:
        return None
    parsed = _ber_length(data, start + 1, end)
    if parsed is None:
        return None
    _msg_len, off = parsed
    if off >= end or data[off] != 0x02:  # INTEGER version
        return None
    parsed = _ber_length(data, off + 1, end)
    if parsed is None:
        return None
    ver_len, off = parsed
    if ver_len != 1 or off >= end:
        return None
    version = data[off]
    if version not in (0, 1, 3):
        return None
    fields = {"version": version}
    off += 1
    if version in (0, 1) and off < end and data[off] == 0x04:  # community string
        parsed = _ber_length(data, off + 1, end)
        if parsed is None:
            return None
        com_len, off = parsed
        if off + com_len > end:
            return None
        fields["community"] = data[off : off + com_len].decode("latin-1")
        off += com_len
    if off < end and 0xA0 <= data[off] <= 0xA8:
        fields["pdu_type"] = data[off] & 0x0F
    return ProtocolLayer("snmp", fields, (end, end)), None, end, end


# ---------------------------------------------------------------------------
# Label-only port coverage (no field extraction, protocol identity only)
# ---------------------------------------------------------------------------

TCP_PORT_LABELS = {
    7: "echo", 9: "discard", 13: "daytime", 19: "chargen", 23: "telnet",
    37: "time", 43: "whois", 70: "gopher", 79: "finger", 88: "kerberos",
    110: "pop3", 111: "portmap", 113: "ident", 119: "nntp", 135: "dcerpc",
    139: "nbss", 143: "imap", 179: "bgp", 389: "ldap", 445: "smb",
    465: "smtps", 513: "rlogin", 515: "lpd", 554: "rtsp", 631: "ipp",
    636: "ldaps", 853: "dot", 873: "rsync", 990: "ftps", 993: "imaps",
    995: "pop3s", 1080: "socks", 1433: "mssql", 1521: "tns", 1723: "pptp",
    1883: "mqtt", 2049: "nfs", 2181: "zookeeper", 2375: "docker",
    3260: "iscsi", 3306: "mysql", 3389: "rdp", 3690: "svn", 5060: "sip",
    5222: "xmpp", 5432: "postgres", 5672: "amqp", 5900: "vnc",
    5984: "couchdb", 6379: "redis", 6667: "irc", 8086: "influxdb",
    8333: "bitcoin", 9092: "kafka", 9100: "pdl", 9200: "elasticsearch",
    9418: "git", 11211: "memcached", 27017: "mongodb",
}

UDP_PORT_LABELS = {
    7: "echo", 19: "chargen", 37: "time", 49: "tacacs", 69: "tftp",
    88: "kerberos", 111: "portmap", 137: "nbns", 138: "nbdgm",
    443: "quic", 500: "isakmp", 514: "syslog", 520: "rip", 521: "ripng",
    623: "ipmi", 1194: "openvpn", 1701: "l2tp", 1812: "radius",
    1813: "radius", 1900: "ssdp", 3478: "stun", 4500: "isakmp",
    4789: "vxlan", 5004: "rtp", 5005: "rtcp", 5060: "sip", 5355: "llmnr",
    5683: "coap", 6081: "geneve", 51820: "wireguard",
}

_CORE_PROTOCOLS = frozenset(
    {
        "eth", "vlan", "null", "sll", "arp", "ip", "ipv6", "icmp", "icmpv6",
        "tcp", "udp", "dns", "mdns", "dhcp", "dhcpv6", "ntp", "http", "tls",
        "ssh", "ftp", "smtp", "snmp", "data",
    }
)

# Link-layer type codes (pcap LINKTYPE_*).
LINKTYPE_NULL = 0
LINKTYPE_ETHERNET = 1
LINKTYPE_RAW = 101
LINKTYPE_LINUX_SLL = 113

_default_registry: DissectorRegistry | None = None


def build_registry() -> DissectorRegistry:
    reg = DissectorRegistry(core_protocols=_CORE_PROTOCOLS)
    reg.link_types = {
        LINKTYPE_NULL: _d_null,
        LINKTYPE_ETHERNET: _d_eth,
        LINKTYPE_RAW: _d_rawip,
        LINKTYPE_LINUX_SLL: _d_sll,
    }
    reg.ethertypes = {
        0x0800: _d_ipv4,
        0x0806: _d_arp,
        0x8100: _d_vlan,
        0x86DD: _d_ipv6,
    }
    reg.ip_protocols = {
        1: _d_icmp,
        4: _d_ipv4,  # ip-in-ip
        6: _d_tcp,
        17: _d_udp,
        41: _d_ipv6,
        58: _d_icmpv6,
    }
    reg.tcp_ports = {
        21: _d_ftp,
        22: _d_ssh,
        25: _d_smtp,
        53: _d_dns_tcp,
        80: _d_http,
        443: _d_tls,
        587: _d_smtp,
        8080: _d_http,
        8443: _d_tls,
    }
    reg.udp_ports = {
        53: _d_dns,
        67: _d_dhcp,
        68: _d_dhcp,
        123: _d_ntp,
        161: _d_snmp,
        162: _d_snmp,
        546: _d_dhcpv6,
        547: _d_dhcpv6,
        5353: _d_mdns,
    }
    reg.tcp_port_labels = dict(TCP_PORT_LABELS)
    reg.udp_port_labels = dict(UDP_PORT_LABELS)
    reg.tcp_probes = [_d_http, _d_tls]
    reg.udp_probes = []
    return reg


def default_registry() -> DissectorRegistry:
    global _default_registry
    if _default_registry is None:
        _default_registry = build_registry()
    return _default_registry


# ---------------------------------------------------------------------------
# Engine
# ---------------------------------------------------------------------------


def dissect(record: RawPacketRecord, registry: DissectorRegistry | None = None) -> DissectedPacket:
    """Decode one record into ordered layers; total over arbitrary bytes."""
    reg = registry if registry is not None else default_registry()
    data = record.data
    end = len(data)
    layers: list[ProtocolLayer] = []

    dissector = reg.link_types.get(record.link_type)
    if dissector is None or end == 0:
        layers.append(ProtocolLayer("data", {}, (0, end)))
    else:
        start = 0
        while dissector is not None and len(layers) < MAX_LAYERS:
            try:
                decoded = dissector(data, start, end, reg)
            except Exception:
                decoded = _MALFORMED_SENTINEL
            if decoded is None:
                break
            if decoded is _MALFORMED_SENTINEL:
                if end > start or not layers:
                    layers.append(ProtocolLayer("data", {}, (start, end)))
                break
            layer, dissector, nstart, nend = decoded
            layers.append(layer)
            if nstart >= nend:
                break
            start, end = nstart, nend
        if not layers:
            layers.append(ProtocolLayer("data", {}, (0, len(data))))

    src = dst = None
    for layer in layers:
        proto = layer.protocol
        if proto == "ip" or proto == "ipv6":
            src = layer.fields.get("src")
            dst = layer.fields.get("dst")
    if src is None and layers[0].protocol == "eth":
        src = layers[0].fields.get("src")
        dst = layers[0].fields.get("dst")

    packet = DissectedPacket(
        index=record.index,
        ts_ns=record.ts_ns,
        layers=layers,
        label=layers[-1].protocol,
        src_addr=src,
        dst_addr=dst,
        length=record.original_length,
        info="",
    )
    packet.info = summarize(packet)
    return packet


_MALFORMED_SENTINEL = object()


def label_of(packet: DissectedPacket) -> str:
    """Protocol identity of a packet: its topmost dissected layer."""
    return packet.layers[-1].protocol


def dissect_all(
    capture: RawCapture,
    progress_sink: ProgressSink | None = None,
    registry: DissectorRegistry | None = None,
) -> list[DissectedPacket]:
    """Order-preserving dissection of every record, chunked and cancellable.

    The sink receives (packets_done, packets_done, total_packets) at least
    once per chunk; returning False cancels, yielding the partial list.
    """
    reg = registry if registry is not None else default_registry()
    records = capture.records
    total = len(records)
    out: list[DissectedPacket] = []
    for record in records:
        out.append(dissect(record, reg))
        done = len(out)
        if progress_sink is not None and done % PROGRESS_CHUNK_RECORDS == 0:
            if progress_sink(done, done, total) is False:
                return out
    if progress_sink is not None:
        progress_sink(len(out), len(out), total)
    return out


# ---------------------------------------------------------------------------
# Packet-list Info column
# ---------------------------------------------------------------------------


def _transport_ports(packet):
    for layer in packet.layers:
        if layer.protocol in ("tcp", "udp"):
            return layer.fields.get("srcport"), layer.fields.get("dstport")
    return None, None


def _sum_dns(packet, layer):
    f = layer.fields
    kind = "Standard query response" if f.get("qr") else "Standard query"
    qtype = _DNS_QTYPE_NAMES.get(f.get("qry.type"), "")
    name = f.get("qry.name", "")
    return " ".join(p for p in (kind, f"0x{f.get('id', 0):04x}", qtype, name) if p)


def _sum_tcp(packet, layer):
    f = layer.fields
    names = ("FIN", "SYN", "RST", "PSH", "ACK", "URG")
    bits = [names[i] for i in range(6) if f.get("flags", 0) >> i & 1]
    return (
        f"{f.get('srcport')} → {f.get('dstport')} [{', '.join(bits)}] "
        f"Seq={f.get('seq')} Win={f.get('win')}"
    )


def _sum_udp(packet, layer):
    f = layer.fields
    return f"{f.get('srcport')} → {f.get('dstport')} Len={f.get('len', 0) - 8}"


def _sum_http(packet, layer):
    f = layer.fields
    if "response.code" in f:
        return f"{f.get('response.version', 'HTTP/1.1')} {f['response.code']} {f.get('response.phrase', '')}".rstrip()
    return f"{f.get('request.method')} {f.get('request.uri')} {f.get('request.version')}"


_TLS_CONTENT_NAMES = {20: "Change Cipher Spec", 21: "Alert", 23: "Application Data"}


def _sum_tls(packet, layer):
    f = layer.fields
    if f.get("record.type") == 22:
        return _TLS_HANDSHAKE_NAMES.get(f.get("handshake.type"), "Handshake")
    return _TLS_CONTENT_NAMES.get(f.get("record.type"), "TLS record")


def _sum_arp(packet, layer):
    f = layer.fields
    if "src_proto" not in f:
        return f"ARP opcode {f.get('opcode')}"
    if f.get("opcode") == 1:
        return f"Who has {f['dst_proto']}? Tell {f['src_proto']}"
    if f.get("opcode") == 2:
        return f"{f['src_proto']} is at {f['src_hw']}"
    return f"ARP opcode {f.get('opcode')}"


_ICMP_TYPE_NAMES = {
    0: "Echo (ping) reply", 3: "Destination unreachable", 5: "Redirect",
    8: "Echo (ping) request", 11: "Time-to-live exceeded",
}
_ICMPV6_TYPE_NAMES = {
    128: "Echo (ping) request", 129: "Echo (ping) reply",
    133: "Router solicitation", 134: "Router advertisement",
    135: "Neighbor solicitation", 136: "Neighbor advertisement",
}


def _sum_icmp(packet, layer):
    names = _ICMP_TYPE_NAMES if layer.protocol == "icmp" else _ICMPV6_TYPE_NAMES
    f = layer.fields
    text = names.get(f.get("type"), f"Type {f.get('type')} code {f.get('code')}")
    if "id" in f:
        text += f" id=0x{f['id']:04x}, seq={f['seq']}"
    return text


def _sum_ssh(packet, layer):
    banner = layer.fields.get("banner")
    if banner:
        return f"Protocol: {banner}"
    return "Encrypted packet"


def _sum_line(packet, layer):
    f = layer.fields
    if "code" in f:
        return f"Response: {f['code']} {f.get('message', '')}".rstrip()
    arg = f.get("arg")
    return f"Request: {f['command']} {arg}" if arg else f"Request: {f['command']}"


_NTP_MODE_NAMES = {
    1: "symmetric active", 2: "symmetric passive", 3: "client",
    4: "server", 5: "broadcast",
}


def _sum_ntp(packet, layer):
    f = layer.fields
    mode = _NTP_MODE_NAMES.get(f.get("mode"), f"mode {f.get('mode')}")
    return f"NTP Version {f.get('version')}, {mode}"


def _sum_dhcp(packet, layer):
    name = _DHCP_TYPE_NAMES.get(layer.fields.get("msg_type"))
    return f"DHCP {name}" if name else "DHCP (BOOTP)"


_SNMP_PDU_NAMES = {
    0: "get-request", 1: "get-next-request", 2: "get-response",
    3: "set-request", 4: "trap", 5: "get-bulk-request", 7: "trap",
}


def _sum_snmp(packet, layer):
    f = layer.fields
    version = {0: "v1", 1: "v2c", 3: "v3"}.get(f.get("version"), "")
    pdu = _SNMP_PDU_NAMES.get(f.get("pdu_type"), "")
    return f"SNMP{version} {pdu}".rstrip()


def _sum_ip(packet, layer):
    f = layer.fields
    if f.get("frag_offset"):
        return f"Fragmented IPv4 (offset {f['frag_offset']})"
    return f"IPv4, protocol {f.get('proto')}"


def _sum_ipv6(packet, layer):
    return f"IPv6, next header {layer.fields.get('nxt')}"


def _sum_eth(packet, layer):
    return f"Ethernet frame, type 0x{layer.fields.get('type', 0):04x}"


def _sum_dhcpv6(packet, layer):
    return f"DHCPv6 message type {layer.fields.get('msg_type')}"


_SUMMARIZERS = {
    "dns": _sum_dns, "mdns": _sum_dns, "tcp": _sum_tcp, "udp": _sum_udp,
    "http": _sum_http, "tls": _sum_tls, "arp": _sum_arp, "icmp": _sum_icmp,
    "icmpv6": _sum_icmp, "ssh": _sum_ssh, "ftp": _sum_line, "smtp": _sum_line,
    "ntp": _sum_ntp, "dhcp": _sum_dhcp, "dhcpv6": _sum_dhcpv6,
    "snmp": _sum_snmp, "ip": _sum_ip, "ipv6": _sum_ipv6, "eth": _sum_eth,
}


def summarize(packet: DissectedPacket) -> str:
    """Deterministic one-line summary for the packet-list Info column."""
    top = packet.layers[-1]
    fn = _SUMMARIZERS.get(top.protocol)
    if fn is not None:
        return fn(packet, top)
    if top.protocol == "data":
        span = top.payload_span
        return f"Data ({span[1] - span[0]} bytes)"
    sport, dport = _transport_ports(packet)
    if sport is not None:
        return f"{top.protocol.upper()} {sport} → {dport}"
    return top.protocol.upper()


# ---------------------------------------------------------------------------
# Display-filter field namespace (the stable contract consumed by filters)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FieldSpec:
    """One filterable field: its value type and where instances come from."""

    name: str
    value_type: str  # "int" | "text" | "mac" | "ipv4" | "ipv6"
    sources: tuple[tuple[str, str], ...]  # (layer protocol, field key) pairs


def _spec(name, value_type, *sources):
    return FieldSpec(name, value_type, tuple(sources))


DISPLAY_FIELDS: dict[str, FieldSpec] = {
    s.name: s
    for s in (
        _spec("eth.addr", "mac", ("eth", "src"), ("eth", "dst")),
        _spec("eth.src", "mac", ("eth", "src")),
        _spec("eth.dst", "mac", ("eth", "dst")),
        _spec("ip.addr", "ipv4", ("ip", "src"), ("ip", "dst")),
        _spec("ip.src", "ipv4", ("ip", "src")),
        _spec("ip.dst", "ipv4", ("ip", "dst")),
        _spec("ipv6.addr", "ipv6", ("ipv6", "src"), ("ipv6", "dst")),
        _spec("tcp.port", "int", ("tcp", "srcport"), ("tcp", "dstport")),
        _spec("tcp.srcport", "int", ("tcp", "srcport")),
        _spec("tcp.dstport", "int", ("tcp", "dstport")),
        _spec("tcp.flags.syn", "int", ("tcp", "flags.syn")),
        _spec("udp.port", "int", ("udp", "srcport"), ("udp", "dstport")),
        _spec("udp.srcport", "int", ("udp", "srcport")),
        _spec("udp.dstport", "int", ("udp", "dstport")),
        _spec("dns.qry.name", "text", ("dns", "qry.name")),
        _spec("frame.len", "int", ("frame", "len")),
        _spec("frame.number", "int", ("frame", "number")),
    )
}
