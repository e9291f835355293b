"""Capture file ingestion: magic-byte format detection and PCAP/PCAPNG decoding.

Both decoders normalize timestamps to integer nanoseconds since the epoch,
enforce the 100,000-record safeguard, and report progress in bounded chunks
so callers can keep a UI responsive or cancel mid-parse. Parsing never reads
past the end of the input buffer: arbitrary bytes yield a RawCapture or a
typed error, never a crash.
"""

from __future__ import annotations

import enum
import struct
from dataclasses import dataclass, field
from typing import Callable

PACKET_SAFEGUARD = 100_000
PROGRESS_CHUNK_RECORDS = 4096

# Magic values as they appear in the first four file bytes.
_MAGIC_LE_MICRO = b"\xd4\xc3\xb2\xa1"
_MAGIC_BE_MICRO = b"\xa1\xb2\xc3\xd4"
_MAGIC_LE_NANO = b"\x4d\x3c\xb2\xa1"
_MAGIC_BE_NANO = b"\xa1\xb2\x3c\x4d"
_MAGIC_PCAPNG = b"\x0a\x0d\x0d\x0a"

_PCAP_MAGIC_MICRO = 0xA1B2C3D4
_PCAP_MAGIC_NANO = 0xA1B23C4D

_BLOCK_SHB = 0x0A0D0D0A
_BLOCK_IDB = 0x00000001
_BLOCK_SPB = 0x00000003
_BLOCK_EPB = 0x00000006

_NS_PER_SECOND = 1_000_000_000

# Progress callback: (records_parsed, bytes_consumed, total_bytes).
# Returning False cancels the job at the next chunk boundary.
ProgressSink = Callable[[int, int, int], object]


class CaptureError(Exception):
    """Base class for typed ingestion failures."""


class FormatError(CaptureError):
    """The leading magic bytes match no supported capture format."""

    def __init__(self, magic_hex: str):
        self.magic_hex = magic_hex
        super().__init__(f"unrecognized capture format (magic bytes {magic_hex or '<none>'})")


class HeaderError(CaptureError):
    """The file-level header is missing, short, or internally inconsistent."""


class BlockError(CaptureError):
    """A PCAPNG block carries an impossible declared length."""

    def __init__(self, offset: int, message: str):
        self.offset = offset
        super().__init__(f"bad block at offset {offset}: {message}")


class FormatKind(enum.Enum):
    PCAP_MICROSECONDS = "pcap-us"
    PCAP_NANOSECONDS = "pcap-ns"
    PCAPNG = "pcapng"


class ByteOrder(enum.Enum):
    LITTLE = "little"
    BIG = "big"


@dataclass(frozen=True, slots=True)
class CaptureFormat:
    kind: FormatKind
    byte_order: ByteOrder | None  # None for PCAPNG (byte order is per-section)


@dataclass(slots=True)
class RawPacketRecord:
    """One captured frame, immutable once the owning RawCapture is returned."""

    index: int
    ts_ns: int  # nanoseconds since the epoch, normalized from the source resolution
    captured_length: int
    original_length: int
    link_type: int
    interface_id: int
    data: bytes

    @property
    def timestamp(self) -> float:
        """Timestamp in seconds (lossy float; ts_ns is the exact value)."""
        return self.ts_ns / _NS_PER_SECOND


@dataclass(frozen=True, slots=True)
class InterfaceDescription:
    interface_id: int
    link_type: int
    timestamp_resolution: int  # ticks per second, > 0
    name: str | None = None


@dataclass(frozen=True, slots=True)
class Diagnostic:
    """Where and why decoding stopped short of end-of-file."""

    offset: int
    reason: str


@dataclass(slots=True)
class RawCapture:
    format: CaptureFormat
    records: list[RawPacketRecord]
    interfaces: list[InterfaceDescription]
    truncated_at_safeguard: bool = False
    malformed_tail: Diagnostic | None = None
    warnings: list[str] = field(default_factory=list)
    cancelled: bool = False


def detect_format(prefix: bytes) -> CaptureFormat:
    """Classify a capture by its first four bytes alone.

    Raises FormatError carrying the detected bytes as uppercase hex when the
    magic matches neither legacy PCAP variant nor the PCAPNG section header.
    """
    magic = bytes(prefix[:4])
    if len(magic) < 4:
        raise FormatError(magic.hex().upper())
    if magic == _MAGIC_LE_MICRO:
        return CaptureFormat(FormatKind.PCAP_MICROSECONDS, ByteOrder.LITTLE)
    if magic == _MAGIC_BE_MICRO:
        return CaptureFormat(FormatKind.PCAP_MICROSECONDS, ByteOrder.BIG)
    if magic == _MAGIC_LE_NANO:
        return CaptureFormat(FormatKind.PCAP_NANOSECONDS, ByteOrder.LITTLE)
    if magic == _MAGIC_BE_NANO:
        return CaptureFormat(FormatKind.PCAP_NANOSECONDS, ByteOrder.BIG)
    if magic == _MAGIC_PCAPNG:
        return CaptureFormat(FormatKind.PCAPNG, None)
    raise FormatError(magic.hex().upper())


def parse_capture(data: bytes, progress_sink: ProgressSink | None = None) -> RawCapture:
    """Detect the format and decode; the single entry point used by sessions."""
    if len(data) < 4:
        raise FormatError(data.hex().upper())
    fmt = detect_format(data)
    if fmt.kind is FormatKind.PCAPNG:
        return parse_pcapng(data, progress_sink)
    return parse_pcap(data, fmt, progress_sink)


def parse_pcap(
    data: bytes, fmt: CaptureFormat, progress_sink: ProgressSink | None = None
) -> RawCapture:
    """Decode a legacy PCAP byte stream (either byte order, us or ns resolution)."""
    if fmt.kind is FormatKind.PCAPNG:
        raise ValueError("parse_pcap handles legacy PCAP only")
    if len(data) < 24:
        raise HeaderError(f"global header needs 24 bytes, file has {len(data)}")

    endian = "<" if fmt.byte_order is ByteOrder.LITTLE else ">"
    magic, _vmaj, _vmin, _zone, _sigfigs, _snaplen, network = struct.unpack_from(
        endian + "IHHiIII", data, 0
    )
    want_magic = (
        _PCAP_MAGIC_NANO if fmt.kind is FormatKind.PCAP_NANOSECONDS else _PCAP_MAGIC_MICRO
    )
    if magic != want_magic:
        raise HeaderError(f"magic 0x{magic:08X} does not match declared format")
    frac_scale = 1 if fmt.kind is FormatKind.PCAP_NANOSECONDS else 1000

    rec_header = struct.Struct(endian + "IIII")
    records: list[RawPacketRecord] = []
    warnings: list[str] = []
    malformed: Diagnostic | None = None
    truncated = False
    cancelled = False

    total = len(data)
    offset = 24
    since_report = 0
    while offset < total:
        if len(records) >= PACKET_SAFEGUARD:
            if total - offset >= 16:
                truncated = True
            else:
                malformed = Diagnostic(offset, "trailing bytes after final record")
            break
        if total - offset < 16:
            malformed = Diagnostic(offset, "truncated record header")
            break
        ts_sec, ts_frac, incl_len, orig_len = rec_header.unpack_from(data, offset)
        start = offset + 16
        if incl_len > total - start:
            malformed = Diagnostic(offset, "record data extends past end of file")
            break
        idx = len(records)
        records.append(
            RawPacketRecord(
                index=idx,
                ts_ns=ts_sec * _NS_PER_SECOND + ts_frac * frac_scale,
                captured_length=incl_len,
                original_length=orig_len,
                link_type=network,
                interface_id=0,
                data=data[start : start + incl_len],
            )
        )
        if incl_len > orig_len:
            warnings.append(
                f"record {idx}: captured_length {incl_len} exceeds original_length {orig_len}"
            )
        offset = start + incl_len
        since_report += 1
        if progress_sink is not None and since_report >= PROGRESS_CHUNK_RECORDS:
            since_report = 0
            if progress_sink(len(records), offset, total) is False:
                cancelled = True
                break
    if progress_sink is not None and not cancelled:
        progress_sink(len(records), offset, total)

    resolution = 1_000_000_000 if fmt.kind is FormatKind.PCAP_NANOSECONDS else 1_000_000
    return RawCapture(
        format=fmt,
        records=records,
        interfaces=[InterfaceDescription(0, network, resolution)],
        truncated_at_safeguard=truncated,
        malformed_tail=malformed,
        warnings=warnings,
        cancelled=cancelled,
    )


def _parse_idb_options(body: bytes, endian: str) -> tuple[int, str | None]:
    """Extract (ticks_per_second, name) from interface description options."""
    resolution = 1_000_000
    name = None
    off = 8  # linktype(2) + reserved(2) + snaplen(4)
    while off + 4 <= len(body):
        code, length = struct.unpack_from(endian + "HH", body, off)
        off += 4
        if code == 0:
            break
        value = body[off : off + length]
        if len(value) < length:
            break
        if code == 9 and length >= 1:  # if_tsresol
            raw = value[0]
            exponent = raw & 0x7F
            if exponent <= 64:  # reject absurd exponents rather than build giant ints
                resolution = (2 if raw & 0x80 else 10) ** exponent
        elif code == 2:  # if_name
            name = value.decode("utf-8", "replace")
        off += (length + 3) & ~3
    return max(resolution, 1), name


def parse_pcapng(data: bytes, progress_sink: ProgressSink | None = None) -> RawCapture:
    """Decode a PCAPNG byte stream: SHB/IDB/EPB/SPB handled, other blocks skipped."""
    total = len(data)
    if total < 12 or data[:4] != _MAGIC_PCAPNG:
        raise HeaderError("input does not begin with a section header block")

    fmt = CaptureFormat(FormatKind.PCAPNG, None)
    records: list[RawPacketRecord] = []
    interfaces: list[InterfaceDescription] = []
    warnings: list[str] = []
    malformed: Diagnostic | None = None
    truncated = False
    cancelled = False

    endian = "<"
    section_ifaces: list[InterfaceDescription] = []
    offset = 0
    since_report = 0
    first_block = True

    def bad_block(off: int, why: str) -> Diagnostic:
        err = BlockError(off, why)
        return Diagnostic(off, str(err))

    while offset < total:
        if total - offset < 12:
            malformed = Diagnostic(offset, "truncated block header")
            break
        if data[offset : offset + 4] == _MAGIC_PCAPNG:
            # New section: byte order comes from this section's byte-order magic.
            bom = data[offset + 8 : offset + 12]
            if bom == b"\x4d\x3c\x2b\x1a":
                endian = "<"
            elif bom == b"\x1a\x2b\x3c\x4d":
                endian = ">"
            else:
                if first_block:
                    raise HeaderError(f"invalid byte-order magic {bom.hex()}")
                malformed = Diagnostic(offset, "invalid byte-order magic in new section")
                break
            section_ifaces = []
            btype = _BLOCK_SHB
        else:
            btype = struct.unpack_from(endian + "I", data, offset)[0]

        (total_len,) = struct.unpack_from(endian + "I", data, offset + 4)
        if total_len < 12 or total_len % 4 != 0:
            if first_block:
                raise HeaderError(f"section header block length {total_len} is invalid")
            malformed = bad_block(offset, f"declared length {total_len}")
            break
        if total_len > total - offset:
            malformed = Diagnostic(offset, "block extends past end of file")
            break
        if first_block and total_len < 28:
            raise HeaderError("section header block too short")
        first_block = False

        body = data[offset + 8 : offset + total_len - 4]

        if btype == _BLOCK_IDB and len(body) >= 8:
            link_type = struct.unpack_from(endian + "H", body, 0)[0]
            resolution, name = _parse_idb_options(body, endian)
            iface = InterfaceDescription(len(section_ifaces), link_type, resolution, name)
            section_ifaces.append(iface)
            interfaces.append(iface)
        elif btype in (_BLOCK_EPB, _BLOCK_SPB):
            if len(records) >= PACKET_SAFEGUARD:
                truncated = True
                break
            if btype == _BLOCK_EPB:
                if len(body) < 20:
                    malformed = Diagnostic(offset, "enhanced packet block too short")
                    break
                iface_id, ts_high, ts_low, cap_len, orig_len = struct.unpack_from(
                    endian + "IIIII", body, 0
                )
                if cap_len > len(body) - 20:
                    malformed = Diagnostic(offset, "captured length exceeds block size")
                    break
                payload = body[20 : 20 + cap_len]
            else:
                if len(body) < 4:
                    malformed = Diagnostic(offset, "simple packet block too short")
                    break
                iface_id = 0
                (orig_len,) = struct.unpack_from(endian + "I", body, 0)
                cap_len = min(orig_len, len(body) - 4)
                payload = body[4 : 4 + cap_len]
                ts_high = ts_low = 0
            if iface_id < len(section_ifaces):
                iface = section_ifaces[iface_id]
            else:
                warnings.append(
                    f"record {len(records)}: interface {iface_id} not defined; "
                    "assuming microsecond resolution"
                )
                iface = InterfaceDescription(iface_id, 1, 1_000_000)
            ticks = (ts_high << 32) | ts_low
            ts_ns = ticks * _NS_PER_SECOND // iface.timestamp_resolution
            records.append(
                RawPacketRecord(
                    index=len(records),
                    ts_ns=ts_ns,
                    captured_length=cap_len,
                    original_length=orig_len,
                    link_type=iface.link_type,
                    interface_id=iface_id,
                    data=payload,
                )
            )
            if cap_len > orig_len:
                warnings.append(
                    f"record {len(records) - 1}: captured_length {cap_len} "
                    f"exceeds original_length {orig_len}"
                )
        # Any other block type (NRB, ISB, custom, ...) is skipped by length.

        offset += total_len
        since_report += 1
        if progress_sink is not None and since_report >= PROGRESS_CHUNK_RECORDS:
            since_report = 0
            if progress_sink(len(records), offset, total) is False:
                cancelled = True
                break
    if progress_sink is not None and not cancelled:
        progress_sink(len(records), offset, total)

    return RawCapture(
        format=fmt,
        records=records,
        interfaces=interfaces,
        truncated_at_safeguard=truncated,
        malformed_tail=malformed,
        warnings=warnings,
        cancelled=cancelled,
    )
