"""Canonical endpoint addresses shared by dissection, filtering, and topology.

Addresses compare and hash by their binary form, never by text rendering,
so "10.0.1.200" and "010.000.001.200" can never diverge.
"""

from __future__ import annotations

import ipaddress
from dataclasses import dataclass

_KIND_RANK = {"ipv4": 0, "ipv6": 1, "mac": 2}


@dataclass(frozen=True, slots=True)
class Address:
    """A MAC, IPv4, or IPv6 endpoint identity in canonical binary form."""

    kind: str  # "ipv4" | "ipv6" | "mac"
    value: bytes

    def __str__(self) -> str:
        if self.kind == "ipv4":
            return ".".join(str(b) for b in self.value)
        if self.kind == "ipv6":
            return ipaddress.IPv6Address(self.value).compressed
        return self.value.hex(":")

    @property
    def sort_key(self) -> tuple[int, bytes]:
        """Total order used for deterministic tie-breaks: IPv4 < IPv6 < MAC, then bytes."""
        return (_KIND_RANK[self.kind], self.value)


def ipv4(value: bytes | str) -> Address:
    if isinstance(value, str):
        value = ipaddress.IPv4Address(value).packed
    if len(value) != 4:
        raise ValueError(f"IPv4 address needs 4 bytes, got {len(value)}")
    return Address("ipv4", bytes(value))


def ipv6(value: bytes | str) -> Address:
    if isinstance(value, str):
        value = ipaddress.IPv6Address(value).packed
    if len(value) != 16:
        raise ValueError(f"IPv6 address needs 16 bytes, got {len(value)}")
    return Address("ipv6", bytes(value))


def mac(value: bytes | str) -> Address:
    if isinstance(value, str):
        value = bytes.fromhex(value.replace(":", "").replace("-", ""))
    if len(value) != 6:
        raise ValueError(f"MAC address needs 6 bytes, got {len(value)}")
    return Address("mac", bytes(value))


def parse_address(text: str) -> Address | None:
    """Parse a textual address of any supported kind; None if it is not one."""
    text = text.strip()
    parts = text.split(":")
    if len(parts) == 6 and all(len(p) == 2 for p in parts):
        try:
            return mac(text)
        except ValueError:
            return None
    if ":" in text:
        try:
            return ipv6(text)
        except (ValueError, ipaddress.AddressValueError):
            return None
    if "." in text:
        try:
            return ipv4(text)
        except (ValueError, ipaddress.AddressValueError):
            return None
    return None
