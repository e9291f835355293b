"""pcaptopo: topology-first packet capture exploration.

Core pipeline: parse PCAP/PCAPNG bytes, dissect protocols, evaluate display
filters, and build a capped host/conversation topology, exposed through a
shared session over HTTP/JSON and a CLI.
"""

from .capture import (
    BlockError,
    ByteOrder,
    CaptureError,
    CaptureFormat,
    FormatError,
    FormatKind,
    HeaderError,
    InterfaceDescription,
    PACKET_SAFEGUARD,
    RawCapture,
    RawPacketRecord,
    detect_format,
    parse_capture,
    parse_pcap,
    parse_pcapng,
)
from .demo import DEMO_SPEC, DemoSpec, generate_demo, write_pcap
from .dissect import (
    DISPLAY_FIELDS,
    DissectedPacket,
    DissectorRegistry,
    ProtocolLayer,
    default_registry,
    dissect,
    dissect_all,
    label_of,
    summarize,
)
from .fields import Address, parse_address
from .filters import (
    And,
    FieldCmp,
    FilterExpr,
    MATCH_ALL,
    MatchAll,
    Not,
    Or,
    ParseError,
    ProtocolAtom,
    apply_filter,
    evaluate,
    parse_filter,
    render,
)
from .session import Session, Snapshot
from .topology import (
    ConversationEdge,
    HostNode,
    NODE_CAP,
    ProtocolLegendEntry,
    TopologyGraph,
    build_topology,
    conversation_detail,
    host_pairs,
    legend,
    topology_to_dict,
)

__version__ = "0.1.0"
