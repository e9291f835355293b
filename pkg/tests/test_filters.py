"""Filter language: grammar, typing, evaluation semantics, and set algebra.

The randomized oracle generates packets from an abstract model (protocol
names plus field-instance lists) and evaluates expressions over that model
with an independent reference interpreter; the engine under test sees only
the DissectedPacket rendering of the same model.
"""

import random

import pytest

from pcaptopo import (
    And,
    FieldCmp,
    MATCH_ALL,
    Not,
    Or,
    ParseError,
    ProtocolAtom,
    apply_filter,
    evaluate,
    parse_filter,
    render,
)
from pcaptopo.dissect import ProtocolLayer
from pcaptopo.fields import Address, ipv4, mac

from oracles import random_expr, run_oracle_cases
from synth import make_packet


class TestParsing:
    def test_protocol_atom(self):
        assert parse_filter("dns") == ProtocolAtom("dns")

    def test_empty_is_match_all(self):
        assert parse_filter("") == MATCH_ALL
        assert parse_filter("   ") == MATCH_ALL

    def test_field_and_protocol_conjunction(self):
        expr = parse_filter("ip.addr == 10.0.1.200 && dns")
        assert expr == And(
            FieldCmp("ip.addr", "==", Address("ipv4", bytes((10, 0, 1, 200)))),
            ProtocolAtom("dns"),
        )

    def test_word_and_symbol_forms_equivalent(self):
        assert parse_filter("dns and not tcp or arp") == parse_filter("dns && !tcp || arp")

    def test_precedence_or_lowest(self):
        expr = parse_filter("arp or dns and tcp")
        assert expr == Or(ProtocolAtom("arp"), And(ProtocolAtom("dns"), ProtocolAtom("tcp")))

    def test_not_binds_tightest(self):
        expr = parse_filter("not dns and tcp")
        assert expr == And(Not(ProtocolAtom("dns")), ProtocolAtom("tcp"))

    def test_parentheses(self):
        expr = parse_filter("(arp or dns) and tcp")
        assert expr == And(Or(ProtocolAtom("arp"), ProtocolAtom("dns")), ProtocolAtom("tcp"))

    def test_whitespace_insensitive(self):
        assert parse_filter("tcp.port==80&&dns") == parse_filter("  tcp.port ==  80  &&  dns ")

    def test_hex_integer_literal(self):
        assert parse_filter("frame.len == 0x3C") == FieldCmp("frame.len", "==", 60)

    def test_quoted_text_literal(self):
        expr = parse_filter('dns.qry.name contains "corp"')
        assert expr == FieldCmp("dns.qry.name", "contains", "corp")

    def test_bare_text_literal(self):
        expr = parse_filter("dns.qry.name contains intranet.corp")
        assert expr == FieldCmp("dns.qry.name", "contains", "intranet.corp")

    def test_mac_literal(self):
        expr = parse_filter("eth.src == aa:bb:cc:dd:ee:ff")
        assert expr == FieldCmp("eth.src", "==", mac("aa:bb:cc:dd:ee:ff"))

    def test_ipv6_literal(self):
        expr = parse_filter("ipv6.addr == 2001:db8::1")
        assert expr.literal.kind == "ipv6"

    @pytest.mark.parametrize(
        "text,fragment",
        [
            ("nosuchproto", "unknown protocol or field"),
            ("ip.nosuchfield == 1", "unknown"),
            ("ip.addr == 80", "not a valid ipv4"),
            ("tcp.port == banana", "not an integer"),
            ("tcp.port contains 80", "not valid"),
            ("ip.addr < 10.0.0.1", "not valid"),
            ("(dns", "unbalanced parentheses"),
            ("dns)", "unbalanced parentheses"),
            ("tcp.port ==", "expected a comparison value"),
            ("tcp.port", "requires a comparison"),
            ("&& dns", "expected expression"),
            ('ip.addr == "10.0.0.1"', "compares against ipv4"),
        ],
    )
    def test_rejections_carry_position_and_message(self, text, fragment):
        with pytest.raises(ParseError) as err:
            parse_filter(text)
        assert fragment in err.value.message
        assert 0 <= err.value.position <= len(text)

    def test_position_points_at_offender(self):
        with pytest.raises(ParseError) as err:
            parse_filter("dns && nosuchproto")
        assert err.value.position == 7


class TestEvaluation:
    def test_protocol_atom_matches_any_layer(self):
        pkt = make_packet(layers=[
            ProtocolLayer("eth", {}, (0, 0)),
            ProtocolLayer("ip", {}, (0, 0)),
            ProtocolLayer("tcp", {}, (0, 0)),
            ProtocolLayer("http", {}, (0, 0)),
        ])
        assert evaluate(parse_filter("tcp"), pkt)
        assert evaluate(parse_filter("http"), pkt)
        assert not evaluate(parse_filter("udp"), pkt)

    def test_match_all_is_true_for_anything(self):
        assert evaluate(MATCH_ALL, make_packet())

    def test_any_instance_semantics(self):
        a, b = ipv4("10.0.0.1"), ipv4("10.0.0.2")
        pkt = make_packet(layers=[
            ProtocolLayer("eth", {}, (0, 0)),
            ProtocolLayer("ip", {"src": a, "dst": b}, (0, 0)),
        ])
        assert evaluate(parse_filter("ip.addr == 10.0.0.1"), pkt)
        assert evaluate(parse_filter("ip.addr != 10.0.0.1"), pkt)  # dst satisfies !=
        assert evaluate(parse_filter("ip.addr == 10.0.0.2"), pkt)
        assert not evaluate(parse_filter("ip.addr == 10.9.9.9"), pkt)

    def test_absent_field_is_false(self):
        pkt = make_packet(layers=[ProtocolLayer("arp", {}, (0, 0))])
        assert not evaluate(parse_filter("ip.addr == 10.0.0.1"), pkt)
        assert not evaluate(parse_filter("tcp.port == 80"), pkt)

    def test_multi_port_field(self):
        pkt = make_packet(layers=[
            ProtocolLayer("tcp", {"srcport": 50000, "dstport": 80}, (0, 0)),
        ])
        assert evaluate(parse_filter("tcp.port == 80"), pkt)
        assert evaluate(parse_filter("tcp.port == 50000"), pkt)
        assert evaluate(parse_filter("tcp.port > 443"), pkt)
        assert not evaluate(parse_filter("tcp.port < 80"), pkt)

    def test_frame_pseudo_fields(self):
        pkt = make_packet(index=4, length=150)
        assert evaluate(parse_filter("frame.number == 5"), pkt)
        assert evaluate(parse_filter("frame.len >= 150"), pkt)
        assert not evaluate(parse_filter("frame.len < 150"), pkt)

    def test_text_contains(self):
        pkt = make_packet(layers=[ProtocolLayer("dns", {"qry.name": "intranet.corp"}, (0, 0))])
        assert evaluate(parse_filter("dns.qry.name contains intranet"), pkt)
        assert evaluate(parse_filter('dns.qry.name == "intranet.corp"'), pkt)
        assert not evaluate(parse_filter("dns.qry.name contains example"), pkt)

    def test_tcp_syn_flag_on_dissected_packets(self):
        from pcaptopo import dissect
        from pcaptopo.capture import RawPacketRecord
        from pcaptopo.demo import eth_frame, ipv4_packet, tcp_segment

        def frame(flags):
            seg = tcp_segment(bytes(4), bytes(4), 50000, 80, 0, 0, flags)
            data = eth_frame(bytes(6), bytes(6), 0x0800, ipv4_packet(bytes(4), bytes(4), 6, seg))
            return dissect(RawPacketRecord(0, 0, len(data), len(data), 1, 0, data))

        syn_expr = parse_filter("tcp.flags.syn == 1")
        assert evaluate(syn_expr, frame(0x02))  # SYN
        assert evaluate(syn_expr, frame(0x12))  # SYN|ACK
        assert not evaluate(syn_expr, frame(0x10))  # plain ACK

    def test_tunneled_instances_all_considered(self):
        a, b, c, d = (ipv4(f"10.0.0.{i}") for i in (1, 2, 3, 4))
        pkt = make_packet(layers=[
            ProtocolLayer("ip", {"src": a, "dst": b}, (0, 0)),
            ProtocolLayer("ip", {"src": c, "dst": d}, (0, 0)),
        ])
        for addr in ("10.0.0.1", "10.0.0.2", "10.0.0.3", "10.0.0.4"):
            assert evaluate(parse_filter(f"ip.addr == {addr}"), pkt)


class TestApplyFilter:
    def test_match_all_returns_every_index(self):
        pkts = [make_packet(index=i) for i in range(5)]
        assert apply_filter(pkts, MATCH_ALL) == [0, 1, 2, 3, 4]

    def test_indices_ascending_and_equal_to_per_packet_eval(self):
        rng = random.Random(1)
        pkts = [
            make_packet(index=i, layers=[ProtocolLayer(rng.choice(["dns", "tcp", "arp"]), {}, (0, 0))])
            for i in range(50)
        ]
        expr = parse_filter("dns || arp")
        out = apply_filter(pkts, expr)
        assert out == sorted(out)
        assert out == [i for i, p in enumerate(pkts) if evaluate(expr, p)]

    def test_demo_dns_153(self, demo_packets):
        assert len(apply_filter(demo_packets, parse_filter("dns"))) == 153

    def test_idempotence_on_demo(self, demo_packets):
        expr = parse_filter("dns")
        first = apply_filter(demo_packets, expr)
        subset = [demo_packets[i] for i in first]
        again = apply_filter(subset, expr)
        assert again == list(range(len(subset)))  # fixed point: everything still matches


class TestSetAlgebra:
    def _packets(self):
        rng = random.Random(99)
        protos = ["dns", "tcp", "udp", "arp", "http"]
        return [
            make_packet(
                index=i,
                layers=[ProtocolLayer(p, {}, (0, 0)) for p in rng.sample(protos, rng.randrange(1, 4))],
                length=rng.randrange(40, 400),
            )
            for i in range(120)
        ]

    def test_intersection_union_complement(self):
        pkts = self._packets()
        a, b = parse_filter("dns"), parse_filter("tcp")
        set_a, set_b = set(apply_filter(pkts, a)), set(apply_filter(pkts, b))
        assert set(apply_filter(pkts, And(a, b))) == set_a & set_b
        assert set(apply_filter(pkts, Or(a, b))) == set_a | set_b
        everything = set(range(len(pkts)))
        assert set(apply_filter(pkts, Not(a))) == everything - set_a

    def test_de_morgan_on_index_sets(self):
        pkts = self._packets()
        a, b = parse_filter("udp"), parse_filter("http")
        lhs = set(apply_filter(pkts, Not(And(a, b))))
        rhs = set(range(len(pkts))) - (set(apply_filter(pkts, a)) & set(apply_filter(pkts, b)))
        assert lhs == rhs

    def test_double_negation(self):
        pkts = self._packets()
        a = parse_filter("arp")
        assert apply_filter(pkts, Not(Not(a))) == apply_filter(pkts, a)

    def test_any_instance_quirk_disagreement_set(self):
        # "ip.addr != X" and "!(ip.addr == X)" differ exactly on packets that
        # carry both an instance equal to X and one different from X.
        x = ipv4("10.0.0.1")
        other = ipv4("10.0.0.2")
        pkts = []
        for i, (src, dst) in enumerate([(x, x), (x, other), (other, other), (x, None)]):
            fields = {"src": src}
            if dst is not None:
                fields["dst"] = dst
            pkts.append(make_packet(index=i, layers=[ProtocolLayer("ip", fields, (0, 0))]))
        neq = set(apply_filter(pkts, parse_filter("ip.addr != 10.0.0.1")))
        not_eq = set(apply_filter(pkts, parse_filter("!(ip.addr == 10.0.0.1)")))
        expected_disagreement = set()
        for i, p in enumerate(pkts):
            instances = [v for v in p.layers[0].fields.values()]
            if any(v == x for v in instances) and any(v != x for v in instances):
                expected_disagreement.add(i)
        assert neq ^ not_eq == expected_disagreement
        assert expected_disagreement == {1}


class TestOracle:
    # randomized model-based reference vs the engine (see oracles.py)
    def test_randomized_against_reference(self):
        run_oracle_cases(120, seed=11)


class TestRendering:
    @pytest.mark.parametrize(
        "text",
        [
            "dns",
            "dns && tcp",
            "dns || tcp && !arp",
            "(dns || tcp) && arp",
            "!(dns && tcp) || arp",
            "ip.addr == 10.0.1.200 && dns",
            'dns.qry.name contains "intranet.corp"',
            "tcp.port >= 1024 and tcp.port <= 49151",
            "eth.src == aa:00:00:00:00:05",
            "!!dns",
        ],
    )
    def test_parse_render_round_trip(self, text):
        expr = parse_filter(text)
        rendered = render(expr)
        assert parse_filter(rendered) == expr
        assert render(parse_filter(rendered)) == rendered  # stable

    def test_random_expression_round_trip(self):
        rng = random.Random(5)
        for _ in range(300):
            expr = random_expr(rng, rng.randrange(0, 5))
            assert parse_filter(render(expr)) == expr

    def test_render_match_all_is_empty(self):
        assert render(MATCH_ALL) == ""
