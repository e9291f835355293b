import pytest

from pcaptopo import Session, build_topology, dissect_all, generate_demo, parse_capture


@pytest.fixture(scope="session")
def demo_bytes():
    return generate_demo()


@pytest.fixture(scope="session")
def demo_raw(demo_bytes):
    return parse_capture(demo_bytes)


@pytest.fixture(scope="session")
def demo_packets(demo_raw):
    return dissect_all(demo_raw)


@pytest.fixture(scope="session")
def demo_graph(demo_packets):
    return build_topology(demo_packets)


@pytest.fixture()
def demo_session():
    return Session()
