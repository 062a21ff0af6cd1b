"""Schema-level reading of a topology fixture directory.

A fixture directory holds exactly one ``*links*.json`` (controller link
listing: src-switch/src-port/dst-switch/dst-port records) and one
``*devices*.json`` (host MACs with attachment points). Links are
undirected: each is kept as a canonical pair of (dpid, port) endpoints
ordered lexicographically, so restated or reversed records collapse.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

Endpoint = tuple[str, int]
Link = tuple[Endpoint, Endpoint]


class HarnessError(Exception):
    pass


class FixtureError(HarnessError):
    pass


@dataclass(frozen=True)
class Host:
    mac: str
    switch: str
    port: int


@dataclass(frozen=True)
class Fixture:
    links: frozenset[Link]
    hosts: tuple[Host, ...]

    @property
    def switches(self) -> frozenset[str]:
        seen = {ep[0] for link in self.links for ep in link}
        seen.update(h.switch for h in self.hosts)
        return frozenset(seen)


def canonical_link(src: str, src_port: int, dst: str, dst_port: int) -> Link:
    a: Endpoint = (src, int(src_port))
    b: Endpoint = (dst, int(dst_port))
    return (a, b) if a <= b else (b, a)


def format_link(link: Link) -> str:
    (a, ap), (b, bp) = link
    return f"{a} port {ap} <-> {b} port {bp}"


def find_fixture_pair(fixture_dir: Path) -> tuple[Path, Path]:
    if not fixture_dir.is_dir():
        raise FixtureError(f"fixture directory not found: {fixture_dir}")
    links = sorted(p for p in fixture_dir.glob("*.json") if "links" in p.name)
    devices = sorted(p for p in fixture_dir.glob("*.json") if "devices" in p.name)
    if len(links) != 1 or len(devices) != 1:
        raise FixtureError(
            f"{fixture_dir} must hold exactly one *links*.json and one *devices*.json "
            f"(found {len(links)} and {len(devices)})"
        )
    return links[0], devices[0]


def parse_links(raw) -> frozenset[Link]:
    if not isinstance(raw, list):
        raise FixtureError("link listing must be a JSON array")
    links = set()
    for i, rec in enumerate(raw):
        try:
            links.add(
                canonical_link(
                    rec["src-switch"], rec["src-port"], rec["dst-switch"], rec["dst-port"]
                )
            )
        except (TypeError, KeyError) as e:
            raise FixtureError(f"link record {i}: missing {e}") from None
    return frozenset(links)


def parse_hosts(raw) -> tuple[Host, ...]:
    if not isinstance(raw, list):
        raise FixtureError("device listing must be a JSON array")
    hosts = []
    for i, rec in enumerate(raw):
        try:
            macs = rec["mac"]
            points = rec["attachmentPoint"]
        except (TypeError, KeyError) as e:
            raise FixtureError(f"device record {i}: missing {e}") from None
        if not macs or not points:
            continue  # unattached devices carry no topology information
        hosts.append(Host(macs[0], points[0]["switchDPID"], int(points[0]["port"])))
    return tuple(sorted(hosts, key=lambda h: h.mac))


def load_fixture(fixture_dir) -> Fixture:
    links_path, devices_path = find_fixture_pair(Path(fixture_dir))
    try:
        raw_links = json.loads(links_path.read_text(encoding="utf-8"))
        raw_devices = json.loads(devices_path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as e:
        raise FixtureError(f"fixture is not valid JSON: {e}") from None
    return Fixture(links=parse_links(raw_links), hosts=parse_hosts(raw_devices))
