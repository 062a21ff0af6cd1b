"""Controller topology ingestion.

Parses the controller's links/devices JSON into a validated graph model
and derives the adjacency matrix plus the (start, end) endpoint indices
used by the learning environment.
"""

from __future__ import annotations

import json
import logging
import re
from dataclasses import dataclass

import numpy as np

log = logging.getLogger(__name__)

DPID_PATTERN = re.compile(r"^[0-9a-fA-F]{2}(:[0-9a-fA-F]{2}){7}$")
MAC_PATTERN = re.compile(r"^[0-9a-fA-F]{2}(:[0-9a-fA-F]{2}){5}$")


class TopologyError(Exception):
    """Base class for topology ingestion failures."""


class TopologyParseError(TopologyError):
    """Malformed input bytes. `offset` is the byte position when known."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (at byte {offset})")
        self.offset = offset


class EndpointError(TopologyError):
    """Endpoint identification failed (fewer than two attached hosts)."""


class DegenerateEndpointsError(TopologyError):
    """Both endpoint hosts sit on the same switch."""


class ConnectivityError(TopologyError):
    """The switch graph is not connected."""

    def __init__(self, unreachable_dpid: str):
        super().__init__(f"switch {unreachable_dpid} is unreachable from the rest of the graph")
        self.unreachable_dpid = unreachable_dpid


def normalize_dpid(value) -> str:
    if not isinstance(value, str) or not DPID_PATTERN.match(value):
        raise TopologyParseError(f"invalid DPID: {value!r}")
    return value.lower()


def normalize_mac(value) -> str:
    if not isinstance(value, str) or not MAC_PATTERN.match(value):
        raise TopologyParseError(f"invalid MAC: {value!r}")
    return value.lower()


@dataclass(frozen=True)
class Link:
    src: str
    src_port: int
    dst: str
    dst_port: int
    bandwidth_mbps: float | None = None

    def __post_init__(self):
        if self.src == self.dst:
            raise TopologyParseError(f"self-loop link on {self.src}")
        if self.src_port < 1 or self.dst_port < 1:
            raise TopologyParseError(f"link {self.src}->{self.dst} has non-positive port")

    def unordered_key(self):
        """Endpoints with their ports, orientation-independent."""
        a = (self.src, self.src_port)
        b = (self.dst, self.dst_port)
        return (a, b) if a <= b else (b, a)

    def port_on(self, dpid: str) -> int:
        if dpid == self.src:
            return self.src_port
        if dpid == self.dst:
            return self.dst_port
        raise KeyError(dpid)


@dataclass(frozen=True)
class Host:
    mac: str
    attached_switch: str
    attached_port: int


@dataclass(frozen=True)
class Topology:
    switches: tuple[str, ...]
    links: tuple[Link, ...]
    hosts: tuple[Host, ...]

    def __post_init__(self):
        known = set(self.switches)
        for link in self.links:
            if link.src not in known or link.dst not in known:
                raise TopologyError(f"link {link.src}->{link.dst} references unknown switch")
        for host in self.hosts:
            if host.attached_switch not in known:
                raise TopologyError(f"host {host.mac} attached to unknown switch")
        seen = set()
        for link in self.links:
            key = link.unordered_key()
            if key in seen:
                raise TopologyError(f"duplicate link {key}")
            seen.add(key)


@dataclass
class AdjacencyModel:
    """n x n symmetric connection matrix plus endpoint node indices."""

    net: np.ndarray
    index_of: dict[str, int]
    dpid_of: tuple[str, ...]
    start_node: int
    end_node: int

    @property
    def num_nodes(self) -> int:
        return self.net.shape[0]


def _load_json_array(data: bytes, what: str):
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as e:
        raise TopologyParseError(f"{what}: invalid UTF-8", offset=e.start) from e
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise TopologyParseError(f"{what}: {e.msg}", offset=e.pos) from e
    if not isinstance(doc, list):
        raise TopologyParseError(f"{what}: expected a JSON array", offset=0)
    return doc


def _parse_links(doc) -> list[Link]:
    links = []
    seen = set()
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise TopologyParseError(f"links[{i}]: expected an object")
        try:
            src = normalize_dpid(rec["src-switch"])
            dst = normalize_dpid(rec["dst-switch"])
            src_port = rec["src-port"]
            dst_port = rec["dst-port"]
        except KeyError as e:
            raise TopologyParseError(f"links[{i}]: missing key {e.args[0]!r}") from None
        if not isinstance(src_port, int) or not isinstance(dst_port, int):
            raise TopologyParseError(f"links[{i}]: ports must be integers")
        bw = rec.get("bandwidth")
        if bw is not None and not isinstance(bw, (int, float)):
            raise TopologyParseError(f"links[{i}]: bandwidth must be numeric")
        link = Link(src, src_port, dst, dst_port, float(bw) if bw is not None else None)
        key = link.unordered_key()
        if key in seen:
            # controllers may report both directions of the same wire
            log.debug("dropping duplicate link record %s", key)
            continue
        seen.add(key)
        links.append(link)
    return links


def _parse_devices(doc) -> list[Host]:
    hosts = []
    for i, rec in enumerate(doc):
        if not isinstance(rec, dict):
            raise TopologyParseError(f"devices[{i}]: expected an object")
        macs = rec.get("mac")
        if not isinstance(macs, list) or not macs:
            raise TopologyParseError(f"devices[{i}]: missing mac")
        mac = normalize_mac(macs[0])
        points = rec.get("attachmentPoint")
        if not points:
            log.warning("device %s has no attachment point, skipping", mac)
            continue
        point = points[0]
        if not isinstance(point, dict) or "switchDPID" not in point or "port" not in point:
            raise TopologyParseError(f"devices[{i}]: malformed attachmentPoint")
        sw = normalize_dpid(point["switchDPID"])
        port = point["port"]
        if not isinstance(port, int) or port < 1:
            raise TopologyParseError(f"devices[{i}]: port must be a positive integer")
        hosts.append(Host(mac, sw, port))
    return hosts


def parse_topology(links_json: bytes, devices_json: bytes) -> Topology:
    """Parse controller-format links and devices responses.

    Switches are the union of DPIDs seen in links and attachment points,
    sorted lexicographically. Hosts with no attachment point are skipped
    with a warning; a link naming an unseen DPID defines that switch.
    """
    links = _parse_links(_load_json_array(links_json, "links"))
    hosts = _parse_devices(_load_json_array(devices_json, "devices"))
    dpids = set()
    for link in links:
        dpids.add(link.src)
        dpids.add(link.dst)
    for host in hosts:
        dpids.add(host.attached_switch)
    return Topology(tuple(sorted(dpids)), tuple(links), tuple(hosts))


def build_adjacency(t: Topology, link_weight: str = "unit") -> AdjacencyModel:
    """Build the symmetric connection matrix and pick the endpoint nodes.

    The first two hosts in MAC order define the start and end nodes.
    `link_weight` is "unit" (binary 1.0 cells) or "inverse_bandwidth"
    (cells 1/bw, requiring bandwidth on every link).
    """
    if link_weight not in ("unit", "inverse_bandwidth"):
        raise ValueError(f"unknown link_weight {link_weight!r}")
    if len(t.switches) < 2:
        raise TopologyError("need at least 2 switches")
    if len(t.hosts) < 2:
        raise EndpointError(f"need at least 2 attached hosts to pick endpoints, got {len(t.hosts)}")

    index_of = {dpid: i for i, dpid in enumerate(t.switches)}
    n = len(t.switches)
    net = np.zeros((n, n), dtype=np.float64)
    for link in t.links:
        if link_weight == "inverse_bandwidth":
            if not link.bandwidth_mbps:
                raise TopologyError(
                    f"link {link.src}->{link.dst} has no bandwidth; inverse_bandwidth needs it"
                )
            w = 1.0 / link.bandwidth_mbps
        else:
            w = 1.0
        i, j = index_of[link.src], index_of[link.dst]
        # parallel links collapse to the fastest wire (smallest cost cell)
        if net[i, j] == 0.0 or w < net[i, j]:
            net[i, j] = net[j, i] = w

    _check_connected(net, t.switches)

    ordered_hosts = sorted(t.hosts, key=lambda h: h.mac)
    start = index_of[ordered_hosts[0].attached_switch]
    end = index_of[ordered_hosts[1].attached_switch]
    if start == end:
        raise DegenerateEndpointsError(
            f"hosts {ordered_hosts[0].mac} and {ordered_hosts[1].mac} share switch "
            f"{ordered_hosts[0].attached_switch}"
        )
    return AdjacencyModel(net, index_of, t.switches, start, end)


def _check_connected(net: np.ndarray, dpids: tuple[str, ...]) -> None:
    n = net.shape[0]
    seen = {0}
    stack = [0]
    while stack:
        i = stack.pop()
        for j in np.flatnonzero(net[i]):
            if j not in seen:
                seen.add(int(j))
                stack.append(int(j))
    if len(seen) < n:
        unreachable = min(i for i in range(n) if i not in seen)
        raise ConnectivityError(dpids[unreachable])


def neighbors(m: AdjacencyModel, i: int) -> list[int]:
    """Ascending indices adjacent to node i."""
    if not 0 <= i < m.num_nodes:
        raise IndexError(f"node index {i} out of range [0, {m.num_nodes})")
    return [int(j) for j in np.flatnonzero(m.net[i])]


def topology_to_dict(t: Topology) -> dict:
    return {
        "switches": list(t.switches),
        "links": [
            {
                "src": l.src,
                "src_port": l.src_port,
                "dst": l.dst,
                "dst_port": l.dst_port,
                **({"bandwidth_mbps": l.bandwidth_mbps} if l.bandwidth_mbps is not None else {}),
            }
            for l in t.links
        ],
        "hosts": [
            {"mac": h.mac, "switch": h.attached_switch, "port": h.attached_port} for h in t.hosts
        ],
    }


def topology_from_dict(doc: dict) -> Topology:
    links = tuple(
        Link(l["src"], l["src_port"], l["dst"], l["dst_port"], l.get("bandwidth_mbps"))
        for l in doc["links"]
    )
    hosts = tuple(Host(h["mac"], h["switch"], h["port"]) for h in doc["hosts"])
    return Topology(tuple(doc["switches"]), links, hosts)
