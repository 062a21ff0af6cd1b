"""Compile a path into Static Flow Pusher entries, and simulate them.

A path of k switches compiles to k forward entries (ingress from the
previous hop or host, egress toward the next hop or host) plus the
mirrored reverse batch, so return traffic works. Match granularity is
in_port-only by default; eth_type can be set for coexistence with
other flows.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

from .pathfind import Path
from .topo import Host, Link, Topology


class CompileError(Exception):
    pass


@dataclass
class FlowEntry:
    switch: str
    name: str
    in_port: int
    actions: str  # "output=<port>"
    priority: int = 32768
    eth_type: str | None = None
    active: bool = True

    @property
    def output_port(self) -> int:
        if not self.actions.startswith("output="):
            raise ValueError(f"unsupported actions {self.actions!r}")
        return int(self.actions.split("=", 1)[1])


@dataclass
class FlowBatch:
    path: Path
    forward: list[FlowEntry]
    reverse: list[FlowEntry]

    @property
    def entries(self) -> list[FlowEntry]:
        return self.forward + self.reverse


def _port_table(topo: Topology) -> dict[tuple[str, str], tuple[int, int]]:
    table = {}
    for link in topo.links:
        key = (link.src, link.dst)
        if key not in table:
            table[key] = (link.src_port, link.dst_port)
            table[(link.dst, link.src)] = (link.dst_port, link.src_port)
    return table


def _endpoint_hosts(topo: Topology, path: Path) -> tuple[Host, Host]:
    hosts = sorted(topo.hosts, key=lambda h: h.mac)
    if len(hosts) < 2:
        raise CompileError("topology has fewer than 2 attached hosts")
    h1, h2 = hosts[0], hosts[1]
    if h1.attached_switch != path.dpids[0]:
        raise CompileError(f"host {h1.mac} is not attached to the first path switch")
    if h2.attached_switch != path.dpids[-1]:
        raise CompileError(f"host {h2.mac} is not attached to the last path switch")
    return h1, h2


def compile_flows(path: Path, topo: Topology, eth_type: str | None = None) -> FlowBatch:
    """One entry per switch per direction, wired through real link ports."""
    if len(path.dpids) < 2:
        raise CompileError("path must span at least 2 switches")
    ports = _port_table(topo)
    h1, h2 = _endpoint_hosts(topo, path)
    name_base = f"rlpath-{h1.mac.replace(':', '')}-{h2.mac.replace(':', '')}"

    def hop_ports(a: str, b: str) -> tuple[int, int]:
        try:
            return ports[(a, b)]
        except KeyError:
            raise CompileError(f"no link with port data between {a} and {b}") from None

    def one_direction(dpids: list[str], src_host: Host, dst_host: Host, tag: str):
        entries = []
        in_port = src_host.attached_port
        for seq, dpid in enumerate(dpids):
            if seq + 1 < len(dpids):
                out_port, next_in = hop_ports(dpid, dpids[seq + 1])
            else:
                out_port, next_in = dst_host.attached_port, None
            entries.append(
                FlowEntry(
                    switch=dpid,
                    name=f"{name_base}-{tag}-{seq}",
                    in_port=in_port,
                    actions=f"output={out_port}",
                    eth_type=eth_type,
                )
            )
            in_port = next_in
        return entries

    forward = one_direction(list(path.dpids), h1, h2, "fwd")
    reverse = one_direction(list(reversed(path.dpids)), h2, h1, "rev")
    return FlowBatch(path=path, forward=forward, reverse=reverse)


def render_entry(e: FlowEntry) -> bytes:
    """Controller-accepted JSON shape: numerics as strings, fixed key order."""
    doc = {
        "switch": e.switch,
        "name": e.name,
        "priority": str(e.priority),
        "in_port": str(e.in_port),
    }
    if e.eth_type is not None:
        doc["eth_type"] = e.eth_type
    doc["active"] = "true" if e.active else "false"
    doc["actions"] = e.actions
    return json.dumps(doc, separators=(",", ":")).encode("utf-8")


def parse_entry(data: bytes) -> FlowEntry:
    doc = json.loads(data.decode("utf-8"))
    if not isinstance(doc, dict):
        raise ValueError("flow entry must be a JSON object")
    for key in ("switch", "name", "in_port", "actions"):
        if key not in doc:
            raise ValueError(f"flow entry missing key {key!r}")
    return FlowEntry(
        switch=doc["switch"],
        name=doc["name"],
        in_port=int(doc["in_port"]),
        actions=doc["actions"],
        priority=int(doc.get("priority", 32768)),
        eth_type=doc.get("eth_type"),
        active=str(doc.get("active", "true")).lower() == "true",
    )


@dataclass
class DeliveryResult:
    delivered: bool
    visited: list[str]  # switch DPIDs in traversal order
    reason: str = ""


class ForwardingSimulator:
    """Table-lookup forwarding over the topology's wiring.

    Installing a batch fills per-switch (in_port -> out_port) tables;
    inject() then follows the wiring hop by hop from the source host's
    attachment point until the packet exits at a host port or drops.
    """

    def __init__(self, topo: Topology):
        self.wire: dict[tuple[str, int], tuple[str, int]] = {}
        for link in topo.links:
            self.wire[(link.src, link.src_port)] = (link.dst, link.dst_port)
            self.wire[(link.dst, link.dst_port)] = (link.src, link.src_port)
        self.host_at: dict[tuple[str, int], str] = {
            (h.attached_switch, h.attached_port): h.mac for h in topo.hosts
        }
        self.host_port: dict[str, tuple[str, int]] = {
            h.mac: (h.attached_switch, h.attached_port) for h in topo.hosts
        }
        self.tables: dict[str, dict[int, int]] = {}

    def install(self, entries: list[FlowEntry]) -> None:
        for e in entries:
            if not e.active:
                continue
            self.tables.setdefault(e.switch, {})[e.in_port] = e.output_port

    def inject(self, src_mac: str, dst_mac: str) -> DeliveryResult:
        if src_mac not in self.host_port:
            return DeliveryResult(False, [], f"unknown source host {src_mac}")
        dpid, in_port = self.host_port[src_mac]
        visited = []
        for _ in range(2 * len(self.wire) + 2):
            visited.append(dpid)
            out_port = self.tables.get(dpid, {}).get(in_port)
            if out_port is None:
                return DeliveryResult(False, visited, f"no rule at {dpid} in_port {in_port}")
            egress = (dpid, out_port)
            if self.host_at.get(egress) == dst_mac:
                return DeliveryResult(True, visited)
            if egress in self.wire:
                dpid, in_port = self.wire[egress]
                continue
            return DeliveryResult(False, visited, f"port {out_port} on {dpid} leads nowhere")
        return DeliveryResult(False, visited, "forwarding loop")
