"""Emit the fixture topology as a custom Mininet script named "mytopo".

The generated file is self-contained: it declares every host, switch,
and link from the fixture with traffic-control parameters on each link,
registers the topology under the name "mytopo", and carries the launch
command in its docstring. Generation is deterministic, so regenerating
from the same fixture gives identical bytes (safe to diff or check in).
"""

from __future__ import annotations

from pathlib import Path

from .fixture import Fixture, HarnessError, load_fixture

DEFAULT_BW_MBPS = 10
DEFAULT_DELAY = "5ms"

LAUNCH_TEMPLATE = (
    "sudo mn --custom {script_path} --topo mytopo "
    "--controller=remote,ip={controller_ip},port={controller_port} --link tc"
)


class GenerationError(HarnessError):
    pass


def launch_command(controller_ip: str, controller_port: int = 6653,
                   script_path: str = "mytopo.py") -> str:
    """The Mininet CLI line that boots the topology against a remote controller."""
    return LAUNCH_TEMPLATE.format(
        script_path=script_path, controller_ip=controller_ip, controller_port=controller_port
    )


def switch_name(dpid: str) -> str:
    return f"s{int(dpid.replace(':', ''), 16)}"


def mininet_dpid(dpid: str) -> str:
    return dpid.replace(":", "")


def generate_topo_script(fixture_dir, bw_mbps: float = DEFAULT_BW_MBPS,
                         delay: str = DEFAULT_DELAY) -> str:
    """Render the fixture as Mininet script source text."""
    fixture = load_fixture(fixture_dir)
    return render_script(fixture, bw_mbps, delay)


def write_topo_script(fixture_dir, out_path, bw_mbps: float = DEFAULT_BW_MBPS,
                      delay: str = DEFAULT_DELAY) -> Path:
    out = Path(out_path)
    out.write_text(generate_topo_script(fixture_dir, bw_mbps, delay), encoding="utf-8")
    return out


def render_script(fixture: Fixture, bw_mbps: float, delay: str) -> str:
    if not fixture.links:
        raise GenerationError("fixture declares no links; nothing to emit")
    if not fixture.hosts:
        raise GenerationError("fixture declares no hosts; nothing to emit")

    hosts = list(fixture.hosts)  # already MAC-sorted
    host_var = {h.mac: f"h{i + 1}" for i, h in enumerate(hosts)}
    switches = sorted(fixture.switches, key=lambda d: int(d.replace(":", ""), 16))
    links = sorted(fixture.links)
    total_links = len(links) + len(hosts)

    lines = [
        "#!/usr/bin/env python3",
        f'"""Custom Mininet topology "mytopo": {len(hosts)} hosts, '
        f"{len(switches)} switches, {total_links} links.",
        "",
        "Every link is traffic-controlled; adjust BW_MBPS / DELAY below or",
        "regenerate with different parameters. Launch against a remote",
        "controller with:",
        "",
        "    " + launch_command("<controller-ip>", "<openflow-port>"),
        '"""',
        "",
        "from mininet.topo import Topo",
        "",
        f"BW_MBPS = {bw_mbps!r}",
        f"DELAY = {delay!r}",
        "",
        "",
        "class MyTopo(Topo):",
        "    def build(self):",
    ]
    for h in hosts:
        lines.append(
            f'        {host_var[h.mac]} = self.addHost("{host_var[h.mac]}", mac="{h.mac}")'
        )
    name = {}
    for dpid in switches:
        name[dpid] = switch_name(dpid)
        lines.append(
            f'        {name[dpid]} = self.addSwitch("{name[dpid]}", dpid="{mininet_dpid(dpid)}")'
        )
    lines.append("")
    for h in hosts:
        lines.append(
            f"        self.addLink({host_var[h.mac]}, {name[h.switch]}, "
            f"port2={h.port}, bw=BW_MBPS, delay=DELAY)"
        )
    for (a, ap), (b, bp) in links:
        lines.append(
            f"        self.addLink({name[a]}, {name[b]}, "
            f"port1={ap}, port2={bp}, bw=BW_MBPS, delay=DELAY)"
        )
    lines += [
        "",
        "",
        'topos = {"mytopo": (lambda: MyTopo())}',
        "",
    ]
    return "\n".join(lines)
