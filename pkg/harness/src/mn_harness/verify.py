"""Check that a live controller discovered the topology the fixture expects.

After booting the generated script, the controller's link listing
should settle to exactly the fixture's link set (LLDP discovery can
take a few seconds; rerun until stable). Hosts only appear in the
device listing after traffic, so the diff covers switch links only.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import requests

from .fixture import HarnessError, Link, format_link, load_fixture, parse_links

LINKS_PATH = "/wm/topology/links/json"


class TransportError(HarnessError):
    pass


class VerifyError(HarnessError):
    pass


@dataclass
class DiffReport:
    """Symmetric difference between expected and discovered link sets."""

    missing: list[Link] = field(default_factory=list)  # expected, not discovered
    unexpected: list[Link] = field(default_factory=list)  # discovered, not expected

    @property
    def ok(self) -> bool:
        return not self.missing and not self.unexpected

    def __str__(self) -> str:
        if self.ok:
            return "live topology matches the fixture"
        lines = []
        for link in self.missing:
            lines.append(f"missing:    {format_link(link)}")
        for link in self.unexpected:
            lines.append(f"unexpected: {format_link(link)}")
        return "\n".join(lines)


def fetch_live_links(controller_url: str, timeout: float = 10.0) -> frozenset[Link]:
    url = controller_url.rstrip("/") + LINKS_PATH
    try:
        resp = requests.get(url, timeout=timeout)
    except (requests.ConnectionError, requests.Timeout) as e:
        raise TransportError(f"controller unreachable: {e}") from None
    if resp.status_code != 200:
        raise VerifyError(f"link listing returned HTTP {resp.status_code}")
    try:
        raw = resp.json()
    except ValueError:
        raise VerifyError("link listing is not valid JSON") from None
    try:
        return parse_links(raw)
    except HarnessError as e:
        raise VerifyError(f"link listing malformed: {e}") from None


def verify_live_topology(controller_url: str, fixture_dir, timeout: float = 10.0) -> DiffReport:
    """Diff the controller's discovered links against the fixture's."""
    expected = load_fixture(fixture_dir).links
    live = fetch_live_links(controller_url, timeout=timeout)
    return DiffReport(
        missing=sorted(expected - live),
        unexpected=sorted(live - expected),
    )
