#!/usr/bin/env python3
"""Regenerate the canonical 14-switch fixture pair under fixtures/.

Layout: s1 fans out to two branch heads (s2, s8); branch A chains
s2-s3-s4-s5-s6-s7, branch B chains s8-s9-s10-s11-s12-s13; both tails
rejoin at s14 (s7-s14, s13-s14); one cross link s4-s10. Hosts h1 on s1
and h2 on s14. 15 switch-switch links + 2 host links = 17 connections.

Port convention: ports on each switch are numbered in the order its
attachments are listed below (hosts first), so the wiring is stable.
"""

import json
from pathlib import Path

OUT_DIR = Path(__file__).resolve().parent.parent / "fixtures"


def dpid(i: int) -> str:
    return "00:00:00:00:00:00:00:%02x" % i


# (src switch, src port, dst switch, dst port)
SWITCH_LINKS = [
    (1, 2, 2, 1),
    (1, 3, 8, 1),
    (2, 2, 3, 1),
    (3, 2, 4, 1),
    (4, 2, 5, 1),
    (5, 2, 6, 1),
    (6, 2, 7, 1),
    (8, 2, 9, 1),
    (9, 2, 10, 1),
    (10, 2, 11, 1),
    (11, 2, 12, 1),
    (12, 2, 13, 1),
    (7, 2, 14, 2),
    (13, 2, 14, 3),
    (4, 3, 10, 3),
]

# (mac, switch, port)
HOSTS = [
    ("00:00:00:00:00:01", 1, 1),
    ("00:00:00:00:00:02", 14, 1),
]


def main() -> None:
    links = [
        {
            "src-switch": dpid(s),
            "src-port": sp,
            "dst-switch": dpid(d),
            "dst-port": dp,
            "type": "internal",
            "direction": "bidirectional",
        }
        for s, sp, d, dp in SWITCH_LINKS
    ]
    devices = [
        {
            "entityClass": "DefaultEntityClass",
            "mac": [mac],
            "ipv4": [],
            "vlan": [],
            "attachmentPoint": [{"switchDPID": dpid(sw), "port": port, "errorStatus": None}],
            "lastSeen": 0,
        }
        for mac, sw, port in HOSTS
    ]

    OUT_DIR.mkdir(exist_ok=True)
    links_path = OUT_DIR / "two-branch.links.json"
    devices_path = OUT_DIR / "two-branch.devices.json"
    links_path.write_text(json.dumps(links, indent=2) + "\n")
    devices_path.write_text(json.dumps(devices, indent=2) + "\n")
    print(f"wrote {links_path} ({len(links)} links)")
    print(f"wrote {devices_path} ({len(devices)} devices)")


if __name__ == "__main__":
    main()
