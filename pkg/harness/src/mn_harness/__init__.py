"""Live-lab harness: Mininet script generation and controller verification."""

from .fixture import (
    Fixture,
    FixtureError,
    HarnessError,
    Host,
    canonical_link,
    format_link,
    load_fixture,
)
from .topo_script import (
    DEFAULT_BW_MBPS,
    DEFAULT_DELAY,
    GenerationError,
    generate_topo_script,
    launch_command,
    write_topo_script,
)
from .verify import DiffReport, TransportError, VerifyError, fetch_live_links, verify_live_topology

__version__ = "0.1.0"

__all__ = [
    "DEFAULT_BW_MBPS",
    "DEFAULT_DELAY",
    "DiffReport",
    "Fixture",
    "FixtureError",
    "GenerationError",
    "HarnessError",
    "Host",
    "TransportError",
    "VerifyError",
    "canonical_link",
    "fetch_live_links",
    "format_link",
    "generate_topo_script",
    "launch_command",
    "load_fixture",
    "verify_live_topology",
    "write_topo_script",
]
