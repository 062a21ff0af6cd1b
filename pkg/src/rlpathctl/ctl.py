"""Northbound REST client plus a fixture-backed mock controller.

The client fetches the links/devices views and pushes rendered flow
entries. The mock serves fixture bytes verbatim on the two GET paths
and validates POSTed entries against the fixture's switches and ports,
so integration tests catch compile bugs a real controller would.
"""

from __future__ import annotations

import json
import logging
import threading
import time
from dataclasses import dataclass, field
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer

import requests

from .flows import FlowBatch, FlowEntry, render_entry
from .topo import Topology, parse_topology

log = logging.getLogger(__name__)

LINKS_PATH = "/wm/topology/links/json"
DEVICES_PATH = "/wm/device/"
PUSH_PATH = "/wm/staticflowpusher/json"
LIST_PATH = "/wm/staticflowpusher/list/all/json"


class TransportError(Exception):
    """Connection or timeout failure that survived the retry budget."""

    def __init__(self, message: str, partial_report=None):
        super().__init__(message)
        self.partial_report = partial_report


class ProtocolError(Exception):
    """Unexpected HTTP status from the controller."""

    def __init__(self, status: int, body: bytes, partial_report=None):
        snippet = body[:200].decode("utf-8", errors="replace")
        super().__init__(f"HTTP {status}: {snippet}")
        self.status = status
        self.snippet = snippet
        self.partial_report = partial_report


@dataclass
class ControllerEndpoint:
    base_url: str
    timeout: float = 10.0
    retries: int = 2
    backoff_base: float = 0.1
    links_path: str = LINKS_PATH
    devices_path: str = DEVICES_PATH
    push_path: str = PUSH_PATH
    list_path: str = LIST_PATH

    def __post_init__(self):
        if not self.base_url.startswith(("http://", "https://")):
            raise ValueError(f"base_url must be http(s), got {self.base_url!r}")
        self.base_url = self.base_url.rstrip("/")


def _request_with_retries(ep: ControllerEndpoint, method: str, url: str, body: bytes | None):
    """Retry transport failures and 5xx up to ep.retries with backoff."""
    last_exc = None
    for attempt in range(ep.retries + 1):
        if attempt:
            time.sleep(ep.backoff_base * 2 ** (attempt - 1))
        try:
            resp = requests.request(method, url, data=body, timeout=ep.timeout)
        except (requests.ConnectionError, requests.Timeout) as e:
            last_exc = e
            continue
        if resp.status_code >= 500:
            last_exc = ProtocolError(resp.status_code, resp.content)
            continue
        return resp
    if isinstance(last_exc, ProtocolError):
        raise last_exc
    raise TransportError(f"{method} {url} failed after {ep.retries + 1} attempts: {last_exc}")


def fetch_topology(ep: ControllerEndpoint) -> tuple[bytes, bytes]:
    """GET the links and devices views; returns the raw bodies."""
    bodies = []
    for path in (ep.links_path, ep.devices_path):
        resp = _request_with_retries(ep, "GET", ep.base_url + path, None)
        if resp.status_code != 200:
            raise ProtocolError(resp.status_code, resp.content)
        bodies.append(resp.content)
    return bodies[0], bodies[1]


@dataclass
class PushReport:
    accepted: int = 0
    rejected: list[tuple[str, str]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "accepted": self.accepted,
            "rejected": [{"name": n, "reason": r} for n, r in self.rejected],
        }


def push_flows(ep: ControllerEndpoint, batch: FlowBatch) -> PushReport:
    """POST one entry at a time; stop on transport errors, record rejects."""
    report = PushReport()
    url = ep.base_url + ep.push_path
    for entry in batch.entries:
        try:
            resp = _request_with_retries(ep, "POST", url, render_entry(entry))
        except TransportError as e:
            e.partial_report = report
            raise
        except ProtocolError as e:
            e.partial_report = report
            raise
        if resp.status_code == 200:
            report.accepted += 1
        else:
            reason = _reject_reason(resp.content)
            report.rejected.append((entry.name, reason))
            log.warning("flow %s rejected: %s", entry.name, reason)
    return report


def _reject_reason(body: bytes) -> str:
    try:
        doc = json.loads(body)
        if isinstance(doc, dict) and "error" in doc:
            return str(doc["error"])
    except ValueError:
        pass
    return body[:200].decode("utf-8", errors="replace")


class MockController:
    """Hermetic stand-in for the controller's northbound REST surface.

    Serves the fixture bytes on the links/devices GET paths, validates
    POSTed static flow entries against the fixture topology (known
    switch, real in_port and output port), and records accepted entries
    in arrival order behind a lock.
    """

    def __init__(self, links_json: bytes, devices_json: bytes, bind_addr=("127.0.0.1", 0)):
        self.links_json = links_json
        self.devices_json = devices_json
        self.topology: Topology = parse_topology(links_json, devices_json)
        self.ports: dict[str, set[int]] = {dpid: set() for dpid in self.topology.switches}
        for link in self.topology.links:
            self.ports[link.src].add(link.src_port)
            self.ports[link.dst].add(link.dst_port)
        for host in self.topology.hosts:
            self.ports[host.attached_switch].add(host.attached_port)
        self.received_flows: list[FlowEntry] = []
        self._lock = threading.Lock()
        self._server = ThreadingHTTPServer(bind_addr, _make_handler(self))
        # short poll so close() returns promptly
        self._thread = threading.Thread(
            target=lambda: self._server.serve_forever(poll_interval=0.05), daemon=True
        )

    def start(self) -> "MockController":
        self._thread.start()
        return self

    @property
    def base_url(self) -> str:
        host, port = self._server.server_address[:2]
        return f"http://{host}:{port}"

    def validate(self, entry: FlowEntry) -> str | None:
        """Reason string when the entry is invalid, else None."""
        if entry.switch not in self.ports:
            return "unknown switch"
        if entry.in_port not in self.ports[entry.switch]:
            return f"unknown port {entry.in_port} on {entry.switch}"
        try:
            out = entry.output_port
        except ValueError:
            return f"unsupported actions {entry.actions!r}"
        if out not in self.ports[entry.switch]:
            return f"unknown port {out} on {entry.switch}"
        return None

    def record(self, entry: FlowEntry) -> None:
        with self._lock:
            self.received_flows.append(entry)

    def listed_flows(self) -> bytes:
        with self._lock:
            entries = list(self.received_flows)
        docs = [json.loads(render_entry(e)) for e in entries]
        return json.dumps(docs).encode("utf-8")

    def join(self, timeout: float | None = None) -> None:
        """Block on the serving thread (for foreground use)."""
        self._thread.join(timeout)

    def close(self) -> None:
        self._server.shutdown()
        self._server.server_close()

    def __enter__(self) -> "MockController":
        return self

    def __exit__(self, *exc) -> None:
        self.close()


def _make_handler(mock: MockController):
    class Handler(BaseHTTPRequestHandler):
        def log_message(self, fmt, *args):
            log.debug("mock: " + fmt, *args)

        def _send(self, status: int, body: bytes):
            self.send_response(status)
            self.send_header("Content-Type", "application/json")
            self.send_header("Content-Length", str(len(body)))
            self.end_headers()
            self.wfile.write(body)

        def do_GET(self):
            if self.path == LINKS_PATH:
                self._send(200, mock.links_json)
            elif self.path == DEVICES_PATH:
                self._send(200, mock.devices_json)
            elif self.path == LIST_PATH:
                self._send(200, mock.listed_flows())
            else:
                self._send(404, b'{"error":"not found"}')

        def do_POST(self):
            if self.path != PUSH_PATH:
                self._send(404, b'{"error":"not found"}')
                return
            length = int(self.headers.get("Content-Length", 0))
            body = self.rfile.read(length)
            try:
                entry = _parse_posted_entry(body)
            except ValueError as e:
                self._send(400, json.dumps({"error": str(e)}).encode("utf-8"))
                return
            reason = mock.validate(entry)
            if reason is not None:
                self._send(400, json.dumps({"error": reason}).encode("utf-8"))
                return
            mock.record(entry)
            self._send(200, b'{"status":"Entry pushed"}')

    return Handler


def _parse_posted_entry(body: bytes) -> FlowEntry:
    from .flows import parse_entry

    try:
        return parse_entry(body)
    except (ValueError, json.JSONDecodeError) as e:
        raise ValueError(f"malformed flow entry: {e}") from None


def run_mock_controller(fixture: tuple[bytes, bytes], bind_addr=("127.0.0.1", 0)) -> MockController:
    """Start the mock on bind_addr; returns the running server handle."""
    links_json, devices_json = fixture
    try:
        return MockController(links_json, devices_json, bind_addr).start()
    except OSError as e:
        raise TransportError(f"cannot bind mock controller on {bind_addr}: {e}") from e
