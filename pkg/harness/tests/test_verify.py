import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from lab_paths import FIXTURE_DIR
from mn_harness import (
    DiffReport,
    TransportError,
    VerifyError,
    canonical_link,
    format_link,
    verify_live_topology,
)


@pytest.fixture()
def scripted_server():
    """Minimal HTTP server answering every GET with one canned response."""
    servers = []

    def _serve(status: int, body: bytes) -> str:
        class Handler(BaseHTTPRequestHandler):
            def log_message(self, *a):
                pass

            def do_GET(self):
                self.send_response(status)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

        server = HTTPServer(("127.0.0.1", 0), Handler)
        thread = threading.Thread(
            target=lambda: server.serve_forever(poll_interval=0.05), daemon=True
        )
        thread.start()
        servers.append(server)
        return f"http://127.0.0.1:{server.server_address[1]}"

    yield _serve
    for server in servers:
        server.shutdown()
        server.server_close()


class TestVerify:
    def test_matching_lab_gives_empty_diff(self, spawn_mock):
        url = spawn_mock(FIXTURE_DIR)
        report = verify_live_topology(url, FIXTURE_DIR)
        assert report.ok
        assert report.missing == [] and report.unexpected == []
        assert str(report) == "live topology matches the fixture"

    def test_missing_link_is_named(self, spawn_mock, reduced_fixture):
        reduced_dir, dropped = reduced_fixture
        url = spawn_mock(reduced_dir)
        report = verify_live_topology(url, FIXTURE_DIR)
        assert not report.ok
        want = canonical_link(
            dropped["src-switch"], dropped["src-port"],
            dropped["dst-switch"], dropped["dst-port"],
        )
        assert report.missing == [want]
        assert report.unexpected == []
        assert format_link(want) in str(report)
        assert str(report).startswith("missing:")

    def test_extra_live_link_is_unexpected(self, spawn_mock, reduced_fixture):
        reduced_dir, dropped = reduced_fixture
        url = spawn_mock(FIXTURE_DIR)
        report = verify_live_topology(url, reduced_dir)
        want = canonical_link(
            dropped["src-switch"], dropped["src-port"],
            dropped["dst-switch"], dropped["dst-port"],
        )
        assert report.missing == []
        assert report.unexpected == [want]
        assert "unexpected:" in str(report)

    def test_controller_down_is_transport_error(self):
        with pytest.raises(TransportError):
            verify_live_topology("http://127.0.0.1:9", FIXTURE_DIR, timeout=0.5)

    def test_http_error_status(self, scripted_server):
        url = scripted_server(500, b"boom")
        with pytest.raises(VerifyError, match="500"):
            verify_live_topology(url, FIXTURE_DIR)

    def test_non_json_payload(self, scripted_server):
        url = scripted_server(200, b"<html>not a controller</html>")
        with pytest.raises(VerifyError, match="JSON"):
            verify_live_topology(url, FIXTURE_DIR)

    def test_wrong_shape_payload(self, scripted_server):
        url = scripted_server(200, b'{"links": "nope"}')
        with pytest.raises(VerifyError, match="malformed"):
            verify_live_topology(url, FIXTURE_DIR)


class TestDiffReport:
    def test_ok_only_when_both_sides_empty(self):
        link = canonical_link("00:01", 1, "00:02", 2)
        assert DiffReport().ok
        assert not DiffReport(missing=[link]).ok
        assert not DiffReport(unexpected=[link]).ok

    def test_str_lists_every_link(self):
        a = canonical_link("00:01", 1, "00:02", 2)
        b = canonical_link("00:03", 1, "00:04", 2)
        text = str(DiffReport(missing=[a], unexpected=[b]))
        assert f"missing:    {format_link(a)}" in text
        assert f"unexpected: {format_link(b)}" in text
