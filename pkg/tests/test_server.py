from __future__ import annotations

import json
import socket

from conftest import WALKTHROUGH as WALKTHROUGH_TEXT
from rslice.server import ServerSession, handle_message, hello_message


class TestHandleMessage:
    def setup_method(self):
        self.session = ServerSession()

    def analyze_walkthrough(self):
        return handle_message(
            {"type": "file-analysis", "id": "a", "content": WALKTHROUGH_TEXT},
            self.session,
        )

    def test_hello_shape(self):
        hello = hello_message()
        assert hello["type"] == "hello"
        assert "version" in hello

    def test_file_analysis_summary(self):
        response = self.analyze_walkthrough()
        assert response["type"] == "file-analysis-response"
        assert response["id"] == "a"
        assert response["vertices"] > 0 and response["edges"] > 0
        assert response["diagnostics"] == 1

    def test_query_dependencies(self):
        self.analyze_walkthrough()
        response = handle_message(
            {"type": "query", "id": "1", "queries": [{"type": "dependencies"}]},
            self.session,
        )
        assert response["type"] == "query-response"
        assert response["id"] == "1"
        assert len(response["results"]["dependencies"]["libraries"]) == 2

    def test_slice_on_tiny_program(self):
        handle_message(
            {"type": "file-analysis", "id": "a", "content": "x <- 2"}, self.session
        )
        response = handle_message(
            {"type": "slice", "id": "2", "criteria": ["$2"]}, self.session
        )
        assert response["ids"] == [0, 1, 2]
        assert response["direction"] == "backward"

    def test_lint_response(self):
        self.analyze_walkthrough()
        response = handle_message({"type": "lint", "id": "3"}, self.session)
        assert response["type"] == "lint-response"
        assert [d["rule"] for d in response["diagnostics"]] == ["absolute-file-path"]

    def test_apply_fix_roundtrip(self):
        handle_message(
            {"type": "file-analysis", "id": "a", "content": "x <- 2\ny <- 1\nprint(y)"},
            self.session,
        )
        lint_response = handle_message({"type": "lint", "id": "l"}, self.session)
        index = next(
            i for i, d in enumerate(lint_response["diagnostics"]) if "fix" in d
        )
        response = handle_message(
            {"type": "apply-fix", "id": "f", "diagnostic": index}, self.session
        )
        assert response["type"] == "apply-fix-response"
        assert response["content"] == "y <- 1\nprint(y)"

    def test_unknown_type_is_error_with_id(self):
        response = handle_message({"type": "bogus", "id": "9"}, self.session)
        assert response["type"] == "error"
        assert response["id"] == "9"

    def test_request_before_analysis_errors(self):
        response = handle_message({"type": "lint", "id": "1"}, self.session)
        assert response["type"] == "error"

    def test_malformed_message(self):
        response = handle_message({"no-type": True}, self.session)
        assert response["type"] == "error"


def _recv_line(sock_file) -> dict:
    line = sock_file.readline()
    assert line, "server closed the connection unexpectedly"
    return json.loads(line)


class TestLiveTcp:
    def connect(self, port):
        sock = socket.create_connection(("127.0.0.1", port), timeout=5)
        return sock, sock.makefile("rw", encoding="utf-8")

    def test_scripted_session(self, live_server):
        sock, io = self.connect(live_server)
        with sock:
            hello = _recv_line(io)
            assert hello["type"] == "hello"

            io.write(json.dumps({"type": "file-analysis", "id": "1", "content": WALKTHROUGH_TEXT}) + "\n")
            io.flush()
            analysis = _recv_line(io)
            assert analysis["type"] == "file-analysis-response" and analysis["id"] == "1"

            io.write(json.dumps({"type": "query", "id": "2", "queries": [{"type": "dependencies"}]}) + "\n")
            io.flush()
            deps = _recv_line(io)
            assert len(deps["results"]["dependencies"]["libraries"]) == 2

            io.write("not json\n")
            io.flush()
            error = _recv_line(io)
            assert error["type"] == "error"

            # the connection survives a malformed message
            io.write(json.dumps({"type": "lint", "id": "3"}) + "\n")
            io.flush()
            lint_response = _recv_line(io)
            assert lint_response["id"] == "3"

    def test_sessions_are_isolated(self, live_server):
        sock_a, io_a = self.connect(live_server)
        sock_b, io_b = self.connect(live_server)
        with sock_a, sock_b:
            _recv_line(io_a)
            _recv_line(io_b)
            io_a.write(json.dumps({"type": "file-analysis", "id": "1", "content": "x <- 2"}) + "\n")
            io_a.flush()
            _recv_line(io_a)
            # a fresh session on another socket has no analysis yet
            io_b.write(json.dumps({"type": "lint", "id": "1"}) + "\n")
            io_b.flush()
            response = _recv_line(io_b)
            assert response["type"] == "error"

    def test_interleaved_requests_pair_ids_in_order(self, live_server):
        sock, io = self.connect(live_server)
        with sock:
            _recv_line(io)
            batch = [
                {"type": "file-analysis", "id": "r1", "content": "x <- 2"},
                {"type": "slice", "id": "r2", "criteria": ["$2"]},
                {"type": "lint", "id": "r3"},
            ]
            io.write("".join(json.dumps(m) + "\n" for m in batch))
            io.flush()
            ids = [_recv_line(io)["id"] for _ in batch]
            assert ids == ["r1", "r2", "r3"]

    def test_disconnect_mid_request_keeps_server_alive(self, live_server):
        sock, io = self.connect(live_server)
        _recv_line(io)
        io.write(json.dumps({"type": "file-analysis", "id": "1", "content": "x <- 2"})[:20])
        io.flush()
        sock.close()
        # a new client still gets served
        sock2, io2 = self.connect(live_server)
        with sock2:
            assert _recv_line(io2)["type"] == "hello"


def test_websocket_transport(live_ws_server):
    import asyncio

    import websockets

    async def scripted() -> None:
        async with websockets.connect(f"ws://127.0.0.1:{live_ws_server}") as ws:
            hello = json.loads(await ws.recv())
            assert hello["type"] == "hello"
            await ws.send(json.dumps({"type": "file-analysis", "id": "1", "content": "x <- 2"}))
            response = json.loads(await ws.recv())
            assert response["type"] == "file-analysis-response"
            assert response["vertices"] == 3
            await ws.send(json.dumps({"type": "slice", "id": "2", "criteria": ["$2"]}))
            sliced = json.loads(await ws.recv())
            assert sliced["ids"] == [0, 1, 2]

    asyncio.run(scripted())


def test_round_trip_of_golden_messages():
    messages = [
        hello_message(),
        {"type": "file-analysis", "id": "1", "content": "x <- 2"},
        {"type": "query", "id": "2", "queries": [{"type": "dependencies"}]},
        {"type": "slice", "id": "3", "criteria": ["$2"], "direction": "backward"},
        {"type": "lint", "id": "4"},
        {"type": "apply-fix", "id": "5", "diagnostic": 0},
        {"type": "error", "id": None, "message": "boom"},
    ]
    for message in messages:
        assert json.loads(json.dumps(message)) == message
