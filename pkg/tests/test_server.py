"""Wire protocol: frames, isolation between sessions, malformed input."""

import pytest
from starlette.testclient import TestClient

from itreesim.corpus import corpus_source
from itreesim.lang import load_program
from itreesim.sim.server import create_app
from itreesim.values import VList


@pytest.fixture(scope="module")
def client():
    table = load_program(corpus_source("buffer.itp"))
    target = table.instantiate("buffer", [VList(())])
    return TestClient(create_app(target))


def recv_until(ws, kind):
    seen = []
    for _ in range(50):
        f = ws.receive_json()
        seen.append(f)
        if f["type"] == kind:
            return f, seen
    raise AssertionError(f"no {kind} frame in {seen}")


def test_hello_and_initial_menu(client):
    with client.websocket_connect("/ws") as ws:
        hello = ws.receive_json()
        assert hello["type"] == "hello"
        assert hello["protocol"] == 1
        assert hello["process"] == "buffer"
        menu, _ = recv_until(ws, "menu")
        texts = [e["text"] for e in menu["events"]]
        assert texts == ["Input.0", "Input.1", "Input.2", "Input.3", "State.[]"]


def test_choose_round_trip(client):
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_json({"type": "choose", "event": {"channel": "Input", "value": 2}})
        acc, _ = recv_until(ws, "accepted")
        assert acc["event"]["text"] == "Input.2"
        menu, _ = recv_until(ws, "menu")
        assert "Output.2" in [e["text"] for e in menu["events"]]


def test_choose_by_index(client):
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_json({"type": "choose", "index": 1})
        acc, _ = recv_until(ws, "accepted")
        assert acc["event"]["text"] == "Input.1"


def test_rejected_keeps_session(client):
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_json({"type": "choose", "event": {"channel": "Output", "value": 5}})
        rej, _ = recv_until(ws, "rejected")
        # still on the initial menu: a valid choice works
        ws.send_json({"type": "choose", "index": 0})
        recv_until(ws, "accepted")


def test_malformed_frames(client):
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_text("this is not json")
        rej, _ = recv_until(ws, "rejected")
        assert rej["reason"] == "not JSON"
        ws.send_json({"nope": 1})
        recv_until(ws, "rejected")
        ws.send_json({"type": "choose"})
        recv_until(ws, "rejected")
        ws.send_json({"type": "warp"})
        recv_until(ws, "rejected")


def test_two_sessions_are_isolated(client):
    with client.websocket_connect("/ws") as a, client.websocket_connect("/ws") as b:
        recv_until(a, "menu")
        recv_until(b, "menu")
        a.send_json({"type": "choose", "event": {"channel": "Input", "value": 3}})
        menu_a, _ = recv_until(a, "menu")
        assert "Output.3" in [e["text"] for e in menu_a["events"]]
        # session b is untouched: Output not yet offered there
        b.send_json({"type": "choose", "event": {"channel": "Input", "value": 1}})
        menu_b, _ = recv_until(b, "menu")
        assert "Output.1" in [e["text"] for e in menu_b["events"]]
        assert "Output.3" not in [e["text"] for e in menu_b["events"]]


def test_reset_command(client):
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_json({"type": "choose", "index": 0})
        recv_until(ws, "menu")
        ws.send_json({"type": "reset"})
        menu, _ = recv_until(ws, "menu")
        assert [e["text"] for e in menu["events"]][-1] == "State.[]"


def test_many_steps_continue_and_end():
    table = load_program(corpus_source("demo.itp"))
    target = table.instantiate("spin", [])
    client = TestClient(create_app(target))
    with client.websocket_connect("/ws") as ws:
        many, _ = recv_until(ws, "manySteps")
        assert many["count"] == 20
        ws.send_json({"type": "continue"})
        recv_until(ws, "manySteps")
        ws.send_json({"type": "end"})
        recv_until(ws, "ended")


def test_terminated_frame():
    table = load_program(corpus_source("demo.itp"))
    target = table.instantiate("finish", [])
    client = TestClient(create_app(target))
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "menu")
        ws.send_json({"type": "choose", "index": 0})
        term, _ = recv_until(ws, "terminated")
        assert term["value"] is None  # unit


def test_deadlocked_frame():
    table = load_program(corpus_source("demo.itp"))
    target = table.instantiate("dead", [])
    client = TestClient(create_app(target))
    with client.websocket_connect("/ws") as ws:
        recv_until(ws, "deadlocked")
