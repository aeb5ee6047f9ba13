from __future__ import annotations

import threading
import time
from importlib import resources

import pytest

from xdialog import Move, MoveKind, Role, default_protocol
from xdialog.corpus import parse_corpus


def bundled(name: str) -> str:
    return resources.files("xdialog.data").joinpath(name).read_text("utf-8")


@pytest.fixture(scope="session")
def protocol():
    return default_protocol()


@pytest.fixture(scope="session")
def mini_text():
    return bundled("mini_corpus.json")


@pytest.fixture(scope="session")
def mini_corpus(mini_text):
    return parse_corpus(mini_text, strict=True)


@pytest.fixture(scope="session")
def synthetic_corpus():
    return parse_corpus(bundled("synthetic_398.json"), strict=True)


def make_golden_trace() -> tuple[Move, ...]:
    """The worked example path: question, explanation, affirmation, then a
    full argumentation episode, closed explicitly."""
    steps = [
        (MoveKind.QUESTION_WHAT, Role.Q),
        (MoveKind.EXPLANATION, Role.E),
        (MoveKind.EXPLAINEE_AFFIRMATION, Role.Q),
        (MoveKind.ARGUMENT_OPEN, Role.Q),
        (MoveKind.ARGUMENT_BODY, Role.Q),
        (MoveKind.ARGUMENT_AFFIRMATION, Role.E),
        (MoveKind.END_DIALOG, Role.E),
    ]
    return tuple(Move(kind, actor) for kind, actor in steps)


@pytest.fixture(scope="session")
def golden_trace():
    return make_golden_trace()


@pytest.fixture()
def live_server(tmp_path):
    """A real uvicorn server on an ephemeral port, for concurrency tests."""
    import uvicorn

    from xdialog.service import create_app

    app = create_app(data_dir=tmp_path / "sessions")
    config = uvicorn.Config(app, host="127.0.0.1", port=0, log_level="warning")
    server = uvicorn.Server(config)
    thread = threading.Thread(target=server.run, daemon=True)
    thread.start()
    deadline = time.time() + 10
    while not server.started:
        if time.time() > deadline:
            raise RuntimeError("server did not start")
        time.sleep(0.01)
    port = server.servers[0].sockets[0].getsockname()[1]
    yield f"http://127.0.0.1:{port}", app.state.store
    server.should_exit = True
    thread.join(timeout=5)
