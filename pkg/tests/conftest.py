import dataclasses
import json
import threading
from pathlib import Path

import pytest

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(scope="session")
def sarah_script() -> dict:
    return json.loads((FIXTURES / "mock_scripts" / "sarah.json").read_text())


@pytest.fixture(scope="session")
def base_components(tmp_path_factory, sarah_script):
    """Heavy shared read-only components (corpus, graph, indexes), built
    once; tests derive per-test apps with fresh stores and clients."""
    from uxrec.llm import MockChatClient
    from uxrec.service import load_components, load_config

    seed_dir = tmp_path_factory.mktemp("seed-sessions")
    config = load_config(FIXTURES / "service_config.json", environ={
        "UXREC_SESSIONS_DIR": json.dumps(str(seed_dir))})
    return load_components(config, client=MockChatClient(sarah_script))


@pytest.fixture
def make_app(base_components, sarah_script, tmp_path):
    """Factory: a fresh app over the shared components with an isolated
    session store, risk cache, and (optionally custom) mock client."""
    from uxrec.llm import MockChatClient, ThrottledClient
    from uxrec.service import SessionStore, create_app

    def factory(script=None, client=None, sessions_dir=None, cart_scope=None):
        inner = client if client is not None else MockChatClient(
            script if script is not None else dict(sarah_script))
        config = base_components.config
        if cart_scope:
            config = dataclasses.replace(config, cart_scope=cart_scope)
        components = dataclasses.replace(
            base_components,
            config=config,
            client=ThrottledClient(inner, base_components.config.max_inflight_llm),
            store=SessionStore(sessions_dir or tmp_path / "sessions"),
            risk_cache={},
            risk_cache_lock=threading.Lock(),
        )
        return create_app(components), components, inner

    return factory
