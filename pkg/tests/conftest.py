import sys
from functools import lru_cache
from pathlib import Path

import pytest

# Add project root to path
PROJECT_ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(PROJECT_ROOT))

from src.config import Config
from src.corpus import load_corpus
from src.resolver import load_program
from src.terms import reachable
from src.type_checker import check


@lru_cache(maxsize=None)
def _shared_corpus():
    return load_corpus(Config.CORPUS_DIR)


@pytest.fixture(scope="session")
def corpus():
    return _shared_corpus()


@pytest.fixture(scope="session")
def client_server(corpus):
    return corpus.programs["client_server.mps"]


@pytest.fixture(scope="session")
def counterexamples(corpus):
    return corpus.programs["counterexamples.mps"]


@pytest.fixture
def load():
    """Resolve a DSL snippet."""
    return load_program


def _copy_graph(root):
    copies = {id(node): node if node.is_terminal else type(node)() for node in reachable(root)}
    for node in reachable(root):
        if not node.is_terminal:
            for key, child in node.branches:
                copies[id(node)].add_branch(key, copies[id(child)])
            copies[id(node)].seal()
    return copies[id(root)]


@pytest.fixture
def copy_graph():
    """Structural copy of a term graph: fresh nodes, same shape."""
    return _copy_graph


# ── Corpus parametrization ───────────────────────────────────────────────

def _declared():
    corpus = _shared_corpus()
    for file_name, g_name, s_name in corpus.declared_checks():
        program = corpus.programs[file_name]
        yield f"{g_name}-{s_name}", (program.globals[g_name], program.sessions[s_name])


def _pairs(fixture: str):
    declared = list(_declared())
    if fixture == "declared_pair":
        return declared
    sound_mode = fixture == "sound_typed_pair"
    return [(name, pair) for name, pair in declared if check(*pair, sound_mode=sound_mode).accepted]


def _sessions():
    corpus = _shared_corpus()
    return sorted(corpus.sessions.items())


def pytest_generate_tests(metafunc):
    """``declared_pair``, ``typed_pair``, ``sound_typed_pair`` and ``corpus_session`` range over the corpus."""
    for fixture in ("declared_pair", "typed_pair", "sound_typed_pair"):
        if fixture in metafunc.fixturenames:
            pairs = _pairs(fixture)
            metafunc.parametrize(fixture, [pair for _, pair in pairs], ids=[name for name, _ in pairs])
    if "corpus_session" in metafunc.fixturenames:
        sessions = _sessions()
        metafunc.parametrize("corpus_session", [s for _, s in sessions], ids=[name for name, _ in sessions])
