import pytest

from hatescope.corpus import Corpus, Document

ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture
def make_corpus():
    def make(texts, labels=None):
        return Corpus.from_texts(texts, labels)

    return make


@pytest.fixture
def write(tmp_path):
    def write(name, content, mode="w"):
        p = tmp_path / name
        if mode == "wb":
            p.write_bytes(content)
        else:
            p.write_text(content, encoding="utf-8")
        return p

    return write


__all__ = ["Corpus", "Document"]
