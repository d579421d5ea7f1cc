from __future__ import annotations

import pytest

from helpers import make_hurricane_corpus, make_hurricane_gazetteer
from hyperrag import TrigramEncoder, build_index, extract_all


@pytest.fixture(scope="session")
def trigram() -> TrigramEncoder:
    return TrigramEncoder()


@pytest.fixture()
def hurricane_corpus():
    return make_hurricane_corpus()


@pytest.fixture()
def hurricane_gazetteer():
    return make_hurricane_gazetteer()


@pytest.fixture()
def hurricane_labels(hurricane_corpus, hurricane_gazetteer):
    return extract_all(hurricane_corpus, hurricane_gazetteer)


@pytest.fixture()
def hurricane_index(hurricane_corpus, hurricane_labels, trigram):
    return build_index(hurricane_corpus, hurricane_labels, encoder=trigram)
