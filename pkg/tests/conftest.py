from pathlib import Path

import pytest
from hypothesis import HealthCheck, settings

from lkgrammar import kernel as K
from lkgrammar.analysis import corpus_paths, load_corpus

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

CORPUS = {path.stem: path for path in corpus_paths()}
GOLDEN = Path(__file__).parent / "golden"


def problem(stem: str) -> K.Problem:
    return K.load_problem(CORPUS[stem])


def proof(stem: str) -> K.Proof:
    return problem(stem).proof


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
