import pytest

from declarith import Hyperparams, default_lexicon, default_rules, heldout_problems, train_problems
from declarith.learning import train


@pytest.fixture(scope="session")
def xrules():
    return default_rules()


@pytest.fixture(scope="session")
def lexicon():
    return default_lexicon()


@pytest.fixture(scope="session")
def corpus_train(xrules):
    return train_problems(xrules)


@pytest.fixture(scope="session")
def corpus_heldout(xrules):
    return heldout_problems(xrules)


@pytest.fixture(scope="session")
def trained(corpus_train, xrules):
    """Model and log from one default training run, shared across tests."""
    return train(corpus_train, Hyperparams(), xrules=xrules, seed=42)
