from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))  # make `oracles` importable

from dialight.corpus import load_dataset
from dialight.database import load_databases
from dialight.gateway import BackendDescriptor, ModelGateway
from dialight.orchestrator import DialogueEngine
from dialight.replay import ReplayScript, ReplayServer

DATA_DIR = Path(__file__).parent / "data"


@pytest.fixture(scope="session")
def data_dir() -> Path:
    return DATA_DIR


@pytest.fixture(scope="session")
def dataset():
    return load_dataset(DATA_DIR / "corpus.json", DATA_DIR / "ontology.json")


@pytest.fixture(scope="session")
def corpus(dataset):
    return dataset[0]


@pytest.fixture(scope="session")
def ontology(dataset):
    return dataset[1]


@pytest.fixture(scope="session")
def databases(ontology):
    return load_databases(DATA_DIR / "db", ontology)


@pytest.fixture(scope="session")
def gold_script(corpus) -> ReplayScript:
    return ReplayScript.from_corpus(corpus)


@pytest.fixture()
def replay_server(gold_script):
    with ReplayServer(script=gold_script, instance_id="replay-a") as server:
        yield server


@pytest.fixture()
def engine(replay_server, ontology, databases):
    """A full in-process pipeline backed by one gold replay instance."""
    gateway = ModelGateway()
    gateway.register_backend(
        BackendDescriptor(id="dst", task="dst", mode="structured", instances=(replay_server.url,))
    )
    gateway.register_backend(
        BackendDescriptor(id="rg", task="rg", mode="structured", instances=(replay_server.url,))
    )
    return DialogueEngine(gateway, ontology, databases)
