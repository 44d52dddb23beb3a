import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from bimnav.agents import RuleBasedLlmClient, SearchContext
from bimnav.index import ReferenceEncoder, build_index
from bimnav.ingest import extract_entities, load_manifest_file, parse_step_subset
from bimnav.service import build_world, load_config
from bimnav.spatial import build_nav_grid

FIXTURES = Path(__file__).parent.parent / "fixtures"


@pytest.fixture(scope="session")
def manifest_model():
    return load_manifest_file(FIXTURES / "building.json")


@pytest.fixture(scope="session")
def step_model():
    return parse_step_subset((FIXTURES / "building.ifc").read_bytes())


@pytest.fixture(scope="session")
def entities(manifest_model):
    return extract_entities(manifest_model)


@pytest.fixture(scope="session")
def entities_by_id(entities):
    return {e.id: e for e in entities}


@pytest.fixture(scope="session")
def encoder():
    return ReferenceEncoder()


@pytest.fixture(scope="session")
def store(entities, encoder):
    return build_index(list(entities), encoder)


@pytest.fixture(scope="session")
def grid(manifest_model):
    return build_nav_grid(manifest_model)


@pytest.fixture(scope="session")
def search_context(store, encoder):
    return SearchContext(store=store, encoder=encoder)


@pytest.fixture
def llm():
    return RuleBasedLlmClient()


@pytest.fixture(scope="session")
def service_config():
    return load_config(None, env={}, model_path=str(FIXTURES / "building.json"))


@pytest.fixture(scope="session")
def world(service_config):
    return build_world(service_config)
