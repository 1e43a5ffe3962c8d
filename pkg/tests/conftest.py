from __future__ import annotations

from pathlib import Path

import pytest

from quake.core.coverage import build_pairwise_universe
from quake.core.models.context import ContextSchema, EpConfig
from quake.core.models.coverage import CoverageUniverse
from quake.core.models.policy import AdaptationPolicy
from quake.core.models.search import SearchConfig
from quake.core.policy_parser import parse_policy
from quake.templates.registry import read_template


def pytest_collection_modifyitems(items: list[pytest.Item]) -> None:
    """Automatically add markers based on test location.

    - tests/unit/ -> @pytest.mark.unit
    - tests/integration/ -> @pytest.mark.integration
    - tests/e2e/ -> @pytest.mark.e2e
    """
    for item in items:
        path = str(item.fspath)
        # Skip if already has the marker (manually specified)
        existing_markers = {m.name for m in item.iter_markers()}

        if "/unit/" in path and "unit" not in existing_markers:
            item.add_marker(pytest.mark.unit)
        elif "/integration/" in path and "integration" not in existing_markers:
            item.add_marker(pytest.mark.integration)
        elif "/e2e/" in path and "e2e" not in existing_markers:
            item.add_marker(pytest.mark.e2e)


@pytest.fixture
def web_schema() -> ContextSchema:
    """The shipped web-server schema: density, files, dispersion."""
    return ContextSchema.model_validate_json(read_template("schema"))


@pytest.fixture
def line_schema() -> ContextSchema:
    """One integer property 0..100, so distances are |a - b| / 100."""
    return ContextSchema.model_validate(
        {"properties": [{"name": "x", "kind": "integer", "lower": 0, "upper": 100}]}
    )


@pytest.fixture
def ordered_schema() -> ContextSchema:
    """Two properties 1..4 with p2 <= p1."""
    return ContextSchema.model_validate(
        {
            "properties": [
                {"name": "p1", "kind": "integer", "lower": 1, "upper": 4},
                {"name": "p2", "kind": "integer", "lower": 1, "upper": 4},
            ],
            "constraints": ["p2 <= p1"],
        }
    )


@pytest.fixture
def binary_schema() -> ContextSchema:
    return ContextSchema.model_validate(
        {
            "properties": [
                {"name": "a", "kind": "integer", "lower": 0, "upper": 1},
                {"name": "b", "kind": "integer", "lower": 0, "upper": 1},
            ]
        }
    )


@pytest.fixture
def reference_policy(web_schema: ContextSchema) -> AdaptationPolicy:
    return parse_policy(read_template("policy"), web_schema.names)


@pytest.fixture
def coarse_universe(web_schema: ContextSchema) -> CoverageUniverse:
    return build_pairwise_universe(web_schema, web_schema.coverage_samples)


@pytest.fixture
def fast_search(web_schema: ContextSchema) -> SearchConfig:
    """Small budgets that keep a full global search under a second or two."""
    return SearchConfig(
        flow_length=12,
        hard_limit=20,
        stale_limit=8,
        local_iterations=40,
        neighborhood=8,
        seed=7,
        ep=web_schema.ep or EpConfig(),
    )


SMALL_CONFIG = """\
schema: web_server.json
policy: web_server.policy
search:
  flow_length: 10
  hard_limit: 6
  stale_limit: 3
  local_iterations: 20
  neighborhood: 6
  seed: 11
mutation_plan:
  F1: 2
  F2: 2
  F3: 2
  F4: 2
"""

FLOW_HEADER = "flow_id,seq,request_density,file_number,request_dispersion\n"


@pytest.fixture
def run_dir(tmp_path: Path) -> Path:
    """Shipped schema and policy next to a config with small search budgets."""
    (tmp_path / "web_server.json").write_text(read_template("schema"), encoding="utf-8")
    (tmp_path / "web_server.policy").write_text(read_template("policy"), encoding="utf-8")
    (tmp_path / "quake.yaml").write_text(SMALL_CONFIG, encoding="utf-8")
    return tmp_path


@pytest.fixture
def scenario_csv(tmp_path: Path) -> Path:
    """Two flows: the calm/spike/calm scenario and a three-step ramp."""
    path = tmp_path / "flows.csv"
    path.write_text(
        FLOW_HEADER
        + "scenario,0,10,5,1.0\nscenario,1,1000,50,0.0\nscenario,2,10,5,1.0\n"
        + "ramp,0,1,1,0.0\nramp,1,500,250,0.5\nramp,2,1000,500,1.0\n",
        encoding="utf-8",
    )
    return path


@pytest.fixture
def suite_dir(tmp_path: Path, scenario_csv: Path) -> Path:
    """A suite directory without an index: flows are read from its CSV files."""
    suite = tmp_path / "suite1"
    suite.mkdir()
    (suite / "flows.csv").write_text(scenario_csv.read_text(encoding="utf-8"), encoding="utf-8")
    return suite
