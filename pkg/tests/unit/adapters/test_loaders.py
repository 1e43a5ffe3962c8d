from __future__ import annotations

import json

import msgspec
import pytest

from quake.adapters.loaders.json_schema_loader import JsonSchemaLoader, decode_json, locate
from quake.adapters.loaders.plan_loader import load_plan, plan_from_payload
from quake.adapters.loaders.policy_loader import load_policy
from quake.adapters.loaders.yaml_config_loader import YamlConfigLoader
from quake.core.models.enums import FaultGroup
from quake.core.models.mutation import Identity, MutantSpec, MutationPlan
from quake.errors import (
    ConfigError,
    PlanError,
    PolicySyntaxError,
    SchemaParseError,
)
from quake.templates.registry import read_template


@pytest.fixture
def template_dir(tmp_path):
    (tmp_path / "web_server.json").write_text(read_template("schema"), encoding="utf-8")
    (tmp_path / "web_server.policy").write_text(read_template("policy"), encoding="utf-8")
    (tmp_path / "quake.yaml").write_text(read_template("config"), encoding="utf-8")
    return tmp_path


def test_locate():
    assert locate(b"ab\ncd", 0) == (1, 1)
    assert locate(b"ab\ncd", 4) == (2, 2)


def test_malformed_json_reports_a_location():
    with pytest.raises(SchemaParseError) as excinfo:
        decode_json(b'{\n  "properties": ]\n}')

    assert excinfo.value.line == 2
    assert excinfo.value.column is not None
    assert excinfo.value.exit_code == 2


def test_shipped_schema_loads(template_dir):
    schema = JsonSchemaLoader().load(template_dir / "web_server.json")

    assert schema.names == ("request_density", "file_number", "request_dispersion")
    assert JsonSchemaLoader().validate(template_dir / "web_server.json") == []


def test_structural_issues_stop_before_the_model(tmp_path):
    path = tmp_path / "schema.json"
    path.write_text(json.dumps({"properties": [{"name": "x"}]}), encoding="utf-8")

    with pytest.raises(SchemaParseError, match="Schema validation failed"):
        JsonSchemaLoader().load(path)


def test_model_issues_are_reported(tmp_path):
    prop = {"name": "x", "kind": "integer", "lower": 0, "upper": 3}
    path = tmp_path / "schema.json"
    path.write_text(json.dumps({"properties": [prop, prop]}), encoding="utf-8")

    issues = JsonSchemaLoader().validate(path)

    assert len(issues) == 1
    assert "duplicate property names" in issues[0].message


def test_config_paths_resolve_next_to_the_config(template_dir):
    config = YamlConfigLoader().load(template_dir / "quake.yaml")

    assert config.schema_path == (template_dir / "web_server.json").resolve()
    assert config.policy_path == (template_dir / "web_server.policy").resolve()
    assert config.search.seed == 42
    assert config.mutation_plan == MutationPlan()


def test_empty_config_is_all_defaults(tmp_path):
    path = tmp_path / "empty.yaml"
    path.write_text("# nothing\n", encoding="utf-8")

    assert YamlConfigLoader().load(path).search.flow_length == 60


def test_config_plan_with_control(tmp_path):
    path = tmp_path / "plan.yaml"
    path.write_text("mutation_plan:\n  F1: 2\n  F3: all\n  control: true\n", encoding="utf-8")

    plan = YamlConfigLoader().load(path).mutation_plan

    assert plan.control
    assert plan.counts == {FaultGroup.F1: 2, FaultGroup.F3: "all"}


def test_yaml_syntax_errors_carry_a_location(tmp_path):
    path = tmp_path / "broken.yaml"
    path.write_text("search:\n  seed: [1, 2\n", encoding="utf-8")

    with pytest.raises(ConfigError) as excinfo:
        YamlConfigLoader().load(path)

    assert excinfo.value.line is not None


def test_config_must_be_a_mapping(tmp_path):
    path = tmp_path / "list.yaml"
    path.write_text("- a\n- b\n", encoding="utf-8")

    with pytest.raises(ConfigError, match="mapping"):
        YamlConfigLoader().load(path)


@pytest.mark.parametrize(
    ("text", "fragment"),
    [
        ("unknown_key: 1\n", "<root>"),
        ("search:\n  stale_limit: 50\n  hard_limit: 10\n", "stale_limit"),
        ("initial_variant: 'true,0,0,1'\n", "initial_variant"),
    ],
)
def test_invalid_configs_are_listed(tmp_path, text, fragment):
    path = tmp_path / "bad.yaml"
    path.write_text(text, encoding="utf-8")

    issues = YamlConfigLoader().validate(path)

    assert issues
    with pytest.raises(ConfigError, match=fragment):
        YamlConfigLoader().load(path)


def test_named_plans():
    assert load_plan("default") == MutationPlan()
    assert load_plan("exhaustive-small") == MutationPlan.exhaustive()


def test_plan_file_with_an_explicit_mutant_list(tmp_path):
    mutants = [MutantSpec(id="keep", group=None, description="same", transform=Identity())]
    path = tmp_path / "plan.json"
    path.write_bytes(msgspec.json.encode(mutants))

    assert load_plan(path) == mutants


def test_plan_file_with_counts(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text('{"F2": 4, "control": true}', encoding="utf-8")

    plan = load_plan(str(path))

    assert plan == MutationPlan(counts={FaultGroup.F2: 4}, control=True)


@pytest.mark.parametrize(
    ("payload", "message"),
    [
        ("everything", "unknown mutation plan"),
        ({"F9": 1}, "unknown plan keys: F9"),
        ([{"id": "x"}], "invalid mutant list"),
        (7, "must be a name"),
    ],
)
def test_bad_plan_payloads(payload, message):
    with pytest.raises(PlanError, match=message):
        plan_from_payload(payload)


def test_missing_plan_file(tmp_path):
    with pytest.raises(PlanError, match="neither a preset nor a readable file"):
        load_plan(tmp_path / "absent.json")


def test_malformed_plan_file_is_a_plan_error(tmp_path):
    path = tmp_path / "plan.json"
    path.write_text("{", encoding="utf-8")

    with pytest.raises(PlanError):
        load_plan(path)


def test_policy_file_loads(template_dir):
    policy = load_policy(template_dir / "web_server.policy")

    assert len(policy.rules) == 10


def test_policy_file_must_be_utf8(tmp_path):
    path = tmp_path / "bad.policy"
    path.write_bytes(b"WHEN \xff")

    with pytest.raises(PolicySyntaxError, match="not UTF-8"):
        load_policy(path)
