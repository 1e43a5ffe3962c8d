from __future__ import annotations

import pytest
from pydantic import ValidationError

from quake.core.models.config import QuakeConfig
from quake.core.models.context import EpConfig
from quake.core.models.policy import Variant
from quake.errors import ConfigError


def test_defaults():
    config = QuakeConfig()

    assert config.initial == Variant()
    assert config.schema_path is None
    assert config.reality_distribution() is None


def test_flags_beat_config_which_beats_schema(web_schema):
    config = QuakeConfig.model_validate({"search": {"seed": 3, "rounds": 2}, "ep": {"rho": 5.0}})

    from_config = config.search_config(web_schema)
    from_flags = config.search_config(web_schema, seed=9, rounds=1)

    assert (from_config.seed, from_config.rounds, from_config.ep.rho) == (3, 2, 5.0)
    assert (from_flags.seed, from_flags.rounds) == (9, 1)


def test_schema_ep_applies_when_config_has_none(web_schema):
    schema = web_schema.model_copy(update={"ep": EpConfig(rho=6.0)})

    assert QuakeConfig().search_config(schema).ep.rho == 6.0


def test_invalid_search_override_is_a_config_error(web_schema):
    config = QuakeConfig.model_validate({"search": {"stale_limit": 5, "hard_limit": 10}})

    with pytest.raises(ConfigError, match="invalid search settings"):
        config.search_config(web_schema, rounds=0)


def test_ep_flags_replace_single_fields_of_the_config_ep(web_schema):
    config = QuakeConfig.model_validate({"ep": {"rho": 5.0, "window_max": 6}})

    updated = config.with_ep_overrides(web_schema, epsilon=0.5)

    assert updated.ep == EpConfig(rho=5.0, epsilon=0.5, window_max=6)
    assert updated.search_config(web_schema).ep.epsilon == 0.5
    assert updated.apply_to(web_schema).ep == updated.ep


def test_ep_flags_fall_back_to_the_schema_ep(web_schema):
    schema = web_schema.model_copy(update={"ep": EpConfig(rho=6.0)})

    updated = QuakeConfig().with_ep_overrides(schema, window_max=3)

    assert (updated.ep.rho, updated.ep.window_max) == (6.0, 3)


def test_without_ep_flags_the_config_is_unchanged(web_schema):
    config = QuakeConfig()

    assert config.with_ep_overrides(web_schema) is config


def test_invalid_ep_flag_is_a_config_error(web_schema):
    with pytest.raises(ConfigError, match="invalid EP setting rho"):
        QuakeConfig().with_ep_overrides(web_schema, rho=1.0)


def test_apply_to_overrides_samples(web_schema):
    config = QuakeConfig(coverage_samples={"request_density": [1, 1000]})

    schema = config.apply_to(web_schema)

    assert schema.coverage_samples == {"request_density": [1, 1000]}
    assert QuakeConfig().apply_to(web_schema) is web_schema


def test_apply_to_rejects_samples_off_the_grid(web_schema):
    config = QuakeConfig(coverage_samples={"request_dispersion": [0.25]})

    with pytest.raises(ConfigError, match="does not fit the schema"):
        config.apply_to(web_schema)


def test_initial_variant_is_validated():
    assert QuakeConfig(initial_variant="true,64,5,2").initial.cache_size == 64
    with pytest.raises(ValidationError):
        QuakeConfig(initial_variant="true,0,0,1")


def test_reality_distribution():
    config = QuakeConfig(reality={"request_dispersion": [1.0] + [0.0] * 10})

    assert config.reality_distribution().masses["request_dispersion"][0] == 1.0
    with pytest.raises(ConfigError, match="invalid reality"):
        QuakeConfig(reality={"x": [0.5]}).reality_distribution()
