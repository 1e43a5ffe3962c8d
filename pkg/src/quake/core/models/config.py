from __future__ import annotations

from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from quake.core.models.context import ContextSchema, EpConfig
from quake.core.models.mutation import MutationPlan
from quake.core.models.policy import FuzzySets, Variant
from quake.core.models.search import RealityDistribution, SearchConfig
from quake.errors import ConfigError

DEFAULT_INITIAL_VARIANT = "false,0,0,1"


class QuakeConfig(BaseModel):
    """The run configuration file after structural validation.

    Paths are resolved against the directory holding the config file.
    """

    model_config = ConfigDict(extra="forbid", frozen=True, populate_by_name=True)

    schema_path: Path | None = Field(default=None, alias="schema")
    policy_path: Path | None = Field(default=None, alias="policy")
    search: SearchConfig = Field(default_factory=SearchConfig)
    ep: EpConfig | None = None
    coverage_samples: dict[str, list[float]] | None = None
    mutation_plan: MutationPlan = Field(default_factory=MutationPlan)
    initial_variant: str = DEFAULT_INITIAL_VARIANT
    fuzzy_sets: FuzzySets | None = None
    reality: dict[str, list[float]] | None = None

    @field_validator("initial_variant")
    @classmethod
    def _check_variant(cls, value: str) -> str:
        Variant.parse(value)
        return value

    @property
    def initial(self) -> Variant:
        return Variant.parse(self.initial_variant)

    def with_ep_overrides(
        self,
        schema: ContextSchema,
        *,
        rho: float | None = None,
        epsilon: float | None = None,
        window_max: int | None = None,
    ) -> QuakeConfig:
        """Flag values replace fields of the config's, else the schema's, EP settings."""
        flags = {
            key: value
            for key, value in (("rho", rho), ("epsilon", epsilon), ("window_max", window_max))
            if value is not None
        }
        if not flags:
            return self
        base = self.ep or schema.ep or EpConfig()
        try:
            ep = EpConfig.model_validate({**base.model_dump(), **flags})
        except ValidationError as exc:
            error = exc.errors()[0]
            field = ".".join(str(part) for part in error["loc"])
            raise ConfigError(f"invalid EP setting {field}: {error['msg']}") from exc
        return self.model_copy(update={"ep": ep})

    def apply_to(self, schema: ContextSchema) -> ContextSchema:
        """Schema with this config's ``ep`` and ``coverage_samples`` taking precedence."""
        update: dict[str, object] = {}
        if self.ep is not None:
            update["ep"] = self.ep.model_dump()
        if self.coverage_samples is not None:
            update["coverage_samples"] = self.coverage_samples
        if not update:
            return schema
        try:
            return ContextSchema.model_validate({**schema.model_dump(), **update})
        except ValidationError as exc:
            raise ConfigError(f"config does not fit the schema: {exc.errors()[0]['msg']}") from exc

    def search_config(
        self,
        schema: ContextSchema,
        *,
        seed: int | None = None,
        rounds: int | None = None,
    ) -> SearchConfig:
        """Flags beat the config file, which beats the schema file and the defaults."""
        update: dict[str, object] = {"ep": self.ep or schema.ep or EpConfig()}
        if seed is not None:
            update["seed"] = seed
        if rounds is not None:
            update["rounds"] = rounds
        try:
            return SearchConfig.model_validate({**self.search.model_dump(), **update})
        except ValidationError as exc:
            raise ConfigError(f"invalid search settings: {exc.errors()[0]['msg']}") from exc

    def reality_distribution(self) -> RealityDistribution | None:
        if not self.reality:
            return None
        try:
            return RealityDistribution(masses=self.reality)
        except ValidationError as exc:
            raise ConfigError(f"invalid reality distribution: {exc.errors()[0]['msg']}") from exc
