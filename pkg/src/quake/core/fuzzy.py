"""Fuzzification of context instances into low/medium/high adjectives."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np
import skfuzzy as fuzz

from quake.core.models.context import ContextInstance, ContextSchema
from quake.core.models.enums import ADJECTIVE_ORDER, Adjective
from quake.core.models.policy import FuzzyPartition, FuzzySets

Fuzzified = dict[str, tuple[Adjective, float]]


class _PartitionCurves:
    def __init__(self, partition: FuzzyPartition):
        self.universe = partition.universe()
        self.curves = [
            (adjective, fuzz.trimf(self.universe, list(partition.triangle(adjective))))
            for adjective in ADJECTIVE_ORDER
        ]

    def degrees(self, x: float) -> list[tuple[Adjective, float]]:
        return [
            (adjective, float(fuzz.interp_membership(self.universe, curve, x)))
            for adjective, curve in self.curves
        ]


def strongest(degrees: Sequence[tuple[Adjective, float]]) -> tuple[Adjective, float]:
    """Adjective with the highest degree; ties go to the lower adjective."""
    best = degrees[0]
    for candidate in degrees[1:]:
        if candidate[1] > best[1]:
            best = candidate
    return best


class Fuzzifier:
    """Maps raw instances to one adjective and degree per property.

    Results are memoised per (property, value); instances are grid points, so
    the memo stays small.
    """

    def __init__(self, schema: ContextSchema, fuzzy_sets: FuzzySets | None = None):
        self.schema = schema
        self.fuzzy_sets = fuzzy_sets or FuzzySets()
        self._curves = [
            _PartitionCurves(self.fuzzy_sets.partition(spec.name)) for spec in schema.properties
        ]
        self._memo: dict[tuple[int, float], tuple[Adjective, float]] = {}

    def normalized(self, index: int, value: float) -> float:
        spec = self.schema.properties[index]
        return round(float(np.clip(spec.normalize(value), 0.0, 1.0)), 12)

    def memberships(self, index: int, value: float) -> list[tuple[Adjective, float]]:
        return self._curves[index].degrees(self.normalized(index, value))

    def adjective(self, index: int, value: float) -> tuple[Adjective, float]:
        key = (index, value)
        cached = self._memo.get(key)
        if cached is None:
            cached = strongest(self.memberships(index, value))
            self._memo[key] = cached
        return cached

    def fuzzify(self, instance: ContextInstance) -> Fuzzified:
        return {
            name: self.adjective(index, value)
            for index, (name, value) in enumerate(zip(self.schema.names, instance, strict=True))
        }


def fuzzify(
    fuzzy_sets: FuzzySets | None, schema: ContextSchema, instance: ContextInstance
) -> Fuzzified:
    return Fuzzifier(schema, fuzzy_sets).fuzzify(instance)
