from __future__ import annotations

from typing import NamedTuple

import attrs

PAIRWISE = "pairwise"


class ValuePair(NamedTuple):
    """Two property values that one instance can realize together (``prop_a < prop_b``)."""

    prop_a: int
    val_a: float
    prop_b: int
    val_b: float


@attrs.frozen(slots=True)
class CoverageUniverse:
    criterion_id: str
    pairs: frozenset[ValuePair]
    covered: frozenset[ValuePair] = frozenset()

    def __attrs_post_init__(self) -> None:
        if not self.covered <= self.pairs:
            raise ValueError("covered pairs must belong to the universe")

    @property
    def uncovered(self) -> frozenset[ValuePair]:
        return self.pairs - self.covered

    @property
    def complete(self) -> bool:
        return self.covered == self.pairs
