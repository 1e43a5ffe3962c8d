"""Simulated adaptive web server driven by a fuzzy adaptation policy.

The server state is a :class:`Variant`. Each injected context instance is
fuzzified, matched against the rules in source order, and every rule that
fires updates the state before the next rule is evaluated.
"""

from __future__ import annotations

from collections.abc import Callable

import attrs
from msgspec import structs

from quake.core.fuzzy import Fuzzified, Fuzzifier
from quake.core.models.context import ContextFlow, ContextInstance
from quake.core.models.enums import Action, Guard
from quake.core.models.policy import (
    CACHE_SIZE_MAX,
    CACHE_SIZE_MIN,
    SERVERS_MAX,
    SERVERS_MIN,
    AdaptationPolicy,
    Variant,
    VariantFlow,
    VariantStep,
)

InstanceHook = Callable[[ContextInstance], ContextInstance]
AdjectiveHook = Callable[[Fuzzified], Fuzzified]

_GUARDS: dict[Guard, Callable[[Variant], bool]] = {
    Guard.CACHE_PRESENT: lambda state: state.cache_exists,
    Guard.CACHE_ABSENT: lambda state: not state.cache_exists,
    Guard.SERVERS_AT_MAX: lambda state: state.data_servers >= SERVERS_MAX,
    Guard.SERVERS_AT_MIN: lambda state: state.data_servers <= SERVERS_MIN,
}


@attrs.frozen(slots=True)
class Instrumentation:
    """Seams where a mutant rewrites the sensed instance or its adjectives."""

    rewrite_instance: InstanceHook | None = None
    rewrite_adjectives: AdjectiveHook | None = None


@attrs.frozen(slots=True)
class TraceComparison:
    equal: bool
    divergence: int | None = None

    def __bool__(self) -> bool:
        return self.equal


def guard_holds(guard: Guard | None, state: Variant) -> bool:
    return guard is None or _GUARDS[guard](state)


def apply_action(policy: AdaptationPolicy, state: Variant, action: Action) -> Variant:
    """Next state after one action; boundary actions clamp instead of failing."""
    match action:
        case Action.ADDCACHE:
            if state.cache_exists:
                return state
            return structs.replace(
                state,
                cache_exists=True,
                cache_size=policy.default_cache_size,
                cache_validity_s=policy.default_cache_validity_s,
            )
        case Action.REMOVECACHE:
            return structs.replace(
                state, cache_exists=False, cache_size=0, cache_validity_s=0
            )
        case Action.ADDSERVER:
            return structs.replace(
                state, data_servers=min(SERVERS_MAX, state.data_servers + 1)
            )
        case Action.REMOVESERVER:
            return structs.replace(
                state, data_servers=max(SERVERS_MIN, state.data_servers - 1)
            )
        case Action.GROWCACHE:
            if not state.cache_exists:
                return state
            return structs.replace(
                state, cache_size=min(CACHE_SIZE_MAX, state.cache_size * 2)
            )
        case Action.SHRINKCACHE:
            if not state.cache_exists:
                return state
            return structs.replace(
                state, cache_size=max(CACHE_SIZE_MIN, state.cache_size // 2)
            )
    raise ValueError(f"Unknown action: {action}")


def decide(
    policy: AdaptationPolicy, state: Variant, fuzzified: Fuzzified
) -> tuple[Variant, tuple[Action, ...]]:
    fired: list[Action] = []
    for rule in policy.rules:
        adjective, degree = fuzzified[rule.when_property]
        if adjective not in rule.when_adjectives or not guard_holds(rule.guard, state):
            continue
        if policy.utility_values[rule.utility_adjective] * degree >= policy.utility_threshold:
            state = apply_action(policy, state, rule.action)
            fired.append(rule.action)
    return state, tuple(fired)


def step(
    policy: AdaptationPolicy,
    fuzzifier: Fuzzifier,
    state: Variant,
    instance: ContextInstance,
    instrumentation: Instrumentation | None = None,
) -> tuple[Variant, tuple[Action, ...]]:
    hooks = instrumentation or Instrumentation()
    sensed = hooks.rewrite_instance(instance) if hooks.rewrite_instance else instance
    fuzzified = fuzzifier.fuzzify(sensed)
    if hooks.rewrite_adjectives:
        fuzzified = hooks.rewrite_adjectives(fuzzified)
    return decide(policy, state, fuzzified)


def run(
    policy: AdaptationPolicy,
    fuzzifier: Fuzzifier,
    initial: Variant,
    flow: ContextFlow,
    instrumentation: Instrumentation | None = None,
) -> VariantFlow:
    state = initial
    steps: list[VariantStep] = []
    for index, instance in enumerate(flow.instances):
        state, actions = step(policy, fuzzifier, state, instance, instrumentation)
        steps.append(VariantStep(step=index, instance=instance, variant=state, actions=actions))
    return VariantFlow(flow_id=flow.id, steps=tuple(steps))


def trace_equal(a: VariantFlow, b: VariantFlow) -> TraceComparison:
    """Compare post-adaptation states step by step."""
    for index, (left, right) in enumerate(zip(a.steps, b.steps, strict=False)):
        if left.variant != right.variant:
            return TraceComparison(equal=False, divergence=index)
    if len(a) != len(b):
        return TraceComparison(equal=False, divergence=min(len(a), len(b)))
    return TraceComparison(equal=True)
