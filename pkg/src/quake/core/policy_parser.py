"""Recursive-descent parser for the adaptation rule language.

    policy    := (directive | rule)*
    directive := "THRESHOLD" NUMBER
               | "DEFAULT" ("CACHESIZE" | "CACHEVALIDITY") NUMBER
    rule      := "WHEN" IDENT "IS" ADJ ("OR" ADJ)* ["IF" GUARD]
                 "THEN" "UTILITY" "OF" ACTION "IS" ADJ

Keywords and identifiers are case-insensitive, adjectives are quoted and
``#`` starts a comment that runs to the end of the line.
"""

from __future__ import annotations

import re
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from enum import StrEnum

import structlog

from quake.core.models.enums import Action, Adjective, Guard
from quake.core.models.policy import AdaptationPolicy, Rule
from quake.errors import PolicySemanticError, PolicySyntaxError

log: structlog.stdlib.BoundLogger = structlog.get_logger(__name__)

REFERENCE_PROPERTIES = ("request_density", "file_number", "request_dispersion")


class TokenKind(StrEnum):
    WORD = "word"
    STRING = "string"
    NUMBER = "number"
    END = "end"


@dataclass(frozen=True, slots=True)
class Token:
    kind: TokenKind
    text: str
    line: int
    column: int

    @property
    def upper(self) -> str:
        return self.text.upper()


_TOKEN_PATTERNS = [
    ("skip", re.compile(r"[ \t\r]+|#[^\n]*")),
    ("newline", re.compile(r"\n")),
    (TokenKind.NUMBER, re.compile(r"[0-9]+(?:\.[0-9]+)?")),
    (TokenKind.WORD, re.compile(r"[A-Za-z_][A-Za-z0-9_]*")),
    (TokenKind.STRING, re.compile(r"'([^'\n]*)'|\"([^\"\n]*)\"")),
]


def tokenize(text: str) -> Iterator[Token]:
    position = 0
    line = 1
    line_start = 0
    while position < len(text):
        for kind, pattern in _TOKEN_PATTERNS:
            match = pattern.match(text, position)
            if match is None:
                continue
            column = position - line_start + 1
            if kind == "newline":
                line += 1
                line_start = match.end()
            elif kind == TokenKind.STRING:
                value = match.group(1) if match.group(1) is not None else match.group(2)
                yield Token(TokenKind.STRING, value, line, column)
            elif kind != "skip":
                yield Token(TokenKind(kind), match.group(0), line, column)
            position = match.end()
            break
        else:
            column = position - line_start + 1
            raise PolicySyntaxError(f"unexpected character {text[position]!r}", line, column)
    yield Token(TokenKind.END, "", line, position - line_start + 1)


def _fold(name: str) -> str:
    return name.replace("_", "").replace(".", "").lower()


class _TokenStream:
    def __init__(self, tokens: Iterable[Token]):
        self._tokens = list(tokens)
        self._index = 0

    def current(self) -> Token:
        return self._tokens[self._index]

    def advance(self) -> Token:
        token = self._tokens[self._index]
        if token.kind is not TokenKind.END:
            self._index += 1
        return token

    def at_keyword(self, *keywords: str) -> bool:
        token = self.current()
        return token.kind is TokenKind.WORD and token.upper in keywords

    def expect_keyword(self, keyword: str) -> Token:
        token = self.current()
        if not self.at_keyword(keyword):
            raise PolicySyntaxError(
                f"expected {keyword}, found {_describe(token)}", token.line, token.column
            )
        return self.advance()

    def expect(self, kind: TokenKind, what: str) -> Token:
        token = self.current()
        if token.kind is not kind:
            raise PolicySyntaxError(
                f"expected {what}, found {_describe(token)}", token.line, token.column
            )
        return self.advance()


def _describe(token: Token) -> str:
    if token.kind is TokenKind.END:
        return "end of input"
    if token.kind is TokenKind.STRING:
        return f"'{token.text}'"
    return token.text


class PolicyParser:
    """Parses rule text against a set of context property names."""

    def __init__(self, property_names: Iterable[str] = REFERENCE_PROPERTIES):
        self._properties = {_fold(name): name for name in property_names}
        self._actions = {_fold(action.value): action for action in Action}
        self._guards = {_fold(guard.value): guard for guard in Guard}

    def parse(self, text: str) -> AdaptationPolicy:
        stream = _TokenStream(tokenize(text))
        rules: list[Rule] = []
        settings: dict[str, float | int] = {}
        while stream.current().kind is not TokenKind.END:
            if stream.at_keyword("WHEN"):
                rules.append(self._rule(stream))
            elif stream.at_keyword("THRESHOLD", "DEFAULT"):
                key, value = self._directive(stream)
                settings[key] = value
            else:
                token = stream.current()
                raise PolicySyntaxError(
                    f"expected WHEN, THRESHOLD or DEFAULT, found {_describe(token)}",
                    token.line,
                    token.column,
                )
        try:
            policy = AdaptationPolicy(rules=tuple(rules), **settings)  # type: ignore[arg-type]
        except ValueError as exc:
            raise PolicySemanticError(str(exc)) from exc
        log.debug("policy_parsed", rules=len(rules), threshold=policy.utility_threshold)
        return policy

    def _directive(self, stream: _TokenStream) -> tuple[str, float | int]:
        keyword = stream.advance()
        if keyword.upper == "THRESHOLD":
            number = stream.expect(TokenKind.NUMBER, "a number")
            return "utility_threshold", float(number.text)
        setting = stream.expect(TokenKind.WORD, "CACHESIZE or CACHEVALIDITY")
        number = stream.expect(TokenKind.NUMBER, "an integer")
        if "." in number.text:
            raise PolicySyntaxError("expected an integer", number.line, number.column)
        if setting.upper == "CACHESIZE":
            return "default_cache_size", int(number.text)
        if setting.upper == "CACHEVALIDITY":
            return "default_cache_validity_s", int(number.text)
        raise PolicySemanticError(
            f"unknown default '{setting.text}'", setting.line, setting.column
        )

    def _rule(self, stream: _TokenStream) -> Rule:
        start = stream.expect_keyword("WHEN")
        prop = stream.expect(TokenKind.WORD, "a property name")
        resolved = self._properties.get(_fold(prop.text))
        if resolved is None:
            raise PolicySemanticError(f"unknown property {prop.text}", prop.line, prop.column)
        stream.expect_keyword("IS")
        adjectives = [self._adjective(stream)]
        while stream.at_keyword("OR"):
            stream.advance()
            adjectives.append(self._adjective(stream))
        guard: Guard | None = None
        if stream.at_keyword("IF"):
            stream.advance()
            token = stream.expect(TokenKind.WORD, "a guard")
            guard = self._guards.get(_fold(token.text))
            if guard is None:
                raise PolicySemanticError(f"unknown guard {token.text}", token.line, token.column)
        stream.expect_keyword("THEN")
        stream.expect_keyword("UTILITY")
        stream.expect_keyword("OF")
        token = stream.expect(TokenKind.WORD, "an action")
        action = self._actions.get(_fold(token.text))
        if action is None:
            raise PolicySemanticError(f"unknown action {token.text}", token.line, token.column)
        stream.expect_keyword("IS")
        utility = self._adjective(stream)
        return Rule(
            when_property=resolved,
            when_adjectives=tuple(adjectives),
            action=action,
            utility_adjective=utility,
            guard=guard,
            line=start.line,
        )

    def _adjective(self, stream: _TokenStream) -> Adjective:
        token = stream.expect(TokenKind.STRING, "a quoted adjective")
        try:
            return Adjective(token.text.strip().lower())
        except ValueError:
            raise PolicySemanticError(
                f"unknown adjective '{token.text}'", token.line, token.column
            ) from None


def parse_policy(
    text: str, property_names: Iterable[str] = REFERENCE_PROPERTIES
) -> AdaptationPolicy:
    return PolicyParser(property_names).parse(text)


_ADJECTIVE_TEXT = {adjective: f"'{adjective.value.upper()}'" for adjective in Adjective}


def format_rule(rule: Rule) -> str:
    """Render a rule back into the rule language."""
    lines = [
        f"WHEN {rule.when_property.upper()} IS "
        + " OR ".join(_ADJECTIVE_TEXT[a] for a in rule.when_adjectives)
    ]
    if rule.guard is not None:
        lines.append(f"IF {rule.guard.value.upper()}")
    utility = _ADJECTIVE_TEXT[rule.utility_adjective]
    lines.append(f"THEN UTILITY OF {rule.action.value} IS {utility}")
    return "\n".join(lines)
