"""Constraint expressions over named context properties.

A constraint is either a comparison predicate (``file_number <= request_density``)
or one level of implication (``IF p THEN q``). Expressions are parsed with the
``ast`` module, checked against a node whitelist, and compiled once.
"""

from __future__ import annotations

import ast
import re
from collections.abc import Iterable, Mapping
from types import CodeType

import attrs

from quake.core.models.enums import ConstraintKind
from quake.errors import SchemaParseError

_ALLOWED_NODES = (
    ast.Expression,
    ast.BoolOp,
    ast.UnaryOp,
    ast.BinOp,
    ast.Compare,
    ast.Name,
    ast.Constant,
    ast.Load,
    ast.And,
    ast.Or,
    ast.Not,
    ast.USub,
    ast.UAdd,
    ast.Add,
    ast.Sub,
    ast.Mult,
    ast.Lt,
    ast.LtE,
    ast.Eq,
    ast.NotEq,
    ast.GtE,
    ast.Gt,
)

_CONDITIONAL = re.compile(
    r"^\s*IF\s+(?P<premise>.+?)\s+THEN\s+(?P<conclusion>.+?)\s*$", re.I | re.S
)
_NESTED_IF = re.compile(r"\b(IF|THEN)\b", re.I)
_SINGLE_EQ = re.compile(r"(?<![<>=!])=(?!=)")
_SYMBOLS = {"≤": "<=", "≥": ">=", "≠": "!=", "×": "*", "−": "-"}

_EVAL_GLOBALS: dict[str, object] = {"__builtins__": {}}


def _normalize(text: str) -> str:
    for symbol, replacement in _SYMBOLS.items():
        text = text.replace(symbol, replacement)
    return _SINGLE_EQ.sub("==", text)


def _is_predicate(node: ast.AST) -> bool:
    if isinstance(node, ast.Compare):
        return True
    if isinstance(node, ast.BoolOp):
        return all(_is_predicate(value) for value in node.values)
    if isinstance(node, ast.UnaryOp) and isinstance(node.op, ast.Not):
        return _is_predicate(node.operand)
    return False


def _parse_predicate(text: str, expression: str, declared: frozenset[str]) -> ast.expr:
    if _NESTED_IF.search(text):
        raise SchemaParseError(f"Only one level of IF/THEN is supported: {expression}")
    try:
        parsed = ast.parse(_normalize(text).strip(), mode="eval")
    except SyntaxError as exc:
        raise SchemaParseError(f"Invalid constraint: {expression}", column=exc.offset) from exc
    for node in ast.walk(parsed):
        if not isinstance(node, _ALLOWED_NODES):
            raise SchemaParseError(f"Unsupported expression in constraint: {expression}")
        if isinstance(node, ast.Constant) and (
            isinstance(node.value, bool) or not isinstance(node.value, (int, float))
        ):
            raise SchemaParseError(f"Only numeric constants are allowed: {expression}")
        if isinstance(node, ast.Name) and node.id not in declared:
            raise SchemaParseError(f"Unknown property '{node.id}' in constraint: {expression}")
    if not _is_predicate(parsed.body):
        raise SchemaParseError(f"Constraint is not a predicate: {expression}")
    return parsed.body


@attrs.frozen(slots=True)
class Constraint:
    expression: str
    kind: ConstraintKind
    names: frozenset[str]
    _code: CodeType = attrs.field(eq=False, repr=False, alias="code")

    def holds(self, env: Mapping[str, float]) -> bool:
        return bool(eval(self._code, _EVAL_GLOBALS, dict(env)))  # noqa: S307 - whitelisted AST


def compile_constraint(expression: str, property_names: Iterable[str]) -> Constraint:
    declared = frozenset(property_names)
    match = _CONDITIONAL.match(expression)
    if match:
        premise = _parse_predicate(match.group("premise"), expression, declared)
        conclusion = _parse_predicate(match.group("conclusion"), expression, declared)
        body: ast.expr = ast.BoolOp(
            op=ast.Or(),
            values=[ast.UnaryOp(op=ast.Not(), operand=premise), conclusion],
        )
        kind = ConstraintKind.CONDITIONAL
    else:
        body = _parse_predicate(expression, expression, declared)
        kind = ConstraintKind.COMPARISON
    tree = ast.fix_missing_locations(ast.Expression(body=body))
    names = frozenset(node.id for node in ast.walk(tree) if isinstance(node, ast.Name))
    return Constraint(
        expression=expression,
        kind=kind,
        names=names,
        code=compile(tree, "<constraint>", "eval"),
    )
