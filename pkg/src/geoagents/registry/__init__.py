"""Function catalog: specs, validation, documentation and dispatch."""

from __future__ import annotations

import json
from importlib import resources

from .builtin import CATALOG_NAMES, builtin_registry, dispatch
from .core import (CallResult, FunctionCall, FunctionSpec, Output, ParamSpec, Registry, ValidatedCall, Violation,
                   emit_docs, from_tool_schema, parse_docs, registry_from_docs, to_tool_schema, tool_schemas,
                   validate_call)
from .workspace import PathEscapeError, Workspace


def registry_schema() -> dict:
    return json.loads(resources.files(__package__).joinpath("registry.schema.json").read_text(encoding="utf-8"))


__all__ = [
    "CATALOG_NAMES", "CallResult", "FunctionCall", "FunctionSpec", "Output", "ParamSpec", "PathEscapeError",
    "Registry", "ValidatedCall", "Violation", "Workspace", "builtin_registry", "dispatch", "emit_docs",
    "from_tool_schema", "parse_docs", "registry_from_docs", "registry_schema", "to_tool_schema", "tool_schemas",
    "validate_call",
]
