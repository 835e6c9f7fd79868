"""Function specifications, call validation, documentation and tool schemas."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Any, Callable, Iterable, Mapping

import yaml

from ..errors import CRSError, GeoError
from ..expr import ExprSyntaxError, parse_expression
from ..model import CrsRef

PARAM_TYPES = ("string", "number", "integer", "boolean", "path", "field", "expression", "crs",
               "number_list", "string_list")
NAME_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")

# JSON-schema "type" used when exporting a parameter as an LLM tool argument.
_JSON_TYPE = {
    "string": {"type": "string"}, "path": {"type": "string"}, "field": {"type": "string"},
    "expression": {"type": "string"}, "crs": {"type": ["string", "integer"]},
    "number": {"type": "number"}, "integer": {"type": "integer"}, "boolean": {"type": "boolean"},
    "number_list": {"type": "array", "items": {"type": "number"}},
    "string_list": {"type": "array", "items": {"type": "string"}},
}


@dataclass(frozen=True)
class ParamSpec:
    """One argument. ``of`` names the path parameter whose file must contain
    the field(s); ``choices`` restricts a string to an enumeration."""

    name: str
    type: str
    required: bool
    description: str
    of: str | None = None
    choices: tuple | None = None
    default: Any = None

    def __post_init__(self):
        if self.type not in PARAM_TYPES:
            raise ValueError(f"unknown parameter type {self.type!r}")
        if not NAME_RE.match(self.name):
            raise ValueError(f"bad parameter name {self.name!r}")
        if self.choices is not None:
            object.__setattr__(self, "choices", tuple(self.choices))

    def to_json(self) -> dict:
        out = {"name": self.name, "type": self.type, "required": self.required, "description": self.description}
        if self.of is not None:
            out["of"] = self.of
        if self.choices is not None:
            out["choices"] = list(self.choices)
        if self.default is not None:
            out["default"] = self.default
        return out

    @classmethod
    def from_json(cls, d: Mapping) -> ParamSpec:
        return cls(d["name"], d["type"], d["required"], d["description"], d.get("of"),
                   tuple(d["choices"]) if "choices" in d else None, d.get("default"))


@dataclass(frozen=True)
class FunctionSpec:
    name: str
    description: str
    params: tuple
    returns: dict
    example: str
    implemented: bool = True

    def __post_init__(self):
        if not NAME_RE.match(self.name):
            raise ValueError(f"bad function name {self.name!r}")
        if not self.description:
            raise ValueError(f"{self.name}: empty description")
        names = [p.name for p in self.params]
        if len(set(names)) != len(names):
            raise ValueError(f"{self.name}: duplicate parameter names")
        seen_optional = False
        for p in self.params:
            if p.required and seen_optional:
                raise ValueError(f"{self.name}: required parameter {p.name!r} after an optional one")
            seen_optional |= not p.required
        for p in self.params:
            if p.of is not None and p.of not in names:
                raise ValueError(f"{self.name}.{p.name}: 'of' refers to unknown parameter {p.of!r}")
        object.__setattr__(self, "params", tuple(self.params))

    def param(self, name: str) -> ParamSpec | None:
        return next((p for p in self.params if p.name == name), None)

    def to_json(self) -> dict:
        return {"name": self.name, "description": self.description,
                "params": [p.to_json() for p in self.params], "returns": dict(self.returns),
                "example": self.example, "implemented": self.implemented}

    @classmethod
    def from_json(cls, d: Mapping) -> FunctionSpec:
        return cls(d["name"], d["description"], tuple(ParamSpec.from_json(p) for p in d["params"]),
                   dict(d["returns"]), d["example"], d.get("implemented", True))


@dataclass(frozen=True)
class FunctionCall:
    name: str
    arguments: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"name": self.name, "arguments": dict(self.arguments)}

    @classmethod
    def from_json(cls, d: Mapping) -> FunctionCall:
        return cls(d["name"], dict(d.get("arguments") or {}))


@dataclass(frozen=True)
class Output:
    kind: str  # file | table | scalar | message
    payload: Any

    def to_json(self) -> dict:
        return {"kind": self.kind, "payload": self.payload}


@dataclass(frozen=True)
class CallResult:
    status: str  # Ok | Error
    outputs: tuple = ()
    error: dict | None = None

    def __post_init__(self):
        if self.status not in ("Ok", "Error"):
            raise ValueError(f"bad status {self.status!r}")
        if self.status == "Ok" and self.error is not None:
            raise ValueError("Ok result cannot carry an error")
        object.__setattr__(self, "outputs", tuple(self.outputs))

    @property
    def ok(self) -> bool:
        return self.status == "Ok"

    @classmethod
    def failure(cls, code: str, message: str, outputs: Iterable[Output] = ()) -> CallResult:
        return cls("Error", tuple(outputs), {"code": code, "message": message})

    def files(self) -> list[str]:
        return [o.payload for o in self.outputs if o.kind == "file"]

    def to_json(self) -> dict:
        out = {"status": self.status, "outputs": [o.to_json() for o in self.outputs]}
        if self.error is not None:
            out["error"] = dict(self.error)
        return out


@dataclass(frozen=True)
class Violation:
    kind: str  # malformed | unknown_function | unknown_argument | missing | type | choice | expression | crs | field
    param: str | None
    message: str

    def __str__(self) -> str:
        return self.message

    def to_json(self) -> dict:
        return {"kind": self.kind, "param": self.param, "message": self.message}


@dataclass(frozen=True)
class ValidatedCall:
    call: FunctionCall | None
    violations: tuple = ()

    @property
    def ok(self) -> bool:
        return not self.violations


Handler = Callable[..., CallResult]


class Registry:
    """Immutable ordered catalog of function specs with their handlers."""

    def __init__(self, specs: Iterable[FunctionSpec], handlers: Mapping[str, Handler] | None = None):
        ordered: dict[str, FunctionSpec] = {}
        for s in specs:
            if s.name in ordered:
                raise ValueError(f"duplicate function {s.name!r}")
            ordered[s.name] = s
        self._specs = MappingProxyType(ordered)
        self._handlers = MappingProxyType(dict(handlers or {}))

    def __len__(self) -> int:
        return len(self._specs)

    def __iter__(self):
        return iter(self._specs.values())

    def __contains__(self, name) -> bool:
        return name in self._specs

    def get(self, name: str) -> FunctionSpec | None:
        return self._specs.get(name)

    def names(self) -> list[str]:
        return list(self._specs)

    def handler(self, name: str) -> Handler | None:
        return self._handlers.get(name)

    def to_json(self) -> dict:
        return {"functions": [s.to_json() for s in self._specs.values()]}


# ---------------------------------------------------------------------------
# validation
# ---------------------------------------------------------------------------


def _is_number(v) -> bool:
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _type_violation(p: ParamSpec, v) -> Violation | None:
    t = p.type
    ok = {
        "string": lambda: isinstance(v, str),
        "path": lambda: isinstance(v, str) and v != "",
        "field": lambda: isinstance(v, str) and v != "",
        "expression": lambda: isinstance(v, str),
        "crs": lambda: isinstance(v, str) or (isinstance(v, int) and not isinstance(v, bool)),
        "number": lambda: _is_number(v),
        "integer": lambda: isinstance(v, int) and not isinstance(v, bool),
        "boolean": lambda: isinstance(v, bool),
        "number_list": lambda: isinstance(v, list) and all(_is_number(x) for x in v),
        "string_list": lambda: isinstance(v, list) and all(isinstance(x, str) for x in v),
    }[t]()
    if not ok:
        got = "null" if v is None else type(v).__name__
        return Violation("type", p.name, f"type: {p.name} expects {t}, got {got} {json.dumps(v, default=str)[:60]}")
    if p.choices is not None and v not in p.choices:
        return Violation("choice", p.name, f"choice: {p.name} must be one of {list(p.choices)}, got {v!r}")
    if t == "expression":
        try:
            parse_expression(v)
        except ExprSyntaxError as exc:
            return Violation("expression", p.name, f"expression: {p.name}: {exc.message}")
    if t == "crs":
        try:
            CrsRef.parse(v)
        except CRSError as exc:
            return Violation("crs", p.name, f"crs: {p.name}: {exc.message}")
    return None


MetadataLookup = Callable[[str], Any]


def validate_call(r: Registry, call: Any, metadata: MetadataLookup | None = None) -> ValidatedCall:
    """Check a call against the registry. Never raises.

    ``metadata(path)`` may return a :class:`FileMetadata` (or ``None`` when
    unknown); it enables checking ``field`` arguments against the file named
    by the parameter's ``of`` link.
    """
    try:
        return _validate(r, call, metadata)
    except Exception as exc:  # totality: report instead of crashing
        return ValidatedCall(None, (Violation("malformed", None, f"malformed call: {exc}"),))


def _validate(r: Registry, call: Any, metadata) -> ValidatedCall:
    if isinstance(call, FunctionCall):
        name, args = call.name, call.arguments
    elif isinstance(call, Mapping):
        name, args = call.get("name"), call.get("arguments", {})
        if args is None:
            args = {}
    else:
        return ValidatedCall(None, (Violation("malformed", None, "malformed call: expected an object"),))
    if not isinstance(name, str):
        return ValidatedCall(None, (Violation("malformed", None, "malformed call: 'name' must be a string"),))
    if not isinstance(args, Mapping):
        return ValidatedCall(None, (Violation("malformed", None, "malformed call: 'arguments' must be an object"),))
    spec = r.get(name)
    if spec is None:
        return ValidatedCall(None, (Violation("unknown_function", None, f"unknown function: {name}"),))
    v: list[Violation] = []
    for k in args:
        if spec.param(k) is None:
            v.append(Violation("unknown_argument", k, f"unknown argument: {k}"))
    for p in spec.params:
        if p.name not in args:
            if p.required:
                v.append(Violation("missing", p.name, f"missing: {p.name}"))
            continue
        tv = _type_violation(p, args[p.name])
        if tv is not None:
            v.append(tv)
    if metadata is not None and not v:
        v.extend(_field_violations(spec, args, metadata))
    if v:
        return ValidatedCall(None, tuple(v))
    return ValidatedCall(FunctionCall(name, dict(args)), ())


def _field_violations(spec: FunctionSpec, args: Mapping, metadata) -> list[Violation]:
    out = []
    for p in spec.params:
        if p.of is None or p.name not in args or p.type not in ("field", "string_list"):
            continue
        src = args.get(p.of)
        if not isinstance(src, str):
            continue
        try:
            meta = metadata(src)
        except GeoError:
            meta = None
        if meta is None:
            continue
        names = list(meta.property_schema)
        wanted = [args[p.name]] if p.type == "field" else list(args[p.name])
        for w in wanted:
            if w not in meta.property_schema:
                out.append(Violation("field", p.name,
                                     f"field: {p.name}={w!r} is not a field of {src} (fields: {names})"))
    return out


# ---------------------------------------------------------------------------
# documentation
# ---------------------------------------------------------------------------


def emit_docs(r: Registry, fmt: str = "Yaml") -> str:
    """Registry documentation as YAML or JSON; both encode one tree."""
    tree = r.to_json()
    f = fmt.lower()
    if f == "json":
        return json.dumps(tree, indent=2, ensure_ascii=False) + "\n"
    if f == "yaml":
        return yaml.safe_dump(tree, sort_keys=False, allow_unicode=True, width=100)
    raise ValueError(f"docs format must be Yaml or Json, got {fmt!r}")


def parse_docs(text: str, fmt: str) -> dict:
    return json.loads(text) if fmt.lower() == "json" else yaml.safe_load(text)


def registry_from_docs(tree: Mapping) -> Registry:
    return Registry(FunctionSpec.from_json(d) for d in tree["functions"])


# ---------------------------------------------------------------------------
# LLM tool schemas
# ---------------------------------------------------------------------------


def to_tool_schema(spec: FunctionSpec) -> dict:
    """OpenAI-style tool definition; ``x-geo-*`` keys keep the round trip lossless."""
    props = {}
    for p in spec.params:
        prop = dict(_JSON_TYPE[p.type])
        prop["description"] = p.description
        prop["x-geo-type"] = p.type
        if p.choices is not None:
            prop["enum"] = list(p.choices)
        if p.of is not None:
            prop["x-geo-of"] = p.of
        if p.default is not None:
            prop["default"] = p.default
        props[p.name] = prop
    return {
        "type": "function",
        "function": {
            "name": spec.name,
            "description": spec.description,
            "parameters": {"type": "object", "properties": props,
                           "required": [p.name for p in spec.params if p.required],
                           "additionalProperties": False},
            "x-geo-returns": dict(spec.returns),
            "x-geo-example": spec.example,
            "x-geo-implemented": spec.implemented,
        },
    }


def from_tool_schema(tool: Mapping) -> FunctionSpec:
    fn = tool["function"]
    required = set(fn["parameters"].get("required", []))
    params = []
    for name, prop in fn["parameters"]["properties"].items():
        params.append(ParamSpec(name, prop["x-geo-type"], name in required, prop.get("description", ""),
                                prop.get("x-geo-of"), tuple(prop["enum"]) if "enum" in prop else None,
                                prop.get("default")))
    return FunctionSpec(fn["name"], fn["description"], tuple(params), dict(fn.get("x-geo-returns", {})),
                        fn.get("x-geo-example", ""), fn.get("x-geo-implemented", True))


def tool_schemas(r: Registry, implemented_only: bool = False) -> list[dict]:
    return [to_tool_schema(s) for s in r if s.implemented or not implemented_only]
