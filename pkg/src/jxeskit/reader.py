"""JXES (JSON) to EventLog.

Two interchangeable backends:

``tree``
    decode the whole document with :mod:`json`, then walk it.
``streaming``
    consume :class:`~jxeskit._json.PullParser` events and build the log one
    event object at a time; raw text is never buffered beyond one chunk and
    no whole-document tree exists.

Both share the value interpretation below, so they can only differ in how
they get at the JSON.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass
from typing import Any, Iterator

from . import _json
from ._io import Source, open_input, read_all
from ._json import END_ARRAY, END_MAP, KEY, SCALAR, START_ARRAY, START_MAP
from .errors import (
    DuplicateKey,
    IntOutOfRange,
    ReservedKeyMisuse,
    SchemaViolation,
    UnknownKey,
    json_path,
)
from .model import (
    EMPTY,
    INT_MAX,
    INT_MIN,
    Attribute,
    AttrList,
    Container,
    Event,
    EventLog,
    Extension,
    GlobalAttributes,
    Trace,
    Value,
    is_uri,
    parse_date,
)

__all__ = [
    "BackendKind",
    "ParseOptions",
    "infer_value",
    "interpret_container",
    "interpret_list",
    "make_attribute",
    "parse_jxes",
    "read_jxes",
]

log = logging.getLogger(__name__)

VALUE_KEY = "value"
NESTED_KEY = "nested-attrs"
TOP_LEVEL_KEYS = ("attrs", "global-attrs", "classifiers", "extensions", "traces")
TRACE_KEYS = ("attrs", "events")
EXTENSION_KEYS = ("name", "prefix", "uri")


class BackendKind(str, enum.Enum):
    TREE = "tree"
    STREAMING = "streaming"


@dataclass(frozen=True)
class ParseOptions:
    backend: BackendKind = BackendKind.TREE
    strict: bool = False


# -- values --------------------------------------------------------------------

def _int_value(n: int):
    if INT_MIN <= n <= INT_MAX:
        return n
    try:
        f = float(n)
    except OverflowError:
        f = math.inf
    if math.isfinite(f) and int(f) == n:
        return f
    raise IntOutOfRange(f"integer {n} does not fit in 64 bits")


def infer_value(jv: Any) -> Value:
    """Map a decoded JSON value onto a model value.

    Strings that are valid ISO-8601 instants become dates. Integers keep
    their kind when they fit in 64 bits (an out-of-range integer that a
    double represents exactly becomes a float). An object here must be a
    plain container: a nested attribute cannot be the value of another one.
    """
    t = type(jv)
    if t is str:
        d = parse_date(jv)
        return jv if d is None else d
    if t is bool:
        return jv
    if t is int:
        return _int_value(jv)
    if t is float:
        if not math.isfinite(jv):
            raise SchemaViolation("number is out of the double range")
        return jv
    if t is list:
        return interpret_list(jv)
    if t is dict:
        if VALUE_KEY in jv or NESTED_KEY in jv:
            raise ReservedKeyMisuse(
                "an object with 'value'/'nested-attrs' is a nested attribute "
                "and cannot itself be a value"
            )
        return _container(jv)
    if jv is None:
        raise SchemaViolation("null is not a JXES value")
    raise TypeError(f"not a decoded JSON value: {jv!r}")


def _container(obj: dict) -> Container:
    entries = {}
    for k, v in obj.items():
        try:
            entries[k] = make_attribute(k, v)
        except SchemaViolation as exc:
            raise exc.at(k)
    return Container(entries)


def interpret_list(arr: list) -> AttrList:
    """Every element must be an object; its pairs become list items in order."""
    items = []
    for i, el in enumerate(arr):
        if type(el) is not dict:
            raise SchemaViolation("list elements must be objects", (i,))
        for k, v in el.items():
            try:
                items.append(make_attribute(k, v))
            except SchemaViolation as exc:
                raise exc.at(i, k)
    return AttrList(tuple(items))


def interpret_container(obj: dict, key: str = "") -> Attribute:
    """An object in attribute position: nested attribute or plain container."""
    if VALUE_KEY not in obj and NESTED_KEY not in obj:
        return Attribute(key, _container(obj))
    extra = [k for k in obj if k != VALUE_KEY and k != NESTED_KEY]
    if extra:
        raise ReservedKeyMisuse(
            f"'value'/'nested-attrs' are reserved; unexpected key {extra[0]!r} beside them"
        )
    if VALUE_KEY in obj:
        try:
            value = infer_value(obj[VALUE_KEY])
        except SchemaViolation as exc:
            raise exc.at(VALUE_KEY)
    else:
        value = ""
    children = EMPTY
    if NESTED_KEY in obj:
        nested = obj[NESTED_KEY]
        if type(nested) is not dict:
            raise ReservedKeyMisuse("'nested-attrs' must be an object", (NESTED_KEY,))
        if nested:
            try:
                children = attr_map(nested)
            except SchemaViolation as exc:
                raise exc.at(NESTED_KEY)
    return Attribute(key, value, children)


def make_attribute(key: str, jv: Any) -> Attribute:
    if type(jv) is dict:
        return interpret_container(jv, key)
    return Attribute(key, infer_value(jv))


def attr_map(obj: dict) -> dict[str, Attribute]:
    out = {}
    for k, v in obj.items():
        try:
            out[k] = make_attribute(k, v) if type(v) is dict else Attribute(k, infer_value(v))
        except SchemaViolation as exc:
            raise exc.at(k)
    return out


# -- document sections (shared by both backends) -------------------------------

def _expect(jv, t: type, what: str, *parts):
    if type(jv) is not t:
        raise SchemaViolation(f"{what} must be {'an array' if t is list else 'an object'}", parts)
    return jv


class _Context:
    def __init__(self, strict: bool):
        self.strict = strict

    def unknown(self, key: str, *parts):
        if self.strict:
            raise UnknownKey(f"unknown key {key!r}", parts + (key,))
        log.warning("ignoring unknown key %r at %s", key, json_path(parts))

    def duplicate(self, key: str):
        if self.strict:
            raise DuplicateKey(f"duplicate key {key!r}")
        log.warning("duplicate key %r: last value wins", key)

    def attrs(self, jv, *parts) -> dict[str, Attribute]:
        _expect(jv, dict, "attrs", *parts)
        try:
            return attr_map(jv)
        except SchemaViolation as exc:
            raise exc.at(*parts)

    def global_attrs(self, jv) -> GlobalAttributes:
        _expect(jv, dict, "global-attrs", "global-attrs")
        for k in jv:
            if k not in ("trace", "event"):
                raise SchemaViolation(
                    "global-attrs may only contain 'trace' and 'event'", ("global-attrs", k)
                )
        return GlobalAttributes(
            trace=self.attrs(jv["trace"], "global-attrs", "trace") if "trace" in jv else EMPTY,
            event=self.attrs(jv["event"], "global-attrs", "event") if "event" in jv else EMPTY,
        )

    def classifiers(self, jv) -> dict[str, tuple[str, ...]]:
        _expect(jv, dict, "classifiers", "classifiers")
        out = {}
        for name, keys in jv.items():
            if type(keys) is not list or not keys or any(type(k) is not str for k in keys):
                raise SchemaViolation(
                    "classifier keys must be a non-empty array of strings", ("classifiers", name)
                )
            out[name] = tuple(keys)
        return out

    def extensions(self, jv) -> tuple[Extension, ...]:
        _expect(jv, list, "extensions", "extensions")
        out = []
        for i, ext in enumerate(jv):
            _expect(ext, dict, "an extension", "extensions", i)
            for field in EXTENSION_KEYS:
                v = ext.get(field)
                if type(v) is not str or not v:
                    raise SchemaViolation(
                        f"extension {field!r} must be a non-empty string", ("extensions", i)
                    )
            if not is_uri(ext["uri"]):
                raise SchemaViolation(f"invalid uri {ext['uri']!r}", ("extensions", i, "uri"))
            for k in ext:
                if k not in EXTENSION_KEYS:
                    self.unknown(k, "extensions", i)
            out.append(Extension(ext["name"], ext["prefix"], ext["uri"]))
        return tuple(out)

    def event(self, jv, t: int, e: int) -> Event:
        _expect(jv, dict, "an event", "traces", t, "events", e)
        try:
            return Event(attr_map(jv))
        except SchemaViolation as exc:
            raise exc.at("traces", t, "events", e)


def _build_tree(doc, ctx: _Context) -> EventLog:
    _expect(doc, dict, "a JXES document")
    for k in doc:
        if k not in TOP_LEVEL_KEYS:
            ctx.unknown(k)
    traces = []
    if "traces" in doc:
        for t, jt in enumerate(_expect(doc["traces"], list, "traces", "traces")):
            _expect(jt, dict, "a trace", "traces", t)
            for k in jt:
                if k not in TRACE_KEYS:
                    ctx.unknown(k, "traces", t)
            attrs = ctx.attrs(jt["attrs"], "traces", t, "attrs") if "attrs" in jt else EMPTY
            events = ()
            if "events" in jt:
                jevents = _expect(jt["events"], list, "events", "traces", t, "events")
                events = tuple(ctx.event(je, t, e) for e, je in enumerate(jevents))
            traces.append(Trace(attrs, events))
    return EventLog(
        attributes=ctx.attrs(doc["attrs"], "attrs") if "attrs" in doc else EMPTY,
        globals=ctx.global_attrs(doc["global-attrs"]) if "global-attrs" in doc else GlobalAttributes(),
        classifiers=ctx.classifiers(doc["classifiers"]) if "classifiers" in doc else EMPTY,
        extensions=ctx.extensions(doc["extensions"]) if "extensions" in doc else (),
        traces=tuple(traces),
    )


# -- streaming backend ---------------------------------------------------------

def _collect(kind: str, value, it: Iterator, on_dup) -> Any:
    """Materialize the JSON value whose first event is ``(kind, value)``."""
    if kind is SCALAR:
        return value
    root = {} if kind is START_MAP else []
    stack = []
    cur = root
    key = None
    for kind, value in it:
        if kind is KEY:
            key = value
            continue
        if kind is END_MAP or kind is END_ARRAY:
            if not stack:
                return root
            cur, key = stack.pop()
            continue
        if kind is SCALAR:
            child = value
        else:
            child = {} if kind is START_MAP else []
        if type(cur) is dict:
            if key in cur:
                on_dup(key)
            cur[key] = child
        else:
            cur.append(child)
        if kind is not SCALAR:
            stack.append((cur, key))
            cur = child
    raise AssertionError("event stream ended inside a value")


def _keys(it: Iterator, ctx: _Context):
    """Yield the keys of the object whose start event was just consumed."""
    seen = set()
    for kind, key in it:
        if kind is END_MAP:
            return
        if key in seen:
            ctx.duplicate(key)
        seen.add(key)
        yield key


def _build_streaming(it: Iterator, ctx: _Context) -> EventLog:
    dup = ctx.duplicate
    kind, value = next(it)
    if kind is not START_MAP:
        _collect(kind, value, it, dup)
        raise SchemaViolation("a JXES document must be an object")
    sections: dict[str, Any] = {}
    traces: list[Trace] = []
    for key in _keys(it, ctx):
        kind, value = next(it)
        if key == "traces":
            traces = []
            if kind is not START_ARRAY:
                _collect(kind, value, it, dup)
                raise SchemaViolation("traces must be an array", ("traces",))
            for kind, value in it:
                if kind is END_ARRAY:
                    break
                traces.append(_stream_trace(kind, value, it, ctx, len(traces)))
        elif key in TOP_LEVEL_KEYS:
            sections[key] = _collect(kind, value, it, dup)
        else:
            ctx.unknown(key)
            _collect(kind, value, it, dup)
    for _ in it:  # trailing garbage is a syntax error
        pass
    return EventLog(
        attributes=ctx.attrs(sections["attrs"], "attrs") if "attrs" in sections else EMPTY,
        globals=(
            ctx.global_attrs(sections["global-attrs"])
            if "global-attrs" in sections else GlobalAttributes()
        ),
        classifiers=ctx.classifiers(sections["classifiers"]) if "classifiers" in sections else EMPTY,
        extensions=ctx.extensions(sections["extensions"]) if "extensions" in sections else (),
        traces=tuple(traces),
    )


def _stream_trace(kind, value, it, ctx: _Context, t: int) -> Trace:
    dup = ctx.duplicate
    if kind is not START_MAP:
        _collect(kind, value, it, dup)
        raise SchemaViolation("a trace must be an object", ("traces", t))
    attrs = EMPTY
    events: list[Event] = []
    for key in _keys(it, ctx):
        kind, value = next(it)
        if key == "events":
            events = []
            if kind is not START_ARRAY:
                _collect(kind, value, it, dup)
                raise SchemaViolation("events must be an array", ("traces", t, "events"))
            for kind, value in it:
                if kind is END_ARRAY:
                    break
                events.append(ctx.event(_collect(kind, value, it, dup), t, len(events)))
        elif key == "attrs":
            attrs = ctx.attrs(_collect(kind, value, it, dup), "traces", t, "attrs")
        else:
            ctx.unknown(key, "traces", t)
            _collect(kind, value, it, dup)
    return Trace(attrs, tuple(events))


# -- entry points --------------------------------------------------------------

def parse_jxes(source: Source, opts: ParseOptions | None = None) -> EventLog:
    """Parse a JXES document (bytes, path or binary stream; gzip is sniffed).

    Raises MalformedJson for syntax errors and SchemaViolation (or one of its
    subclasses ReservedKeyMisuse, IntOutOfRange, UnknownKey, DuplicateKey) for
    well-formed JSON that is not valid JXES.
    """
    opts = opts or ParseOptions()
    ctx = _Context(opts.strict)
    if BackendKind(opts.backend) is BackendKind.TREE:
        data = read_all(source)
        doc = _json.load_tree(data, ctx.duplicate)
        del data
        return _build_tree(doc, ctx)
    with open_input(source) as stream:
        return _build_streaming(iter(_json.PullParser(stream)), ctx)


def read_jxes(path, backend: BackendKind | str = BackendKind.TREE, strict: bool = False) -> EventLog:
    return parse_jxes(path, ParseOptions(BackendKind(backend), strict))
