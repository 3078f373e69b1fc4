"""EventLog to JXES (JSON).

Top-level keys are written in a fixed order (``attrs``, ``global-attrs``,
``classifiers``, ``extensions``, ``traces``) and empty sections are left
out. List values are written as arrays of single-pair objects so repeated
keys survive. The tree backend builds the whole JSON structure and hands it
to :func:`json.dumps`; the streaming backend emits text while walking the
log. Both produce identical bytes, pretty or not.
"""

from __future__ import annotations

import io
import math
import os
from datetime import datetime
from json import dumps
from json.encoder import encode_basestring
from typing import IO, Mapping

from ._io import atomic_output
from .errors import IoFailure
from .model import Attribute, AttrList, Container, EventLog, format_date
from .reader import NESTED_KEY, VALUE_KEY, BackendKind

__all__ = ["canonicalize", "dump_jxes", "write_jxes", "save_jxes"]

_INDENT = "  "
_FLUSH_AT = 1 << 16


def _check_container(c: Container):
    if VALUE_KEY in c.entries or NESTED_KEY in c.entries:
        raise ValueError(
            "a container holding 'value' or 'nested-attrs' cannot be written as JXES "
            "(those keys are reserved for nested attributes)"
        )


def _check_float(x: float):
    if not math.isfinite(x):
        raise ValueError(f"{x!r} has no JSON representation")


# -- tree backend --------------------------------------------------------------

def _tree_value(value):
    t = type(value)
    if t is str or t is bool or t is int:
        return value
    if t is float:
        _check_float(value)
        return value
    if isinstance(value, datetime):
        return format_date(value)
    if t is AttrList:
        return [{a.key: _tree_attr(a)} for a in value.items]
    if t is Container:
        _check_container(value)
        return _tree_attrs(value.entries)
    raise TypeError(f"unsupported attribute value {value!r}")


def _tree_attr(attr: Attribute):
    if attr.children:
        return {VALUE_KEY: _tree_value(attr.value), NESTED_KEY: _tree_attrs(attr.children)}
    return _tree_value(attr.value)


def _tree_attrs(attrs: Mapping[str, Attribute]) -> dict:
    return {k: _tree_attr(a) for k, a in attrs.items()}


def to_tree(log: EventLog) -> dict:
    """The JSON document for ``log`` as plain dicts and lists."""
    doc = {}
    if log.attributes:
        doc["attrs"] = _tree_attrs(log.attributes)
    g = {}
    if log.globals.trace:
        g["trace"] = _tree_attrs(log.globals.trace)
    if log.globals.event:
        g["event"] = _tree_attrs(log.globals.event)
    if g:
        doc["global-attrs"] = g
    if log.classifiers:
        doc["classifiers"] = {name: list(keys) for name, keys in log.classifiers.items()}
    if log.extensions:
        doc["extensions"] = [
            {"name": x.name, "prefix": x.prefix, "uri": x.uri} for x in log.extensions
        ]
    if log.traces:
        traces = []
        for trace in log.traces:
            jt = {}
            if trace.attributes:
                jt["attrs"] = _tree_attrs(trace.attributes)
            if trace.events:
                jt["events"] = [_tree_attrs(e.attributes) for e in trace.events]
            traces.append(jt)
        doc["traces"] = traces
    return doc


# -- streaming backend ---------------------------------------------------------

class _Emitter:
    def __init__(self, sink: IO[bytes], pretty: bool):
        self.sink = sink
        self.pretty = pretty
        self.colon = ": " if pretty else ":"
        self.parts: list[str] = []
        self._nl_cache: dict[int, str] = {}

    def nl(self, depth: int) -> str:
        if not self.pretty:
            return ""
        s = self._nl_cache.get(depth)
        if s is None:
            s = self._nl_cache[depth] = "\n" + _INDENT * depth
        return s

    def flush(self):
        if self.parts:
            self.sink.write("".join(self.parts).encode("utf-8"))
            self.parts.clear()

    def key(self, k: str, depth: int, first: bool):
        w = self.parts.append
        if not first:
            w(",")
        w(self.nl(depth))
        w(encode_basestring(k))
        w(self.colon)

    def attrs(self, attrs: Mapping[str, Attribute], depth: int):
        w = self.parts.append
        if not attrs:
            w("{}")
            return
        w("{")
        first = True
        for k, a in attrs.items():
            self.key(k, depth + 1, first)
            first = False
            self.attr(a, depth + 1)
        w(self.nl(depth))
        w("}")

    def attr(self, a: Attribute, depth: int):
        if not a.children:
            self.value(a.value, depth)
            return
        w = self.parts.append
        w("{")
        self.key(VALUE_KEY, depth + 1, True)
        self.value(a.value, depth + 1)
        self.key(NESTED_KEY, depth + 1, False)
        self.attrs(a.children, depth + 1)
        w(self.nl(depth))
        w("}")

    def value(self, v, depth: int):
        w = self.parts.append
        t = type(v)
        if t is str:
            w(encode_basestring(v))
        elif t is bool:
            w("true" if v else "false")
        elif t is int:
            w(int.__repr__(v))
        elif t is float:
            _check_float(v)
            w(float.__repr__(v))
        elif isinstance(v, datetime):
            w(encode_basestring(format_date(v)))
        elif t is AttrList:
            if not v.items:
                w("[]")
                return
            w("[")
            for i, a in enumerate(v.items):
                if i:
                    w(",")
                w(self.nl(depth + 1))
                w("{")
                self.key(a.key, depth + 2, True)
                self.attr(a, depth + 2)
                w(self.nl(depth + 1))
                w("}")
            w(self.nl(depth))
            w("]")
        elif t is Container:
            _check_container(v)
            self.attrs(v.entries, depth)
        else:
            raise TypeError(f"unsupported attribute value {v!r}")

    def document(self, log: EventLog):
        w = self.parts.append
        sections = []
        if log.attributes:
            sections.append(("attrs", lambda d: self.attrs(log.attributes, d)))
        if log.globals.trace or log.globals.event:
            sections.append(("global-attrs", lambda d: self.globals(log, d)))
        if log.classifiers:
            sections.append(("classifiers", lambda d: self.classifiers(log, d)))
        if log.extensions:
            sections.append(("extensions", lambda d: self.extensions(log, d)))
        if log.traces:
            sections.append(("traces", lambda d: self.traces(log, d)))
        if not sections:
            w("{}")
        else:
            w("{")
            for i, (name, emit) in enumerate(sections):
                self.key(name, 1, i == 0)
                emit(1)
            w(self.nl(0))
            w("}")
        self.flush()

    def globals(self, log: EventLog, depth: int):
        w = self.parts.append
        w("{")
        first = True
        for name, attrs in (("trace", log.globals.trace), ("event", log.globals.event)):
            if attrs:
                self.key(name, depth + 1, first)
                first = False
                self.attrs(attrs, depth + 1)
        w(self.nl(depth))
        w("}")

    def classifiers(self, log: EventLog, depth: int):
        w = self.parts.append
        w("{")
        for i, (name, keys) in enumerate(log.classifiers.items()):
            self.key(name, depth + 1, i == 0)
            w("[")
            for j, k in enumerate(keys):
                if j:
                    w(",")
                w(self.nl(depth + 2))
                w(encode_basestring(k))
            w(self.nl(depth + 1))
            w("]")
        w(self.nl(depth))
        w("}")

    def extensions(self, log: EventLog, depth: int):
        w = self.parts.append
        w("[")
        for i, x in enumerate(log.extensions):
            if i:
                w(",")
            w(self.nl(depth + 1))
            w("{")
            for j, (k, v) in enumerate((("name", x.name), ("prefix", x.prefix), ("uri", x.uri))):
                self.key(k, depth + 2, j == 0)
                w(encode_basestring(v))
            w(self.nl(depth + 1))
            w("}")
        w(self.nl(depth))
        w("]")

    def traces(self, log: EventLog, depth: int):
        w = self.parts.append
        w("[")
        for i, trace in enumerate(log.traces):
            if i:
                w(",")
            w(self.nl(depth + 1))
            if not trace.attributes and not trace.events:
                w("{}")
                continue
            w("{")
            first = True
            if trace.attributes:
                self.key("attrs", depth + 2, True)
                first = False
                self.attrs(trace.attributes, depth + 2)
            if trace.events:
                self.key("events", depth + 2, first)
                w("[")
                for j, event in enumerate(trace.events):
                    if j:
                        w(",")
                    w(self.nl(depth + 3))
                    self.attrs(event.attributes, depth + 3)
                w(self.nl(depth + 2))
                w("]")
            w(self.nl(depth + 1))
            w("}")
            if len(self.parts) > _FLUSH_AT:
                self.flush()
        w(self.nl(depth))
        w("]")


# -- entry points --------------------------------------------------------------

def dump_jxes(
    log: EventLog,
    sink: IO[bytes],
    backend: BackendKind | str = BackendKind.TREE,
    pretty: bool = False,
) -> None:
    """Serialize ``log`` as UTF-8 JSON into a binary file object."""
    try:
        if BackendKind(backend) is BackendKind.TREE:
            text = dumps(
                to_tree(log),
                ensure_ascii=False,
                indent=len(_INDENT) if pretty else None,
                separators=(",", ": ") if pretty else (",", ":"),
            )
            sink.write(text.encode("utf-8"))
        else:
            _Emitter(sink, pretty).document(log)
    except OSError as exc:
        raise IoFailure(f"write failed: {exc}") from exc


def write_jxes(
    log: EventLog, backend: BackendKind | str = BackendKind.TREE, pretty: bool = False
) -> bytes:
    buf = io.BytesIO()
    dump_jxes(log, buf, backend, pretty)
    return buf.getvalue()


def canonicalize(log: EventLog) -> bytes:
    """Deterministic minimal-whitespace JXES bytes for ``log``."""
    return write_jxes(log, BackendKind.TREE, pretty=False)


def save_jxes(
    log: EventLog,
    path,
    backend: BackendKind | str = BackendKind.TREE,
    pretty: bool = False,
) -> int:
    """Atomically write ``log`` to ``path`` (gzipped for ``*.gz``); returns bytes on disk."""
    with atomic_output(path) as sink:
        dump_jxes(log, sink, backend, pretty)
    return os.path.getsize(path)
