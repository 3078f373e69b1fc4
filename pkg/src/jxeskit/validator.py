"""Structural checks on JXES documents with JSONPath-addressed diagnostics.

This walks the decoded JSON independently of the reader and collects every
finding instead of stopping at the first one. A document gets at least one
error exactly when :func:`jxeskit.reader.parse_jxes` (non-strict) rejects it.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Iterable

from . import _json
from ._io import Source, read_all
from .errors import JxesError, MalformedJson, json_path
from .model import INT_MAX, INT_MIN, is_uri

__all__ = ["Diagnostic", "validate_document", "format_text", "format_json", "has_errors"]

ERROR = "error"
WARNING = "warning"

_TOP = ("attrs", "global-attrs", "classifiers", "extensions", "traces")


@dataclass(frozen=True)
class Diagnostic:
    severity: str
    code: str
    json_path: str
    message: str

    def __str__(self):
        return f"{self.severity} {self.code} {self.json_path}: {self.message}"


class _Walker:
    def __init__(self):
        self.out: list[Diagnostic] = []

    def error(self, code, parts, msg):
        self.out.append(Diagnostic(ERROR, code, json_path(parts), msg))

    def warn(self, code, parts, msg):
        self.out.append(Diagnostic(WARNING, code, json_path(parts), msg))

    # attribute position: nested attribute, container or plain value
    def attribute(self, jv, parts):
        if isinstance(jv, dict) and ("value" in jv or "nested-attrs" in jv):
            extra = sorted(set(jv) - {"value", "nested-attrs"})
            if extra:
                self.error(
                    "ReservedKeyMisuse", parts,
                    f"'value'/'nested-attrs' are reserved and cannot be mixed with {extra}",
                )
            if "value" in jv:
                self.value(jv["value"], parts + ("value",))
            else:
                self.warn("NestedWithoutValue", parts, "nested attribute has no 'value'")
            if "nested-attrs" in jv:
                nested = jv["nested-attrs"]
                if not isinstance(nested, dict):
                    self.error("ReservedKeyMisuse", parts + ("nested-attrs",),
                               "'nested-attrs' must be an object")
                else:
                    self.attributes(nested, parts + ("nested-attrs",))
            return
        self.value(jv, parts)

    def attributes(self, obj: dict, parts):
        for k, v in obj.items():
            self.attribute(v, parts + (k,))

    # value position
    def value(self, jv, parts):
        if isinstance(jv, bool) or isinstance(jv, str):
            return
        if isinstance(jv, int):
            if not INT_MIN <= jv <= INT_MAX:
                try:
                    exact = int(float(jv)) == jv
                except OverflowError:
                    exact = False
                if not exact:
                    self.error("IntOutOfRange", parts, f"integer {jv} does not fit in 64 bits")
            return
        if isinstance(jv, float):
            if not math.isfinite(jv):
                self.error("SchemaViolation", parts, "number is out of the double range")
            return
        if jv is None:
            self.error("SchemaViolation", parts, "null is not a JXES value")
            return
        if isinstance(jv, list):
            for i, el in enumerate(jv):
                if not isinstance(el, dict):
                    self.error("SchemaViolation", parts + (i,), "list elements must be objects")
                    continue
                for k, v in el.items():
                    self.attribute(v, parts + (i, k))
            return
        if "value" in jv or "nested-attrs" in jv:
            self.error("ReservedKeyMisuse", parts,
                       "a nested attribute cannot be the value of another attribute")
            return
        self.attributes(jv, parts)

    def attrs_section(self, jv, parts) -> dict | None:
        if not isinstance(jv, dict):
            self.error("SchemaViolation", parts, "attrs must be an object")
            return None
        self.attributes(jv, parts)
        return jv

    def document(self, doc):
        if not isinstance(doc, dict):
            self.error("SchemaViolation", (), "a JXES document must be an object")
            return
        for k in doc:
            if k not in _TOP:
                self.warn("UnknownKey", (k,), f"unknown top-level key {k!r} is ignored")
        if "attrs" in doc:
            self.attrs_section(doc["attrs"], ("attrs",))

        trace_globals: set[str] = set()
        event_globals: set[str] = set()
        globals_ok = False
        if "global-attrs" in doc:
            g = doc["global-attrs"]
            if not isinstance(g, dict):
                self.error("SchemaViolation", ("global-attrs",), "global-attrs must be an object")
            else:
                globals_ok = True
                for k, v in g.items():
                    p = ("global-attrs", k)
                    if k not in ("trace", "event"):
                        self.error("SchemaViolation", p,
                                   "global-attrs may only contain 'trace' and 'event'")
                    elif self.attrs_section(v, p) is not None:
                        (trace_globals if k == "trace" else event_globals).update(v)

        if "classifiers" in doc:
            c = doc["classifiers"]
            if not isinstance(c, dict):
                self.error("SchemaViolation", ("classifiers",), "classifiers must be an object")
            else:
                for name, keys in c.items():
                    p = ("classifiers", name)
                    if (not isinstance(keys, list) or not keys
                            or not all(isinstance(k, str) for k in keys)):
                        self.error("SchemaViolation", p,
                                   "classifier keys must be a non-empty array of strings")
                        continue
                    missing = [k for k in keys if k not in event_globals]
                    if missing:
                        self.warn("ClassifierKeyNotGlobal", p,
                                  f"keys {missing} are not declared event-level globals")

        if "extensions" in doc:
            x = doc["extensions"]
            if not isinstance(x, list):
                self.error("SchemaViolation", ("extensions",), "extensions must be an array")
            else:
                for i, ext in enumerate(x):
                    p = ("extensions", i)
                    if not isinstance(ext, dict):
                        self.error("SchemaViolation", p, "an extension must be an object")
                        continue
                    for field in ("name", "prefix", "uri"):
                        v = ext.get(field)
                        if not isinstance(v, str) or not v:
                            self.error("SchemaViolation", p,
                                       f"extension {field!r} must be a non-empty string")
                    uri = ext.get("uri")
                    if isinstance(uri, str) and uri and not is_uri(uri):
                        self.error("SchemaViolation", p + ("uri",), f"invalid uri {uri!r}")
                    for k in ext:
                        if k not in ("name", "prefix", "uri"):
                            self.warn("UnknownKey", p + (k,), f"unknown extension key {k!r}")

        if "traces" in doc:
            traces = doc["traces"]
            if not isinstance(traces, list):
                self.error("SchemaViolation", ("traces",), "traces must be an array")
                return
            for t, trace in enumerate(traces):
                self.trace(trace, t, trace_globals if globals_ok else set(),
                           event_globals if globals_ok else set())

    def trace(self, trace, t, trace_globals, event_globals):
        p = ("traces", t)
        if not isinstance(trace, dict):
            self.error("SchemaViolation", p, "a trace must be an object")
            return
        for k in trace:
            if k not in ("attrs", "events"):
                self.warn("UnknownKey", p + (k,), f"unknown trace key {k!r}")
        attrs = {}
        if "attrs" in trace:
            attrs = self.attrs_section(trace["attrs"], p + ("attrs",)) or {}
        missing = [k for k in trace_globals if k not in attrs]
        if missing:
            self.warn("GlobalNotSatisfied", p, f"trace lacks trace-level globals {missing}")
        if "events" not in trace:
            return
        events = trace["events"]
        if not isinstance(events, list):
            self.error("SchemaViolation", p + ("events",), "events must be an array")
            return
        for e, event in enumerate(events):
            pe = p + ("events", e)
            if not isinstance(event, dict):
                self.error("SchemaViolation", pe, "an event must be an object")
                continue
            self.attributes(event, pe)
            missing = [k for k in event_globals if k not in event]
            if missing:
                self.warn("GlobalNotSatisfied", pe, f"event lacks event-level globals {missing}")


def validate_document(source: Source) -> list[Diagnostic]:
    """All diagnostics for one JXES document, in document order per section."""
    walker = _Walker()
    try:
        data = read_all(source)
        doc = _json.load_tree(
            data, lambda k: walker.warn("DuplicateKey", (), f"duplicate key {k!r}: last value wins")
        )
    except MalformedJson as exc:
        return [Diagnostic(ERROR, "MalformedJson", "$", str(exc))]
    except JxesError as exc:
        return [Diagnostic(ERROR, "IoFailure", "$", str(exc))]
    walker.document(doc)
    return walker.out


def has_errors(diags: Iterable[Diagnostic]) -> bool:
    return any(d.severity == ERROR for d in diags)


def format_text(diags: Iterable[Diagnostic]) -> str:
    return "".join(f"{d}\n" for d in diags)


def format_json(diags: list[Diagnostic]) -> str:
    return json.dumps(
        {
            "errors": sum(d.severity == ERROR for d in diags),
            "warnings": sum(d.severity == WARNING for d in diags),
            "diagnostics": [asdict(d) for d in diags],
        },
        indent=2,
        ensure_ascii=False,
    )
