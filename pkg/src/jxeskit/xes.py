"""Read and write the XML XES subset that maps one-to-one onto JXES.

Supported: ``<log>`` with ``<extension>``, ``<global>``, ``<classifier>``,
typed attributes (string, date, int, float, boolean, list, container; ``id``
is read as a string) with arbitrary nesting, ``<trace>`` and ``<event>``.
Anything else raises :class:`UnsupportedConstruct` naming the element, so
nothing is ever dropped silently.
"""

from __future__ import annotations

import io
import logging
import math
import os
import re
import xml.etree.ElementTree as ET
from dataclasses import dataclass
from datetime import datetime
from typing import IO, Iterator

from ._io import Source, atomic_output, open_input
from .errors import IoFailure, MalformedXml, UnsupportedConstruct
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
    format_date,
    parse_date,
)

__all__ = ["XesDocumentMeta", "parse_xes", "read_xes", "write_xes", "dump_xes", "save_xes"]

log = logging.getLogger(__name__)

SCALAR_TAGS = ("string", "date", "int", "float", "boolean", "id")
ATTRIBUTE_TAGS = SCALAR_TAGS + ("list", "container")


@dataclass(frozen=True)
class XesDocumentMeta:
    """Header fields of the ``<log>`` element, passed through untouched."""

    xes_version: str | None = None
    features: str | None = None


# -- reading -------------------------------------------------------------------

def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1]


def _xes_date(text: str, path: str) -> datetime:
    d = parse_date(text)
    if d is not None:
        return d
    # other ISO-8601 spellings seen in the wild: more or fewer fraction
    # digits, no zone (taken as UTC)
    m = re.fullmatch(
        r"(\d{4}-\d{2}-\d{2}T\d{2}:\d{2}:\d{2})(?:\.(\d+))?(Z|[+-]\d{2}:?\d{2})?", text.strip()
    )
    if m:
        base, frac, zone = m.groups()
        frac = ((frac or "") + "000")[:3]
        zone = "+00:00" if zone in (None, "Z") else zone
        if len(zone) == 5:
            zone = zone[:3] + ":" + zone[3:]
        d = parse_date(f"{base}.{frac}{zone}")
        if d is not None:
            return d
    raise UnsupportedConstruct(f"unparseable date {text!r}", path)


def _scalar(tag: str, raw: str | None, path: str):
    if raw is None:
        raise UnsupportedConstruct("attribute has no value", path)
    if tag == "string":
        return raw
    if tag == "id":
        log.warning("%s: id attribute read as string (JXES has no id type)", path)
        return raw
    if tag == "date":
        return _xes_date(raw, path)
    if tag == "int":
        try:
            n = int(raw.strip())
        except ValueError:
            raise UnsupportedConstruct(f"bad int {raw!r}", path) from None
        if not INT_MIN <= n <= INT_MAX:
            raise UnsupportedConstruct(f"int {raw!r} exceeds 64 bits", path)
        return n
    if tag == "float":
        try:
            x = float(raw)
        except ValueError:
            raise UnsupportedConstruct(f"bad float {raw!r}", path) from None
        if not math.isfinite(x):
            raise UnsupportedConstruct(f"non-finite float {raw!r} has no JSON form", path)
        return x
    lowered = raw.strip().lower()
    if lowered in ("true", "false"):
        return lowered == "true"
    raise UnsupportedConstruct(f"bad boolean {raw!r}", path)


class _Paths:
    """Counts siblings so error paths read like ``/log/trace[3]/event[1]``."""

    def __init__(self, parent: str):
        self.parent = parent
        self.counts: dict[str, int] = {}

    def __call__(self, elem: ET.Element) -> str:
        tag = _local(elem.tag)
        n = self.counts[tag] = self.counts.get(tag, 0) + 1
        key = elem.get("key")
        suffix = f"[@key={key!r}]" if key is not None else f"[{n}]"
        return f"{self.parent}/{tag}{suffix}"


def _attr_children(elem: ET.Element, path: str) -> dict[str, Attribute]:
    out: dict[str, Attribute] = {}
    paths = _Paths(path)
    for child in elem:
        attr = _attribute(child, paths(child))
        if attr.key in out:
            raise UnsupportedConstruct(f"duplicate attribute key {attr.key!r}", path)
        out[attr.key] = attr
    return out


def _attribute(elem: ET.Element, path: str) -> Attribute:
    tag = _local(elem.tag)
    if tag not in ATTRIBUTE_TAGS:
        raise UnsupportedConstruct(f"<{tag}> is not an attribute element", path)
    key = elem.get("key")
    if key is None:
        raise UnsupportedConstruct("attribute without key", path)
    if tag in SCALAR_TAGS:
        children = _attr_children(elem, path)
        return Attribute(key, _scalar(tag, elem.get("value"), path), children or EMPTY)
    if tag == "container":
        return Attribute(key, Container(_attr_children(elem, path)))
    # list: items live in <values>; other children are the list's own nested attributes
    values = [c for c in elem if _local(c.tag) == "values"]
    if len(values) > 1:
        raise UnsupportedConstruct("list with several <values> elements", path)
    if values:
        holder = values[0]
        rest = ET.Element("list")
        rest.extend(c for c in elem if c is not holder)
        children = _attr_children(rest, path)
    else:
        holder, children = elem, {}
    paths = _Paths(path + "/values")
    items = tuple(_attribute(c, paths(c)) for c in holder)
    return Attribute(key, AttrList(items), children or EMPTY)


def _trace(elem: ET.Element, path: str) -> Trace:
    attrs: dict[str, Attribute] = {}
    events = []
    paths = _Paths(path)
    for child in elem:
        cpath = paths(child)
        if _local(child.tag) == "event":
            events.append(Event(_attr_children(child, cpath) or EMPTY))
            continue
        attr = _attribute(child, cpath)
        if attr.key in attrs:
            raise UnsupportedConstruct(f"duplicate attribute key {attr.key!r}", path)
        attrs[attr.key] = attr
    return Trace(attrs or EMPTY, tuple(events))


def _classifier_keys(raw: str | None, path: str) -> tuple[str, ...]:
    if not raw:
        raise UnsupportedConstruct("classifier without keys", path)
    if "'" in raw or '"' in raw:
        raise UnsupportedConstruct("quoted classifier keys are not supported", path)
    keys = tuple(raw.split(" "))
    if any(not k for k in keys):
        raise UnsupportedConstruct(f"classifier keys {raw!r} are not single-space separated", path)
    return keys


def _iterparse(stream: IO[bytes]) -> Iterator[tuple[str, ET.Element]]:
    try:
        yield from ET.iterparse(stream, events=("start", "end"))
    except ET.ParseError as exc:
        raise MalformedXml(str(exc)) from None


def parse_xes(source: Source) -> tuple[EventLog, XesDocumentMeta]:
    """Read an XES document (bytes, path or stream; gzip is sniffed)."""
    with open_input(source) as stream:
        return _parse(stream)


def _parse(stream: IO[bytes]) -> tuple[EventLog, XesDocumentMeta]:
    depth = 0
    root = None
    meta = XesDocumentMeta()
    log_attrs: dict[str, Attribute] = {}
    globals_: dict[str, dict[str, Attribute]] = {"trace": {}, "event": {}}
    classifiers: dict[str, tuple[str, ...]] = {}
    extensions: list[Extension] = []
    traces: list[Trace] = []
    paths = _Paths("/log")
    for kind, elem in _iterparse(stream):
        if kind == "start":
            depth += 1
            if depth == 1:
                root = elem
                if _local(elem.tag) != "log":
                    raise UnsupportedConstruct(f"root element is <{_local(elem.tag)}>, not <log>", "/")
                meta = XesDocumentMeta(elem.get("xes.version"), elem.get("xes.features"))
            continue
        depth -= 1
        if depth != 1:
            continue
        tag = _local(elem.tag)
        path = paths(elem)
        if tag == "trace":
            traces.append(_trace(elem, path))
        elif tag == "extension":
            try:
                extensions.append(Extension(elem.get("name"), elem.get("prefix"), elem.get("uri")))
            except ValueError as exc:
                raise UnsupportedConstruct(str(exc), path) from None
        elif tag == "global":
            scope = elem.get("scope", "event")
            if scope not in globals_:
                raise UnsupportedConstruct(f"global scope {scope!r}", path)
            for key, attr in _attr_children(elem, path).items():
                if key in globals_[scope]:
                    raise UnsupportedConstruct(f"duplicate global {key!r}", path)
                globals_[scope][key] = attr
        elif tag == "classifier":
            name = elem.get("name")
            if name is None:
                raise UnsupportedConstruct("classifier without name", path)
            if name in classifiers:
                raise UnsupportedConstruct(f"duplicate classifier {name!r}", path)
            classifiers[name] = _classifier_keys(elem.get("keys"), path)
        elif tag in ATTRIBUTE_TAGS:
            attr = _attribute(elem, path)
            if attr.key in log_attrs:
                raise UnsupportedConstruct(f"duplicate attribute key {attr.key!r}", "/log")
            log_attrs[attr.key] = attr
        else:
            raise UnsupportedConstruct(f"<{tag}> is outside the supported XES subset", path)
        root.remove(elem)
    if root is None:
        raise MalformedXml("empty document")
    return (
        EventLog(
            attributes=log_attrs or EMPTY,
            globals=GlobalAttributes(globals_["trace"] or EMPTY, globals_["event"] or EMPTY),
            classifiers=classifiers or EMPTY,
            extensions=tuple(extensions),
            traces=tuple(traces),
        ),
        meta,
    )


def read_xes(path) -> EventLog:
    return parse_xes(path)[0]


# -- writing -------------------------------------------------------------------

_XML_ILLEGAL = re.compile("[\x00-\x08\x0b\x0c\x0e-\x1f\ud800-\udfff￾￿]")
_ESCAPES = str.maketrans({
    "&": "&amp;", "<": "&lt;", ">": "&gt;", '"': "&quot;",
    "\n": "&#10;", "\r": "&#13;", "\t": "&#9;",
})


def _q(text: str) -> str:
    """Quoted XML attribute value that parses back to exactly ``text``."""
    if _XML_ILLEGAL.search(text):
        raise UnsupportedConstruct(f"{text!r} contains characters XML 1.0 cannot carry")
    return '"' + text.translate(_ESCAPES) + '"'


def _value_text(value) -> tuple[str, str]:
    t = type(value)
    if t is str:
        return "string", value
    if t is bool:
        return "boolean", "true" if value else "false"
    if t is int:
        return "int", str(value)
    if t is float:
        if not math.isfinite(value):
            raise UnsupportedConstruct(f"non-finite float {value!r}")
        return "float", repr(value)
    if isinstance(value, datetime):
        return "date", format_date(value)
    raise TypeError(f"unsupported attribute value {value!r}")


class _XesEmitter:
    def __init__(self, sink: IO[bytes], indent: str = "\t"):
        self.sink = sink
        self.indent = indent
        self.parts: list[str] = []

    def flush(self):
        self.sink.write("".join(self.parts).encode("utf-8"))
        self.parts.clear()

    def attr(self, a: Attribute, depth: int):
        w = self.parts.append
        pad = self.indent * depth
        value = a.value
        if type(value) is AttrList:
            w(f"{pad}<list key={_q(a.key)}>\n")
            if value.items:
                w(f"{pad}{self.indent}<values>\n")
                for item in value.items:
                    self.attr(item, depth + 2)
                w(f"{pad}{self.indent}</values>\n")
            else:
                w(f"{pad}{self.indent}<values/>\n")
            for child in a.children.values():
                self.attr(child, depth + 1)
            w(f"{pad}</list>\n")
            return
        if type(value) is Container:
            if a.children:
                raise UnsupportedConstruct(
                    f"container attribute {a.key!r} with nested attributes has no XES form"
                )
            if not value.entries:
                w(f"{pad}<container key={_q(a.key)}/>\n")
                return
            w(f"{pad}<container key={_q(a.key)}>\n")
            for entry in value.entries.values():
                self.attr(entry, depth + 1)
            w(f"{pad}</container>\n")
            return
        tag, text = _value_text(value)
        if not a.children:
            w(f"{pad}<{tag} key={_q(a.key)} value={_q(text)}/>\n")
            return
        w(f"{pad}<{tag} key={_q(a.key)} value={_q(text)}>\n")
        for child in a.children.values():
            self.attr(child, depth + 1)
        w(f"{pad}</{tag}>\n")

    def document(self, log_: EventLog, meta: XesDocumentMeta):
        w = self.parts.append
        w('<?xml version="1.0" encoding="UTF-8" ?>\n')
        head = "<log"
        if meta.xes_version is not None:
            head += f" xes.version={_q(meta.xes_version)}"
        if meta.features is not None:
            head += f" xes.features={_q(meta.features)}"
        body = (
            log_.extensions or log_.globals.trace or log_.globals.event
            or log_.classifiers or log_.attributes or log_.traces
        )
        if not body:
            w(head + "/>\n")
            self.flush()
            return
        w(head + ">\n")
        ind = self.indent
        for x in log_.extensions:
            w(f"{ind}<extension name={_q(x.name)} prefix={_q(x.prefix)} uri={_q(x.uri)}/>\n")
        for scope, attrs in (("trace", log_.globals.trace), ("event", log_.globals.event)):
            if attrs:
                w(f'{ind}<global scope="{scope}">\n')
                for a in attrs.values():
                    self.attr(a, 2)
                w(f"{ind}</global>\n")
        for name, keys in log_.classifiers.items():
            for k in keys:
                if not k or " " in k:
                    raise UnsupportedConstruct(
                        f"classifier {name!r}: key {k!r} cannot be space-separated"
                    )
            w(f"{ind}<classifier name={_q(name)} keys={_q(' '.join(keys))}/>\n")
        for a in log_.attributes.values():
            self.attr(a, 1)
        for trace in log_.traces:
            w(f"{ind}<trace>\n")
            for a in trace.attributes.values():
                self.attr(a, 2)
            for event in trace.events:
                w(f"{ind}{ind}<event>\n")
                for a in event.attributes.values():
                    self.attr(a, 3)
                w(f"{ind}{ind}</event>\n")
            w(f"{ind}</trace>\n")
            if len(self.parts) > 1 << 14:
                self.flush()
        w("</log>\n")
        self.flush()


def dump_xes(log_: EventLog, sink: IO[bytes], meta: XesDocumentMeta | None = None) -> None:
    try:
        _XesEmitter(sink).document(log_, meta or XesDocumentMeta())
    except OSError as exc:
        raise IoFailure(f"write failed: {exc}") from exc


def write_xes(log_: EventLog, meta: XesDocumentMeta | None = None) -> bytes:
    buf = io.BytesIO()
    dump_xes(log_, buf, meta)
    return buf.getvalue()


def save_xes(log_: EventLog, path, meta: XesDocumentMeta | None = None) -> int:
    """Atomically write XES to ``path`` (gzipped for ``*.gz``); returns bytes on disk."""
    with atomic_output(path) as sink:
        dump_xes(log_, sink, meta)
    return os.path.getsize(path)
