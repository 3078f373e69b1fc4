"""In-memory event log model mirroring the XES meta-model.

Attribute values are plain Python objects where one exists:

    =========  ==========================================
    kind       Python representation
    =========  ==========================================
    string     ``str``
    date       timezone-aware ``datetime.datetime``
    int        ``int`` (64-bit signed range)
    float      ``float``
    boolean    ``bool``
    list       :class:`AttrList` (ordered, duplicate keys allowed)
    container  :class:`Container` (ordered, unique keys)
    =========  ==========================================

There is deliberately no ID kind. All mappings are insertion ordered and
the order is significant for equivalence and serialization. Model objects
are frozen; treat the dicts they hold as read-only too.
"""

from __future__ import annotations

import re
import struct
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Union

__all__ = [
    "Attribute",
    "AttrList",
    "Container",
    "Event",
    "EventLog",
    "Extension",
    "GlobalAttributes",
    "Stats",
    "Trace",
    "Value",
    "ACTIVITY_KEY",
    "TIMESTAMP_KEY",
    "INT_MIN",
    "INT_MAX",
    "format_date",
    "kind_of",
    "log_statistics",
    "logs_equivalent",
    "make_attrs",
    "parse_date",
]

ACTIVITY_KEY = "concept:name"
TIMESTAMP_KEY = "time:timestamp"

INT_MIN = -(2**63)
INT_MAX = 2**63 - 1

EMPTY: Mapping[str, "Attribute"] = MappingProxyType({})


@dataclass(frozen=True, slots=True)
class AttrList:
    """Ordered sequence of attributes; repeated keys are allowed."""

    items: tuple[Attribute, ...] = ()


@dataclass(frozen=True, slots=True)
class Container:
    """Ordered key -> attribute map with unique keys."""

    entries: Mapping[str, Attribute] = EMPTY

    @classmethod
    def from_attrs(cls, attrs: Iterable[Attribute]) -> Container:
        entries: dict[str, Attribute] = {}
        for attr in attrs:
            if attr.key in entries:
                raise ValueError(f"duplicate container key {attr.key!r}")
            entries[attr.key] = attr
        return cls(entries)


Value = Union[str, datetime, int, float, bool, AttrList, Container]


@dataclass(frozen=True, slots=True)
class Attribute:
    key: str
    value: Value
    children: Mapping[str, Attribute] = EMPTY


@dataclass(frozen=True, slots=True)
class Event:
    attributes: Mapping[str, Attribute] = EMPTY

    def get(self, key: str, default=None):
        attr = self.attributes.get(key)
        return default if attr is None else attr.value


@dataclass(frozen=True, slots=True)
class Trace:
    attributes: Mapping[str, Attribute] = EMPTY
    events: tuple[Event, ...] = ()


@dataclass(frozen=True, slots=True)
class Extension:
    name: str
    prefix: str
    uri: str

    def __post_init__(self):
        for fname in ("name", "prefix", "uri"):
            if not isinstance(getattr(self, fname), str) or not getattr(self, fname):
                raise ValueError(f"extension {fname} must be a non-empty string")
        if not is_uri(self.uri):
            raise ValueError(f"extension uri {self.uri!r} is not a valid URI")


@dataclass(frozen=True, slots=True)
class GlobalAttributes:
    trace: Mapping[str, Attribute] = EMPTY
    event: Mapping[str, Attribute] = EMPTY


@dataclass(frozen=True, slots=True)
class EventLog:
    attributes: Mapping[str, Attribute] = EMPTY
    globals: GlobalAttributes = field(default_factory=GlobalAttributes)
    classifiers: Mapping[str, tuple[str, ...]] = EMPTY
    extensions: tuple[Extension, ...] = ()
    traces: tuple[Trace, ...] = ()

    def __post_init__(self):
        for name, keys in self.classifiers.items():
            if not keys:
                raise ValueError(f"classifier {name!r} has no keys")


def make_attrs(attrs: Iterable[Attribute]) -> dict[str, Attribute]:
    """Key a sequence of attributes, refusing duplicates."""
    out: dict[str, Attribute] = {}
    for attr in attrs:
        if attr.key in out:
            raise ValueError(f"duplicate attribute key {attr.key!r}")
        out[attr.key] = attr
    return out


_URI_RE = re.compile(r"[A-Za-z][A-Za-z0-9+.\-]*:[^\s]*\Z")


def is_uri(text: str) -> bool:
    return bool(_URI_RE.match(text))


# -- dates -----------------------------------------------------------------

_DATE_RE = re.compile(
    r"(\d{4})-(\d{2})-(\d{2})T(\d{2}):(\d{2}):(\d{2})(?:\.(\d{3}))?"
    r"(?:(Z)|([+-])(\d{2}):(\d{2}))\Z"
)
_TZ_CACHE: dict[int, timezone] = {0: timezone.utc}


def _tz(minutes: int) -> timezone:
    tz = _TZ_CACHE.get(minutes)
    if tz is None:
        tz = _TZ_CACHE[minutes] = timezone(timedelta(minutes=minutes))
    return tz


def parse_date(text: str) -> datetime | None:
    """Return the instant for an ISO-8601 ``YYYY-MM-DDThh:mm:ss(.fff)?(Z|+hh:mm)``
    string, or None when the text does not have that shape or is not a real
    calendar instant."""
    if len(text) < 20 or text[4] != "-" or text[10] != "T":
        return None
    m = _DATE_RE.match(text)
    if m is None:
        return None
    year, month, day, hh, mm, ss, frac, z, sign, oh, om = m.groups()
    if z:
        offset = 0
    else:
        oh_i, om_i = int(oh), int(om)
        if oh_i > 23 or om_i > 59:
            return None
        offset = oh_i * 60 + om_i
        if sign == "-":
            offset = -offset
    try:
        return datetime(
            int(year), int(month), int(day), int(hh), int(mm), int(ss),
            int(frac) * 1000 if frac else 0, _tz(offset),
        )
    except ValueError:
        return None


def _utc_offset_minutes(dt: datetime) -> int:
    off = dt.utcoffset()
    if off is None:
        return 0
    return int(off.total_seconds()) // 60


def format_date(dt: datetime) -> str:
    """ISO-8601 with exactly three fractional digits; ``Z`` for UTC.

    Naive datetimes are taken to be UTC. Sub-minute offsets are not
    representable and raise ValueError.
    """
    off = dt.utcoffset()
    if off is not None and off.total_seconds() % 60:
        raise ValueError(f"offset {off} is not a whole number of minutes")
    minutes = _utc_offset_minutes(dt)
    if minutes == 0:
        suffix = "Z"
    else:
        sign = "+" if minutes > 0 else "-"
        h, m = divmod(abs(minutes), 60)
        suffix = f"{sign}{h:02d}:{m:02d}"
    return (
        f"{dt.year:04d}-{dt.month:02d}-{dt.day:02d}T{dt.hour:02d}:{dt.minute:02d}:"
        f"{dt.second:02d}.{dt.microsecond // 1000:03d}{suffix}"
    )


def kind_of(value: Value) -> str:
    """Name of the attribute kind (XES element name) for a model value."""
    # bool before int: bool is an int subclass
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, str):
        return "string"
    if isinstance(value, int):
        return "int"
    if isinstance(value, float):
        return "float"
    if isinstance(value, datetime):
        return "date"
    if isinstance(value, AttrList):
        return "list"
    if isinstance(value, Container):
        return "container"
    raise TypeError(f"unsupported attribute value {value!r}")


# -- equivalence -----------------------------------------------------------

def _float_bits(x: float) -> bytes:
    return struct.pack("<d", x)


def _date_key(dt: datetime):
    minutes = _utc_offset_minutes(dt)
    instant = dt.replace(tzinfo=None) - timedelta(minutes=minutes)
    return instant.replace(microsecond=instant.microsecond // 1000 * 1000), minutes


def _value_eq(a: Value, b: Value) -> bool:
    ka, kb = kind_of(a), kind_of(b)
    if ka != kb:
        return False
    if ka == "float":
        return _float_bits(a) == _float_bits(b)
    if ka == "date":
        return _date_key(a) == _date_key(b)
    if ka == "list":
        return len(a.items) == len(b.items) and all(
            _attr_eq(x, y) for x, y in zip(a.items, b.items)
        )
    if ka == "container":
        return _attrs_eq(a.entries, b.entries)
    return a == b


def _attr_eq(a: Attribute, b: Attribute) -> bool:
    return (
        a.key == b.key
        and _value_eq(a.value, b.value)
        and _attrs_eq(a.children, b.children)
    )


def _attrs_eq(a: Mapping[str, Attribute], b: Mapping[str, Attribute]) -> bool:
    if len(a) != len(b):
        return False
    for (ka, va), (kb, vb) in zip(a.items(), b.items()):
        if ka != kb or not _attr_eq(va, vb):
            return False
    return True


def logs_equivalent(a: EventLog, b: EventLog) -> bool:
    """Structural equality of two logs.

    Everything is order sensitive. Dates compare by instant truncated to
    milliseconds plus UTC offset, floats compare bit for bit, and kinds must
    match exactly (``1`` and ``1.0`` and ``True`` all differ).
    """
    if not (
        _attrs_eq(a.attributes, b.attributes)
        and _attrs_eq(a.globals.trace, b.globals.trace)
        and _attrs_eq(a.globals.event, b.globals.event)
        and list(a.classifiers.items()) == list(b.classifiers.items())
        and tuple(a.extensions) == tuple(b.extensions)
        and len(a.traces) == len(b.traces)
    ):
        return False
    for ta, tb in zip(a.traces, b.traces):
        if not _attrs_eq(ta.attributes, tb.attributes) or len(ta.events) != len(tb.events):
            return False
        for ea, eb in zip(ta.events, tb.events):
            if not _attrs_eq(ea.attributes, eb.attributes):
                return False
    return True


# -- statistics ------------------------------------------------------------

class Stats(NamedTuple):
    trace_count: int
    event_count: int
    variant_count: int
    distinct_activities: int
    max_trace_length: int


class _Missing:
    __slots__ = ()

    def __repr__(self):
        return "<missing activity>"


MISSING_ACTIVITY = _Missing()


def _hashable(value: Value):
    kind = kind_of(value)
    if kind == "float":
        return kind, _float_bits(value)
    if kind == "date":
        return kind, _date_key(value)
    if kind == "list":
        return kind, tuple(_attr_hashable(a) for a in value.items)
    if kind == "container":
        return kind, tuple(_attr_hashable(a) for a in value.entries.values())
    return kind, value


def _attr_hashable(attr: Attribute):
    return (
        attr.key,
        _hashable(attr.value),
        tuple(_attr_hashable(c) for c in attr.children.values()),
    )


def activity_token(event: Event):
    """Hashable activity identity of an event (a placeholder when absent)."""
    attr = event.attributes.get(ACTIVITY_KEY)
    if attr is None:
        return MISSING_ACTIVITY
    if type(attr.value) is str:
        return attr.value
    return _hashable(attr.value)


def log_statistics(log: EventLog) -> Stats:
    """Trace/event/variant/activity counts and the longest trace length."""
    variants = set()
    activities = set()
    events = 0
    longest = 0
    for trace in log.traces:
        seq = tuple(activity_token(e) for e in trace.events)
        variants.add(seq)
        activities.update(seq)
        events += len(seq)
        longest = max(longest, len(seq))
    return Stats(len(log.traces), events, len(variants), len(activities), longest)
