"""Deterministic synthetic event logs.

Randomness comes from :class:`random.Random` (MT19937), using only
``random()`` and ``getrandbits()``, whose outputs CPython keeps stable
across versions and platforms. Every trace gets its own generator seeded
from ``blake2b(f"{seed}:{index}")``, so the first ``n`` traces of a log do
not depend on how many traces were requested in total.

Trace lengths follow a geometric law truncated to ``[1, max_trace_length]``
whose ratio is solved so that the truncated mean equals
``mean_events_per_trace``.
"""

from __future__ import annotations

import bisect
import hashlib
import json
import math
import random
import struct
from dataclasses import asdict, dataclass, field, replace
from datetime import datetime, timedelta, timezone
from pathlib import Path

from .errors import InvalidProfile
from .model import (
    ACTIVITY_KEY,
    TIMESTAMP_KEY,
    Attribute,
    AttrList,
    Container,
    Event,
    EventLog,
    Extension,
    GlobalAttributes,
    Trace,
)

__all__ = ["GenProfile", "generate", "PRESETS", "preset", "trace_length_weights"]

KINDS = ("string", "date", "int", "float", "boolean", "list", "container")
LIFECYCLE_KEY = "lifecycle:transition"

STANDARD_EXTENSIONS = (
    Extension("Concept", "concept", "http://www.xes-standard.org/concept.xesext"),
    Extension("Time", "time", "http://www.xes-standard.org/time.xesext"),
    Extension("Lifecycle", "lifecycle", "http://www.xes-standard.org/lifecycle.xesext"),
)
CLASSIFIERS = {"Activity classifier": (ACTIVITY_KEY, LIFECYCLE_KEY)}

# string material: markup characters, whitespace XML must escape, non-ASCII
_TEXT_CHARS = "abcdefghijklmnopqrstuvwxyz ABCXYZ0123456789_-.:<>&\"'/\\\n\téß漢字\U0001F642"
_EPOCH = datetime(2000, 1, 1, tzinfo=timezone.utc)
_SPAN_MS = 30 * 365 * 24 * 3600 * 1000
_OFFSETS = (0, 0, 60, 120, -300, 330, 345, -720, 840)


@dataclass(frozen=True)
class GenProfile:
    seed: int = 0
    traces: int = 10
    mean_events_per_trace: float = 5.0
    max_trace_length: int = 20
    distinct_activities: int = 5
    attr_mix: dict = field(default_factory=lambda: {k: 1 / len(KINDS) for k in KINDS})
    nesting_prob: float = 0.0
    trace_globals: int = 0
    event_globals: int = 0
    extra_event_attrs: int = 0
    extra_trace_attrs: int = 0
    log_attrs: int = 0

    def validate(self) -> GenProfile:
        ints = ("traces", "max_trace_length", "distinct_activities", "trace_globals",
                "event_globals", "extra_event_attrs", "extra_trace_attrs", "log_attrs")
        for name in ints:
            v = getattr(self, name)
            if not isinstance(v, int) or isinstance(v, bool) or v < 0:
                raise InvalidProfile(f"{name} must be a non-negative integer, got {v!r}")
        if not isinstance(self.seed, int) or not -(2**63) <= self.seed < 2**64:
            raise InvalidProfile("seed must be a 64-bit integer")
        if self.traces:
            if self.max_trace_length < 1 or self.distinct_activities < 1:
                raise InvalidProfile("max_trace_length and distinct_activities must be >= 1")
            if not 1 <= self.mean_events_per_trace <= self.max_trace_length:
                raise InvalidProfile("mean_events_per_trace must lie in [1, max_trace_length]")
        if not 0 <= self.nesting_prob <= 1:
            raise InvalidProfile("nesting_prob must lie in [0, 1]")
        unknown = set(self.attr_mix) - set(KINDS)
        if unknown:
            raise InvalidProfile(f"unknown value kinds {sorted(unknown)}")
        weights = [self.attr_mix.get(k, 0.0) for k in KINDS]
        if any(w < 0 for w in weights) or abs(math.fsum(weights) - 1) > 1e-9:
            raise InvalidProfile("attr_mix proportions must be >= 0 and sum to 1")
        return self

    @classmethod
    def from_dict(cls, d: dict) -> GenProfile:
        d = dict(d)
        base = preset(d.pop("preset")) if "preset" in d else cls()
        names = {f for f in cls.__dataclass_fields__}
        unknown = set(d) - names
        if unknown:
            raise InvalidProfile(f"unknown profile fields {sorted(unknown)}")
        return replace(base, **d).validate()

    @classmethod
    def from_json(cls, path) -> GenProfile:
        return cls.from_dict(json.loads(Path(path).read_text()))

    def to_dict(self) -> dict:
        return asdict(self)


# Trace count, mean and max trace length, and activity alphabet of two public logs.
PRESETS = {
    "level-d2": GenProfile(
        traces=1104, mean_events_per_trace=11855 / 1104, max_trace_length=24,
        distinct_activities=8, extra_event_attrs=2, event_globals=1,
        attr_mix={"string": 0.5, "date": 0.1, "int": 0.1, "float": 0.2, "boolean": 0.1},
    ),
    "bpic15-5": GenProfile(
        traces=1156, mean_events_per_trace=59083 / 1156, max_trace_length=154,
        distinct_activities=389, extra_event_attrs=4, extra_trace_attrs=3,
        event_globals=1, trace_globals=1,
        attr_mix={"string": 0.6, "date": 0.1, "int": 0.1, "float": 0.1, "boolean": 0.1},
    ),
}


def preset(name: str, **overrides) -> GenProfile:
    try:
        base = PRESETS[name]
    except KeyError:
        raise InvalidProfile(f"unknown preset {name!r}; choose from {sorted(PRESETS)}") from None
    return replace(base, **overrides).validate()


# -- trace lengths -------------------------------------------------------------

def _truncated_mean(ratio: float, m: int) -> float:
    w = [ratio ** (k - 1) for k in range(1, m + 1)] if ratio <= 1 else [
        ratio ** (k - m) for k in range(1, m + 1)
    ]
    return math.fsum(k * x for k, x in zip(range(1, m + 1), w)) / math.fsum(w)


def trace_length_weights(mean: float, m: int) -> list[float]:
    """Probabilities of lengths ``1..m`` under the truncated geometric law with ``mean``."""
    if m == 1:
        return [1.0]
    lo, hi = -60.0, 60.0  # search over log(ratio)
    for _ in range(200):
        mid = (lo + hi) / 2
        if _truncated_mean(math.exp(mid), m) < mean:
            lo = mid
        else:
            hi = mid
    ratio = math.exp((lo + hi) / 2)
    w = [ratio ** (k - 1) for k in range(1, m + 1)] if ratio <= 1 else [
        ratio ** (k - m) for k in range(1, m + 1)
    ]
    total = math.fsum(w)
    return [x / total for x in w]


# -- values --------------------------------------------------------------------

class _Gen:
    def __init__(self, profile: GenProfile, rng: random.Random):
        self.p = profile
        self.rng = rng
        weights = [profile.attr_mix.get(k, 0.0) for k in KINDS]
        self.kind_cdf = _cdf(weights)

    def below(self, n: int) -> int:
        return min(int(self.rng.random() * n), n - 1)

    def kind(self, depth: int = 0) -> str:
        k = KINDS[bisect.bisect_right(self.kind_cdf, self.rng.random() * self.kind_cdf[-1])]
        if depth >= 2 and k in ("list", "container"):
            return "string"
        return k

    def text(self, lo: int = 0, hi: int = 12) -> str:
        n = lo + self.below(hi - lo + 1)
        return "".join(_TEXT_CHARS[self.below(len(_TEXT_CHARS))] for _ in range(n))

    def date(self) -> datetime:
        ms = self.below(_SPAN_MS)
        off = _OFFSETS[self.below(len(_OFFSETS))]
        tz = timezone(timedelta(minutes=off)) if off else timezone.utc
        return (_EPOCH + timedelta(milliseconds=ms)).astimezone(tz)

    def int_(self) -> int:
        r = self.rng.random()
        if r < 0.6:
            return self.below(2001) - 1000
        if r < 0.8:
            return (-(2**63), 2**63 - 1, 0, -1)[self.below(4)]
        return self.rng.getrandbits(64) - 2**63

    def float_(self) -> float:
        r = self.rng.random()
        if r < 0.5:
            return round(self.rng.random() * 1000, 2)
        if r < 0.6:
            return (0.0, -0.0, 1.0, 5e-324, 1.7976931348623157e308)[self.below(5)]
        while True:
            x = struct.unpack("<d", struct.pack("<Q", self.rng.getrandbits(64)))[0]
            if math.isfinite(x):
                return x

    def value(self, kind: str, depth: int):
        if kind == "string":
            return self.text()
        if kind == "date":
            return self.date()
        if kind == "int":
            return self.int_()
        if kind == "float":
            return self.float_()
        if kind == "boolean":
            return self.rng.random() < 0.5
        if kind == "list":
            # few distinct keys so repeated keys are common
            return AttrList(tuple(
                self.attribute(("item", "key", "kéy")[self.below(3)], depth + 1)
                for _ in range(self.below(4))
            ))
        entries = {}
        for i in range(self.below(4)):
            key = f"entry {i}"
            entries[key] = self.attribute(key, depth + 1)
        return Container(entries)

    def attribute(self, key: str, depth: int = 0, kind: str | None = None) -> Attribute:
        kind = kind or self.kind(depth)
        value = self.value(kind, depth)
        children = {}
        # XES cannot give a container its own nested attributes
        if kind != "container" and depth < 2 and self.rng.random() < self.p.nesting_prob:
            for i in range(1 + self.below(2)):
                children[f"meta {i}"] = self.attribute(f"meta {i}", depth + 1)
        return Attribute(key, value, children) if children else Attribute(key, value)


def _cdf(weights):
    out, acc = [], 0.0
    for w in weights:
        acc += w
        out.append(acc)
    return out


def _rng(seed: int, label) -> random.Random:
    digest = hashlib.blake2b(f"{seed}:{label}".encode(), digest_size=8).digest()
    return random.Random(int.from_bytes(digest, "big"))


def _activity_names(n: int) -> list[str]:
    return [f"Activity {i + 1}" for i in range(n)]


def generate(profile: GenProfile) -> EventLog:
    """Build the log described by ``profile``; same profile, same log."""
    p = profile.validate()
    if p.traces == 0:
        return EventLog()
    head = _Gen(p, _rng(p.seed, "log"))
    trace_global_keys = [ACTIVITY_KEY] + [f"global:trace {i}" for i in range(p.trace_globals)]
    event_global_keys = [ACTIVITY_KEY, TIMESTAMP_KEY, LIFECYCLE_KEY] + [
        f"global:event {i}" for i in range(p.event_globals)
    ]
    trace_global_kinds = {k: head.kind(2) for k in trace_global_keys[1:]}
    event_global_kinds = {k: head.kind(2) for k in event_global_keys[3:]}
    defaults = {ACTIVITY_KEY: "__INVALID__", TIMESTAMP_KEY: _EPOCH, LIFECYCLE_KEY: "complete"}
    globals_ = GlobalAttributes(
        trace={
            k: Attribute(k, defaults[k] if k in defaults else head.value(trace_global_kinds[k], 2))
            for k in trace_global_keys
        },
        event={
            k: Attribute(k, defaults[k] if k in defaults else head.value(event_global_kinds[k], 2))
            for k in event_global_keys
        },
    )
    log_attrs = {ACTIVITY_KEY: Attribute(ACTIVITY_KEY, f"synthetic log {p.seed}")}
    for i in range(p.log_attrs):
        key = f"log attr {i}"
        log_attrs[key] = head.attribute(key)

    length_cdf = _cdf(trace_length_weights(p.mean_events_per_trace, p.max_trace_length))
    activities = _activity_names(p.distinct_activities)
    traces = []
    for t in range(p.traces):
        g = _Gen(p, _rng(p.seed, t))
        tattrs = {ACTIVITY_KEY: Attribute(ACTIVITY_KEY, f"case {t}")}
        for k, kind in trace_global_kinds.items():
            tattrs[k] = g.attribute(k, kind=kind)
        for i in range(p.extra_trace_attrs):
            key = f"trace attr {i}"
            tattrs[key] = g.attribute(key)
        n = 1 + bisect.bisect_right(length_cdf, g.rng.random() * length_cdf[-1])
        n = min(n, p.max_trace_length)
        clock = g.date().astimezone(timezone.utc)
        events = []
        for _ in range(n):
            clock += timedelta(milliseconds=g.below(6 * 3600 * 1000))
            eattrs = {
                ACTIVITY_KEY: Attribute(ACTIVITY_KEY, activities[g.below(len(activities))]),
                TIMESTAMP_KEY: Attribute(TIMESTAMP_KEY, clock),
                LIFECYCLE_KEY: Attribute(
                    LIFECYCLE_KEY, "complete" if g.rng.random() < 0.8 else "start"
                ),
            }
            for k, kind in event_global_kinds.items():
                eattrs[k] = g.attribute(k, kind=kind)
            for i in range(p.extra_event_attrs):
                key = f"attr {i}"
                eattrs[key] = g.attribute(key)
            events.append(Event(eattrs))
        traces.append(Trace(tattrs, tuple(events)))

    return EventLog(
        attributes=log_attrs,
        globals=globals_,
        classifiers=dict(CLASSIFIERS),
        extensions=STANDARD_EXTENSIONS,
        traces=tuple(traces),
    )
