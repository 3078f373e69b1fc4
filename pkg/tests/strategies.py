"""Hypothesis strategies for event logs that every format can carry.

Restrictions keep the generated logs inside what both JXES and XES express:
no surrogates or XML-illegal characters, no date-shaped strings, no reserved
keys inside containers, and no children on container-valued attributes.
"""

from __future__ import annotations

import string
from datetime import datetime, timedelta, timezone

from hypothesis import strategies as st

from jxeskit.model import (
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
    parse_date,
)

XML_CHARS = st.characters(
    blacklist_categories=("Cs",),
    blacklist_characters="".join(chr(c) for c in range(32) if c not in (9, 10, 13)) + "￾￿",
)

keys = st.text(XML_CHARS, max_size=8)
plain_text = st.text(XML_CHARS, max_size=16).filter(lambda s: parse_date(s) is None)
offsets = st.integers(-23 * 60 - 59, 23 * 60 + 59).map(lambda m: timezone(timedelta(minutes=m)))

dates = st.builds(
    lambda dt, ms, tz: dt.replace(microsecond=ms * 1000, tzinfo=tz),
    st.datetimes(datetime(1, 1, 2), datetime(9999, 12, 30)),
    st.integers(0, 999),
    offsets,
)

scalars = st.one_of(
    plain_text,
    dates,
    st.integers(INT_MIN, INT_MAX),
    st.floats(allow_nan=False, allow_infinity=False),
    st.booleans(),
)


def _unique(attrs):
    out = {}
    for a in attrs:
        out.setdefault(a.key, a)
    return out


def attributes(depth: int = 2):
    """A single attribute; composites and children shrink with ``depth``."""
    if depth <= 0:
        return st.builds(Attribute, keys, scalars)
    inner = attributes(depth - 1)
    lists = st.lists(inner, max_size=3).map(lambda xs: AttrList(tuple(xs)))
    containers = st.lists(
        inner.filter(lambda a: a.key not in ("value", "nested-attrs")), max_size=3
    ).map(lambda xs: Container(_unique(xs)))
    children = st.lists(inner, max_size=2).map(_unique)
    return st.one_of(
        st.builds(Attribute, keys, scalars),
        st.builds(Attribute, keys, scalars, children),
        st.builds(Attribute, keys, lists),
        st.builds(Attribute, keys, lists, children),
        st.builds(Attribute, keys, containers),
    )


def attr_maps(max_size: int = 4, depth: int = 2):
    return st.lists(attributes(depth), max_size=max_size).map(_unique)


classifier_keys = st.text(
    string.ascii_letters + string.digits + ":_-.", min_size=1, max_size=10
)
uris = st.from_regex(r"\Ahttps?://[a-z]{1,8}\.org/[a-z]{0,8}\.xesext\Z")
extensions = st.builds(
    Extension,
    st.text(XML_CHARS, min_size=1, max_size=8),
    st.text(string.ascii_lowercase, min_size=1, max_size=8),
    uris,
)

events = st.builds(Event, attr_maps(5))
traces = st.builds(Trace, attr_maps(3), st.lists(events, max_size=4).map(tuple))

logs = st.builds(
    EventLog,
    attr_maps(3),
    st.builds(GlobalAttributes, attr_maps(2, 0), attr_maps(2, 0)),
    st.dictionaries(
        st.text(XML_CHARS, max_size=8),
        st.lists(classifier_keys, min_size=1, max_size=3).map(tuple),
        max_size=2,
    ),
    st.lists(extensions, max_size=2).map(tuple),
    st.lists(traces, max_size=4).map(tuple),
)
