from __future__ import annotations

import struct
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jxeskit.model import (
    Attribute,
    AttrList,
    Container,
    Event,
    EventLog,
    Extension,
    Trace,
    format_date,
    kind_of,
    log_statistics,
    logs_equivalent,
    make_attrs,
    parse_date,
)
from jxeskit import canonicalize, parse_jxes, parse_xes, write_xes
from oracles import brute_stats
from strategies import logs


def ev(*activities, **extra):
    out = []
    for a in activities:
        attrs = {"concept:name": Attribute("concept:name", a)} if a is not None else {}
        for k, v in extra.items():
            attrs[k] = Attribute(k, v)
        out.append(Event(attrs))
    return tuple(out)


def log_of(*seqs):
    return EventLog(traces=tuple(Trace(events=ev(*s)) for s in seqs))


def test_empty_log_statistics():
    assert tuple(log_statistics(EventLog())) == (0, 0, 0, 0, 0)


def test_statistics_count_variants_by_sequence():
    log = log_of(["a", "b"], ["a", "b"], ["b", "a"], ["a"], [])
    s = log_statistics(log)
    assert s.trace_count == 5
    assert s.event_count == 7
    assert s.variant_count == 4
    assert s.distinct_activities == 2
    assert s.max_trace_length == 2


def test_events_without_activity_share_one_token():
    log = log_of([None, "a"], [None, "a"], ["a", None])
    assert tuple(log_statistics(log)) == (3, 6, 2, 2, 2)


def test_activity_kinds_are_distinct():
    log = EventLog(traces=(
        Trace(events=(Event({"concept:name": Attribute("concept:name", 1)}),)),
        Trace(events=(Event({"concept:name": Attribute("concept:name", True)}),)),
        Trace(events=(Event({"concept:name": Attribute("concept:name", "1")}),)),
    ))
    assert log_statistics(log).distinct_activities == 3
    assert log_statistics(log).variant_count == 3


@given(st.lists(st.lists(st.sampled_from(["a", "b", "c", None]), max_size=6), max_size=12))
def test_statistics_match_brute_force(seqs):
    log = log_of(*seqs)
    assert tuple(log_statistics(log)) == brute_stats(log)


# -- equivalence ---------------------------------------------------------------

def test_equivalence_is_order_sensitive():
    a = log_of(["x"], ["y"])
    b = log_of(["y"], ["x"])
    assert not logs_equivalent(a, b)
    assert logs_equivalent(a, log_of(["x"], ["y"]))


def test_float_last_bit_matters():
    x = 0.1
    bumped = struct.unpack("<d", struct.pack("<q", struct.unpack("<q", struct.pack("<d", x))[0] + 1))[0]
    assert bumped != x and abs(bumped - x) < 1e-16
    a = EventLog(attributes={"f": Attribute("f", x)})
    b = EventLog(attributes={"f": Attribute("f", bumped)})
    assert not logs_equivalent(a, b)


def test_signed_zero_and_kinds():
    zero = EventLog(attributes={"f": Attribute("f", 0.0)})
    assert not logs_equivalent(zero, EventLog(attributes={"f": Attribute("f", -0.0)}))
    assert not logs_equivalent(zero, EventLog(attributes={"f": Attribute("f", 0)}))
    one = EventLog(attributes={"f": Attribute("f", 1)})
    assert not logs_equivalent(one, EventLog(attributes={"f": Attribute("f", True)}))


def test_dates_compare_by_instant_and_offset():
    t = datetime(2013, 10, 21, 13, 28, 6, 419000, tzinfo=timezone.utc)
    same = t.replace(microsecond=419999)
    shifted = t.astimezone(timezone(timedelta(hours=2)))
    mk = lambda d: EventLog(attributes={"d": Attribute("d", d)})
    assert logs_equivalent(mk(t), mk(same))
    assert not logs_equivalent(mk(t), mk(shifted))


def test_children_and_composites_compared():
    child = {"c": Attribute("c", 1)}
    a = EventLog(attributes={"p": Attribute("p", "x", child)})
    b = EventLog(attributes={"p": Attribute("p", "x")})
    assert not logs_equivalent(a, b)
    la = AttrList((Attribute("k", 1), Attribute("k", 2)))
    lb = AttrList((Attribute("k", 2), Attribute("k", 1)))
    assert not logs_equivalent(
        EventLog(attributes={"l": Attribute("l", la)}),
        EventLog(attributes={"l": Attribute("l", lb)}),
    )
    ca = Container.from_attrs([Attribute("a", 1), Attribute("b", 2)])
    cb = Container.from_attrs([Attribute("b", 2), Attribute("a", 1)])
    assert not logs_equivalent(
        EventLog(attributes={"c": Attribute("c", ca)}),
        EventLog(attributes={"c": Attribute("c", cb)}),
    )


@settings(max_examples=50)
@given(logs)
def test_equivalence_is_reflexive(log):
    assert logs_equivalent(log, log)


@settings(max_examples=50)
@given(logs, logs)
def test_equivalence_is_symmetric(a, b):
    assert logs_equivalent(a, b) == logs_equivalent(b, a)


@settings(max_examples=50)
@given(logs, logs)
def test_equivalence_is_transitive(a, b):
    # equal-by-value copies through two independent paths, plus an unrelated log
    via_json = parse_jxes(canonicalize(a))
    via_xml = parse_xes(write_xes(via_json))[0]
    assert logs_equivalent(a, via_json) and logs_equivalent(via_json, via_xml)
    assert logs_equivalent(a, via_xml)
    if logs_equivalent(a, b) and logs_equivalent(b, via_xml):
        assert logs_equivalent(a, via_xml)
    if logs_equivalent(a, via_json) and not logs_equivalent(a, b):
        assert not logs_equivalent(via_json, b)


@settings(max_examples=50)
@given(logs, logs)
def test_statistics_of_concatenation(a, b):
    joined = EventLog(traces=a.traces + b.traces)
    sa, sb, sj = log_statistics(a), log_statistics(b), log_statistics(joined)
    assert sj.trace_count == sa.trace_count + sb.trace_count
    assert sj.event_count == sa.event_count + sb.event_count
    assert sj.max_trace_length == max(sa.max_trace_length, sb.max_trace_length)
    assert max(sa.variant_count, sb.variant_count) <= sj.variant_count
    assert sj.variant_count <= sa.variant_count + sb.variant_count


# -- construction and dates ----------------------------------------------------

def test_duplicate_keys_rejected():
    with pytest.raises(ValueError):
        make_attrs([Attribute("a", 1), Attribute("a", 2)])
    with pytest.raises(ValueError):
        Container.from_attrs([Attribute("a", 1), Attribute("a", 2)])


def test_extension_and_classifier_checks():
    Extension("Concept", "concept", "http://www.xes-standard.org/concept.xesext")
    with pytest.raises(ValueError):
        Extension("", "concept", "http://x.org")
    with pytest.raises(ValueError):
        Extension("Concept", "concept", "not a uri")
    with pytest.raises(ValueError):
        EventLog(classifiers={"empty": ()})


@pytest.mark.parametrize(
    "text, expected",
    [
        ("2013-10-21T13:28:06.419Z", datetime(2013, 10, 21, 13, 28, 6, 419000, timezone.utc)),
        ("2013-10-21T13:28:06Z", datetime(2013, 10, 21, 13, 28, 6, 0, timezone.utc)),
        ("2013-10-21T13:28:06.419+02:00",
         datetime(2013, 10, 21, 13, 28, 6, 419000, timezone(timedelta(hours=2)))),
        ("2013-13-45T99:99:99Z", None),
        ("2013-02-29T00:00:00Z", None),
        ("2012-02-29T00:00:00Z", datetime(2012, 2, 29, tzinfo=timezone.utc)),
        ("2013-10-21 13:28:06Z", None),
        ("2013-10-21T13:28:06", None),
        ("2013-10-21T13:28:06.4Z", None),
        ("hi", None),
    ],
)
def test_parse_date(text, expected):
    assert parse_date(text) == expected


def test_format_date_always_has_millis():
    assert format_date(datetime(2013, 10, 21, 13, 28, 6, tzinfo=timezone.utc)) == "2013-10-21T13:28:06.000Z"
    tz = timezone(-timedelta(hours=5, minutes=30))
    assert format_date(datetime(2020, 1, 2, 3, 4, 5, 6000, tz)) == "2020-01-02T03:04:05.006-05:30"


@given(st.datetimes(datetime(1, 1, 2), datetime(9999, 12, 30)), st.integers(-1439, 1439))
def test_format_then_parse_is_identity_to_the_millisecond(dt, minutes):
    dt = dt.replace(microsecond=dt.microsecond // 1000 * 1000,
                    tzinfo=timezone(timedelta(minutes=minutes)))
    back = parse_date(format_date(dt))
    assert back == dt and back.utcoffset() == dt.utcoffset()


def test_kind_of():
    assert [kind_of(v) for v in ("s", 1, 1.0, True, AttrList(), Container())] == [
        "string", "int", "float", "boolean", "list", "container"]
    assert kind_of(datetime.now(timezone.utc)) == "date"
