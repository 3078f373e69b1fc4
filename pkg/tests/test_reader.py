from __future__ import annotations

import gc
import gzip
import io
import logging
import time
import tracemalloc
from datetime import datetime, timedelta, timezone

import pytest
from hypothesis import given, settings

from jxeskit import BackendKind, ParseOptions, generate, parse_jxes, read_jxes
from jxeskit import _json
from jxeskit.errors import (
    DuplicateKey,
    IntOutOfRange,
    MalformedJson,
    ReservedKeyMisuse,
    SchemaViolation,
    UnknownKey,
)
from jxeskit.loggen import preset
from jxeskit.model import Attribute, AttrList, Container, logs_equivalent
from jxeskit.reader import infer_value, interpret_container
from jxeskit.writer import canonicalize, write_jxes
from strategies import logs

BACKENDS = [BackendKind.TREE, BackendKind.STREAMING]


def parse(text, backend=BackendKind.TREE, strict=False):
    data = text.encode() if isinstance(text, str) else text
    return parse_jxes(data, ParseOptions(backend, strict))


def strptime_oracle(text):
    """Whether the stdlib considers ``text`` a calendar instant (Z form only)."""
    for fmt in ("%Y-%m-%dT%H:%M:%S.%fZ", "%Y-%m-%dT%H:%M:%SZ"):
        try:
            time.strptime(text, fmt)
            return True
        except ValueError:
            pass
    return False


@pytest.mark.parametrize(
    "jv, expected",
    [
        ("hi", "hi"),
        ("2013-10-21T13:28:06.419Z", datetime(2013, 10, 21, 13, 28, 6, 419000, timezone.utc)),
        ("2013-10-21T15:28:06.419+02:00",
         datetime(2013, 10, 21, 15, 28, 6, 419000, timezone(timedelta(hours=2)))),
        ("2013-13-45T99:99:99Z", "2013-13-45T99:99:99Z"),
        ("19", "19"),
        (1, 1),
        (1.0, 1.0),
        (True, True),
        (2**63 - 1, 2**63 - 1),
        (-(2**63), -(2**63)),
        (2**64, 2.0**64),
    ],
)
def test_infer_value(jv, expected):
    got = infer_value(jv)
    assert got == expected and type(got) is type(expected)


@pytest.mark.parametrize(
    "text", ["2013-13-45T99:99:99Z", "2013-02-30T00:00:00Z", "2013-10-21T13:28:06.419Z",
             "2013-10-21T24:00:00Z", "2016-02-29T23:59:59.999Z"],
)
def test_date_inference_agrees_with_strptime(text):
    assert isinstance(infer_value(text), datetime) == strptime_oracle(text)


def test_int_out_of_range():
    with pytest.raises(IntOutOfRange):
        infer_value(2**63 + 1)
    with pytest.raises(IntOutOfRange) as exc:
        parse('{"attrs": {"big": 9223372036854775809}}')
    assert exc.value.path == "$.attrs.big"


def test_list_and_container():
    got = infer_value([{"key": 1}, {"key": 2}, {"new key": "new value"}])
    assert got == AttrList((Attribute("key", 1), Attribute("key", 2), Attribute("new key", "new value")))
    c = infer_value({"key": 1, "key-2": "value 2"})
    assert isinstance(c, Container) and list(c.entries) == ["key", "key-2"]


def test_multi_pair_list_elements_flatten_in_order():
    got = infer_value([{"a": 1, "b": 2}, {}, {"a": 3}])
    assert [(a.key, a.value) for a in got.items] == [("a", 1), ("b", 2), ("a", 3)]


def test_nested_attribute_and_defaults():
    a = interpret_container({"value": 1, "nested-attrs": {"x": "y"}}, "p")
    assert a.value == 1 and a.children["x"].value == "y"
    assert interpret_container({"nested-attrs": {"x": 1}}, "p").value == ""
    assert interpret_container({"value": True}, "p").children == {}


@pytest.mark.parametrize(
    "doc, exc, path",
    [
        ('{"traces": [{"attrs": {"p": {"value": 1, "other": 2}}}]}', ReservedKeyMisuse,
         "$.traces[0].attrs.p"),
        ('{"attrs": {"p": {"value": {"value": 1}}}}', ReservedKeyMisuse, "$.attrs.p.value"),
        ('{"attrs": {"p": {"value": 1, "nested-attrs": 3}}}', ReservedKeyMisuse,
         "$.attrs.p['nested-attrs']"),
        ('{"attrs": {"l": [1]}}', SchemaViolation, "$.attrs.l[0]"),
        ('{"attrs": {"n": null}}', SchemaViolation, "$.attrs.n"),
        ('{"attrs": {"n": 1e999}}', SchemaViolation, "$.attrs.n"),
        ('{"global-attrs": {"log": {}}}', SchemaViolation, "$['global-attrs'].log"),
        ('{"classifiers": {"c": []}}', SchemaViolation, "$.classifiers.c"),
        ('{"classifiers": {"c": "concept:name"}}', SchemaViolation, "$.classifiers.c"),
        ('{"extensions": [{"name": "x", "prefix": "p"}]}', SchemaViolation, "$.extensions[0]"),
        ('{"extensions": [{"name": "x", "prefix": "p", "uri": "no uri"}]}', SchemaViolation,
         "$.extensions[0].uri"),
        ('{"traces": {}}', SchemaViolation, "$.traces"),
        ('{"traces": [{"events": [1]}]}', SchemaViolation, "$.traces[0].events[0]"),
        ("[]", SchemaViolation, "$"),
    ],
)
@pytest.mark.parametrize("backend", BACKENDS)
def test_schema_errors(doc, exc, path, backend):
    with pytest.raises(exc) as info:
        parse(doc, backend)
    assert info.value.path == path


@pytest.mark.parametrize("backend", BACKENDS)
def test_malformed(backend):
    with pytest.raises(MalformedJson):
        parse('{"traces": [', backend)


@pytest.mark.parametrize("backend", BACKENDS)
def test_unknown_and_duplicate_keys(backend, caplog):
    doc = '{"version": 2, "attrs": {"a": 1, "a": 2}, "traces": [{"id": 1}]}'
    with caplog.at_level(logging.WARNING, logger="jxeskit"):
        log = parse(doc, backend)
    assert log.attributes["a"].value == 2
    text = caplog.text
    assert "version" in text and "'id'" in text and "duplicate" in text
    with pytest.raises(UnknownKey):
        parse('{"version": 2}', backend, strict=True)
    with pytest.raises(DuplicateKey):
        parse('{"attrs": {"a": 1, "a": 2}}', backend, strict=True)


@pytest.mark.parametrize("backend", BACKENDS)
def test_empty_document(backend):
    log = parse("{}", backend)
    assert log.traces == () and log.attributes == {}


@pytest.mark.parametrize("backend", BACKENDS)
def test_gzip_and_paths(tmp_path, backend):
    doc = b'{"traces": [{"events": [{"concept:name": "a"}]}]}'
    plain = tmp_path / "x.json"
    packed = tmp_path / "x.json.gz"
    plain.write_bytes(doc)
    packed.write_bytes(gzip.compress(doc))
    a = read_jxes(plain, backend)
    b = read_jxes(packed, backend)
    c = parse_jxes(io.BytesIO(gzip.compress(doc)), ParseOptions(backend))
    assert logs_equivalent(a, b) and logs_equivalent(a, c)
    assert a.traces[0].events[0].get("concept:name") == "a"


@settings(max_examples=150)
@given(logs)
def test_backends_agree_on_generated_documents(log):
    data = write_jxes(log)
    tree = parse(data, BackendKind.TREE)
    stream = parse(data, BackendKind.STREAMING)
    assert logs_equivalent(tree, stream)
    assert logs_equivalent(tree, log)


def test_streaming_overhead_does_not_grow_with_the_log(monkeypatch):
    # peak above what the finished model retains; the intern table is capped
    # low so that only parser buffering is measured
    monkeypatch.setattr(_json, "_INTERN_MAX_ENTRIES", 256)
    overheads = []
    for n in (200, 800, 2400):
        data = canonicalize(generate(preset("level-d2", traces=n)))
        gc.collect()
        tracemalloc.start()
        try:
            base = tracemalloc.get_traced_memory()[0]
            log = parse_jxes(io.BytesIO(data), ParseOptions(BackendKind.STREAMING))
            current, peak = tracemalloc.get_traced_memory()
        finally:
            tracemalloc.stop()
        assert len(log.traces) == n
        overheads.append(peak - current)
    assert max(overheads) < 2_000_000
    assert max(overheads) - min(overheads) < 500_000
