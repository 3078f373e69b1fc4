"""End-to-end acceptance run, one test per criterion.

Each test prints a ``criterion N PASS|FAIL`` line; the lines are repeated in
the pytest terminal summary. Run alone with ``pytest tests/test_acceptance.py``.
"""

from __future__ import annotations

import csv
import io
import random
import time

import pytest

from jxeskit import BackendKind, GenProfile, ParseOptions, generate, parse_jxes, parse_xes, write_xes
from jxeskit.bench import BenchCase, Direction, render_tables, run_bench
from jxeskit.errors import JxesError
from jxeskit.formats import Format, save_log
from jxeskit.loggen import KINDS, preset
from jxeskit.model import kind_of, log_statistics, logs_equivalent
from jxeskit.validator import has_errors, validate_document
from jxeskit.writer import canonicalize, write_jxes
from invalid_docs import INVALID
from listing_checks import CHECKS, DATA
from oracles import brute_stats

CORPUS_SIZE = 200


def corpus_profile(i: int) -> GenProfile:
    rng = random.Random(i)
    weights = [rng.random() + 0.05 for _ in KINDS]
    total = sum(weights)
    mix = {k: w / total for k, w in zip(KINDS, weights)}
    mix[KINDS[-1]] = 1 - sum(mix[k] for k in KINDS[:-1])
    return GenProfile(
        seed=1000 + i,
        traces=rng.randint(1, 6),
        mean_events_per_trace=rng.uniform(1, 4),
        max_trace_length=8,
        distinct_activities=rng.randint(1, 6),
        attr_mix=mix,
        nesting_prob=rng.choice([0.0, 0.2, 0.5]),
        trace_globals=rng.randint(0, 2),
        event_globals=rng.randint(0, 2),
        extra_event_attrs=rng.randint(1, 4),
        extra_trace_attrs=rng.randint(0, 2),
        log_attrs=rng.randint(0, 3),
    )


@pytest.fixture(scope="module")
def corpus():
    return [generate(corpus_profile(i)) for i in range(CORPUS_SIZE)]


def _kinds(attrs, seen, nested):
    for a in attrs.values():
        seen.add(kind_of(a.value))
        if a.children:
            nested.append(1)
            _kinds(a.children, seen, nested)
        if kind_of(a.value) == "list":
            for item in a.value.items:
                _kinds({item.key: item}, seen, nested)
        elif kind_of(a.value) == "container":
            _kinds(a.value.entries, seen, nested)


def _coverage(corpus):
    seen, nested = set(), []
    for log in corpus:
        _kinds(log.attributes, seen, nested)
        for t in log.traces:
            _kinds(t.attributes, seen, nested)
            for e in t.events:
                _kinds(e.attributes, seen, nested)
    return seen, bool(nested)


def test_criterion_1_round_trip(corpus, verdict):
    t0 = time.perf_counter()
    failures = []
    for i, log in enumerate(corpus):
        backend = BackendKind.TREE if i % 2 else BackendKind.STREAMING
        opts = ParseOptions(backend)
        # XES -> JXES -> XES
        from_xes, meta = parse_xes(write_xes(log))
        via_jxes = parse_jxes(write_jxes(from_xes, backend=backend), opts)
        back_xes, _ = parse_xes(write_xes(via_jxes, meta))
        # JXES -> XES -> JXES
        from_jxes = parse_jxes(canonicalize(log), opts)
        via_xes, _ = parse_xes(write_xes(from_jxes))
        back_jxes = parse_jxes(write_jxes(via_xes, backend=backend), opts)
        if not all(logs_equivalent(log, x) for x in (from_xes, via_jxes, back_xes, from_jxes,
                                                     via_xes, back_jxes)):
            failures.append(i)
    elapsed = time.perf_counter() - t0
    kinds, nested = _coverage(corpus)
    has_meta = all(log.classifiers and log.extensions and log.globals.event for log in corpus)
    ok = not failures and kinds == set(KINDS) and nested and has_meta and elapsed < 60
    verdict(1, "round-trip fidelity", ok,
            f"{len(corpus)} logs, {len(failures)} failures, kinds {len(kinds)}/7, "
            f"nesting {nested}, metadata {has_meta}, {elapsed:.1f}s")
    assert ok, failures[:10]


def test_criterion_2_backend_equivalence(corpus, verdict):
    failures = []
    for i, log in enumerate(corpus):
        data = canonicalize(log)
        tree = parse_jxes(data, ParseOptions(BackendKind.TREE))
        stream = parse_jxes(data, ParseOptions(BackendKind.STREAMING))
        same_model = logs_equivalent(tree, stream)
        same_bytes = write_jxes(tree, backend=BackendKind.TREE) == write_jxes(
            stream, backend=BackendKind.STREAMING) == data
        if not (same_model and same_bytes):
            failures.append(i)
    ok = not failures
    verdict(2, "backend equivalence", ok, f"{len(corpus)} documents, {len(failures)} failures")
    assert ok, failures[:10]


def test_criterion_3_size(tmp_path, verdict):
    rows = []
    ok = True
    for name in ("level-d2", "bpic15-5"):
        log = generate(preset(name))
        sizes = {fmt: save_log(log, tmp_path / f"{name}{fmt.suffix}", fmt) for fmt in Format}
        assert sizes[Format.JXES] == len(canonicalize(log))
        reduction = 1 - sizes[Format.JXES] / sizes[Format.XES]
        row_ok = (reduction >= 0.20 and sizes[Format.JXES_GZ] < sizes[Format.JXES]
                  and sizes[Format.XES_GZ] < sizes[Format.XES])
        ok &= row_ok
        rows.append(f"{name}: JXES {sizes[Format.JXES] / 1e6:.2f} MB vs XES "
                    f"{sizes[Format.XES] / 1e6:.2f} MB ({reduction:.0%} smaller), gz "
                    f"{sizes[Format.JXES_GZ] / 1e6:.2f}/{sizes[Format.XES_GZ] / 1e6:.2f} MB")
    verdict(3, "size claim", ok, "; ".join(rows))
    assert ok


def test_criterion_4_listing_conformance(verdict):
    diffs = {name: check() for name, check in CHECKS.items()}
    bad = {k: v for k, v in diffs.items() if v}
    ok = not bad
    verdict(4, "listing conformance", ok, f"{len(diffs)} listings, {sum(map(len, bad.values()))} diffs")
    assert ok, bad


def _tables_well_formed(report) -> bool:
    rows = list(csv.DictReader(io.StringIO(render_tables(report, "csv").decode())))
    groups = {}
    for r in rows:
        groups.setdefault((r["metric"], r["direction"], r["input"]), []).append(r)
    for cells in groups.values():
        flags = sum(c["best"] == "1" for c in cells)
        has_value = any(c["value"] != "ERROR" for c in cells)
        if flags != (1 if has_value else 0):
            return False
    md = render_tables(report, "md").decode()
    widths = {line.count("|") for block in md.split("### ")[1:] for line in block.splitlines()
              if line.startswith("|")}
    return bool(rows) and md.count("### ") == 5 and all(w >= 3 for w in widths)


def test_criterion_5_benchmark(tmp_path, verdict):
    t0 = time.perf_counter()
    d2 = tmp_path / "level-d2.json"
    save_log(generate(preset("level-d2")), d2)
    targets = [(Format.JXES, BackendKind.TREE), (Format.JXES, BackendKind.STREAMING),
               (Format.XES, None), (Format.XES_GZ, None)]
    cases = [BenchCase(str(d2), fmt, direction, backend, 3)
             for direction in (Direction.IMPORT, Direction.EXPORT) for fmt, backend in targets]
    cases.append(BenchCase(str(tmp_path / "absent.json"), Format.JXES, Direction.IMPORT, runs=3))
    report = run_bench(cases, workdir=tmp_path)
    real, broken = report.results[:-1], report.results[-1]
    all_ran = all(r.ok and len(r.times_ms) == 3 for r in real)
    failure_kept = not broken.ok and broken.error is not None
    tables_ok = _tables_well_formed(report)

    big = tmp_path / "big.json"
    big_log = generate(preset("level-d2", traces=9400))
    events = log_statistics(big_log).event_count
    save_log(big_log, big)
    del big_log
    mem = run_bench([BenchCase(str(big), Format.JXES, Direction.IMPORT, b, 1)
                     for b in (BackendKind.TREE, BackendKind.STREAMING)], workdir=tmp_path)
    tree_peak, stream_peak = (r.peak_memory_bytes for r in mem.results)
    ratio = stream_peak / tree_peak
    elapsed = time.perf_counter() - t0
    ok = all_ran and failure_kept and tables_ok and ratio <= 0.7 and elapsed < 300
    verdict(5, "benchmark methodology", ok,
            f"{len(real)} cases ok {all_ran}, failing case recorded {failure_kept}, "
            f"tables {tables_ok}, streaming/tree peak on {events} events "
            f"{stream_peak / 1e6:.1f}/{tree_peak / 1e6:.1f} MB = {ratio:.2f}, {elapsed:.0f}s")
    assert all_ran and failure_kept and tables_ok
    assert 90_000 <= events <= 110_000
    assert ratio <= 0.7
    assert elapsed < 300


def _reader_errors(data: bytes) -> bool:
    outcomes = set()
    for backend in BackendKind:
        try:
            parse_jxes(data, ParseOptions(backend))
            outcomes.add(False)
        except JxesError:
            outcomes.add(True)
    assert len(outcomes) == 1, "backends disagree"
    return outcomes.pop()


def test_criterion_6_validator_agreement(corpus, verdict):
    docs = [canonicalize(log) for log in corpus] + [doc.encode() for doc, _ in INVALID]
    disagreements = [i for i, d in enumerate(docs) if has_errors(validate_document(d)) != _reader_errors(d)]
    invalid_caught = all(_reader_errors(doc.encode()) for doc, _ in INVALID)
    ok = not disagreements and invalid_caught
    verdict(6, "validator/reader agreement", ok,
            f"{len(corpus)} valid + {len(INVALID)} invalid documents, {len(disagreements)} disagreements")
    assert ok, disagreements


def test_criterion_7_statistics(verdict):
    listing = parse_jxes(DATA / "basic_structure.json")
    listing_ok = tuple(log_statistics(listing)) == (1, 2, 1, 2, 2)
    mismatches = []
    for i in range(50):
        rng = random.Random(7000 + i)
        m = rng.randint(1, 30)
        profile = GenProfile(
            seed=i, traces=rng.randint(0, 120), mean_events_per_trace=rng.uniform(1, m),
            max_trace_length=m, distinct_activities=rng.randint(1, 12),
        )
        log = generate(profile)
        if tuple(log_statistics(log)) != brute_stats(log):
            mismatches.append(i)
    ok = listing_ok and not mismatches
    verdict(7, "statistics oracle", ok,
            f"listing {tuple(log_statistics(listing))}, 50 profiles, {len(mismatches)} mismatches")
    assert ok, mismatches
