"""Import/export benchmarks: wall time, peak memory and file size.

Each case is run once as a warmup, then ``runs`` times under a monotonic
clock; the report keeps every run and their arithmetic mean. Memory is
measured in one further run under :mod:`tracemalloc` as the peak of traced
allocations above the level at the start of the run, so the timing runs are
not slowed by tracing. A failing case is recorded as such and the remaining
cases still run.
"""

from __future__ import annotations

import csv
import gc
import io
import json
import math
import os
import platform
import tempfile
import time
import tracemalloc
from dataclasses import asdict, dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Iterable, Sequence

from .formats import Format, load_log, save_log
from .model import EventLog
from .reader import BackendKind

__all__ = [
    "BenchCase",
    "BenchReport",
    "CaseResult",
    "Direction",
    "cases_from_suite",
    "render_tables",
    "run_bench",
]

METRICS = {
    "time": ("mean_ms", "time (ms)"),
    "memory": ("peak_memory_bytes", "peak memory (MB)"),
    "size": ("output_bytes", "file size (bytes)"),
}


class Direction:
    IMPORT = "import"
    EXPORT = "export"


@dataclass(frozen=True)
class BenchCase:
    input_path: str
    format: Format
    direction: str
    backend: BackendKind | None = None
    runs: int = 3

    def __post_init__(self):
        object.__setattr__(self, "format", Format(self.format))
        if self.direction not in (Direction.IMPORT, Direction.EXPORT):
            raise ValueError(f"direction must be import or export, got {self.direction!r}")
        if self.runs < 1:
            raise ValueError("runs must be >= 1")
        if self.format.is_xes:
            object.__setattr__(self, "backend", None)
        else:
            object.__setattr__(self, "backend", BackendKind(self.backend or BackendKind.TREE))

    @property
    def label(self) -> str:
        name = {"xes": "XES", "xes-gz": "XES-gz", "jxes": "JXES", "jxes-gz": "JXES-gz"}[self.format]
        return f"{name}-{self.backend.value}" if self.backend else name

    @property
    def input_name(self) -> str:
        return Path(self.input_path).name


@dataclass
class CaseResult:
    case: BenchCase
    times_ms: list[float] = field(default_factory=list)
    mean_ms: float | None = None
    peak_memory_bytes: int | None = None
    output_bytes: int | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def to_dict(self) -> dict:
        d = asdict(self)
        d["case"] = {
            "input_path": self.case.input_path,
            "format": self.case.format.value,
            "direction": self.case.direction,
            "backend": self.case.backend.value if self.case.backend else None,
            "runs": self.case.runs,
            "label": self.case.label,
        }
        return d


@dataclass
class BenchReport:
    results: list[CaseResult]
    metadata: dict

    def to_json(self) -> str:
        return json.dumps(
            {"metadata": self.metadata, "results": [r.to_dict() for r in self.results]},
            indent=2,
        )


def mean(values: Sequence[float]) -> float:
    """Correctly rounded mean, hence independent of the order of ``values``."""
    return math.fsum(values) / len(values)


def _host() -> str:
    return f"{platform.platform()} / {platform.machine()} / Python {platform.python_version()}"


class _Workspace:
    """Source logs loaded once and rendered once per (input, format)."""

    def __init__(self, root: Path):
        self.root = root
        self._logs: dict[str, EventLog] = {}
        self._files: dict[tuple[str, Format], Path] = {}

    def log(self, path: str) -> EventLog:
        if path not in self._logs:
            self._logs[path] = load_log(path)[0]
        return self._logs[path]

    def file(self, path: str, fmt: Format) -> Path:
        key = (path, fmt)
        if key not in self._files:
            target = self.root / f"input-{len(self._files)}{fmt.suffix}"
            save_log(self.log(path), target, fmt)
            self._files[key] = target
        return self._files[key]


def _operation(case: BenchCase, ws: _Workspace) -> tuple[Callable[[], int | None], Path | None]:
    if case.direction == Direction.IMPORT:
        src = ws.file(case.input_path, case.format)

        def run():
            load_log(src, case.format, case.backend or BackendKind.TREE)
            return None

        return run, None
    log = ws.log(case.input_path)
    out = ws.root / f"export{case.format.suffix}"

    def run():
        return save_log(log, out, case.format, case.backend or BackendKind.TREE)

    return run, out


def _peak_memory(op: Callable[[], object]) -> int:
    gc.collect()
    tracemalloc.start()
    try:
        tracemalloc.reset_peak()
        base = tracemalloc.get_traced_memory()[0]
        result = op()
        peak = tracemalloc.get_traced_memory()[1]
        del result
    finally:
        tracemalloc.stop()
    return peak - base


def run_bench(
    cases: Iterable[BenchCase],
    measure_memory: bool = True,
    workdir: str | os.PathLike | None = None,
) -> BenchReport:
    """Run every case in order; failures are captured per case."""
    cases = list(cases)
    started = datetime.now(timezone.utc).isoformat(timespec="seconds")
    with tempfile.TemporaryDirectory(dir=workdir) as tmp:
        ws = _Workspace(Path(tmp))
        results = []
        for case in cases:
            res = CaseResult(case)
            try:
                op, out = _operation(case, ws)
                op()  # warmup
                for _ in range(case.runs):
                    gc.collect()
                    t0 = time.perf_counter()
                    size = op()
                    res.times_ms.append((time.perf_counter() - t0) * 1000)
                res.mean_ms = mean(res.times_ms)
                if out is not None:
                    res.output_bytes = size
                if measure_memory:
                    res.peak_memory_bytes = _peak_memory(op)
            except Exception as exc:  # noqa: BLE001 - one bad case must not stop the suite
                res.error = f"{type(exc).__name__}: {exc}"
                res.times_ms, res.mean_ms = [], None
            results.append(res)
    return BenchReport(
        results,
        {
            "host": _host(),
            "started": started,
            "finished": datetime.now(timezone.utc).isoformat(timespec="seconds"),
            "warmup": "1 untimed run per case before the timed runs",
            "clock": "time.perf_counter, I/O included",
            "memory": "tracemalloc peak above baseline, separate run" if measure_memory else None,
        },
    )


# -- tables --------------------------------------------------------------------

def _tables(report: BenchReport):
    """Yield ``(title, metric, direction, columns, rows)``; rows map input -> cells."""
    for metric, (attr, unit) in METRICS.items():
        for direction in (Direction.IMPORT, Direction.EXPORT):
            subset = [r for r in report.results if r.case.direction == direction]
            if metric == "size" and direction == Direction.IMPORT:
                continue
            if not any(getattr(r, attr) is not None for r in subset):
                continue
            columns: list[str] = []
            rows: dict[str, dict[str, float | None]] = {}
            for r in subset:
                if r.case.label not in columns:
                    columns.append(r.case.label)
                value = getattr(r, attr)
                if value is not None and metric == "memory":
                    value = value / 1e6
                rows.setdefault(r.case.input_name, {})[r.case.label] = value
            yield f"{direction.capitalize()} {unit}", metric, direction, columns, rows


def best_column(columns: list[str], cells: dict[str, float | None]) -> str | None:
    """Column with the lowest value; ties go to the earliest column."""
    best = None
    for col in columns:
        v = cells.get(col)
        if v is not None and (best is None or v < cells[best]):
            best = col
    return best


def _fmt(v: float | None, present: bool) -> str:
    if not present:
        return ""
    if v is None:
        return "ERROR"
    return f"{v:.2f}" if isinstance(v, float) else str(v)


def render_tables(report: BenchReport, format: str = "markdown") -> bytes:
    """One table per (metric, direction); the best cell in each row is flagged.

    Markdown marks the best cell in bold, CSV emits one row per cell with a
    ``best`` column. Failed cases show as ``ERROR`` and are never best.
    """
    if not report.results:
        raise ValueError("cannot render an empty report")
    if format in ("md", "markdown"):
        out = []
        for title, _, _, columns, rows in _tables(report):
            out.append(f"### {title}\n\n")
            out.append("| input | " + " | ".join(columns) + " |\n")
            out.append("|---|" + "---|" * len(columns) + "\n")
            for name, cells in rows.items():
                best = best_column(columns, cells)
                shown = []
                for col in columns:
                    text = _fmt(cells.get(col), col in cells)
                    shown.append(f"**{text}**" if col == best else text)
                out.append(f"| {name} | " + " | ".join(shown) + " |\n")
            out.append("\n")
        return "".join(out).encode()
    if format == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["metric", "direction", "input", "column", "value", "best"])
        for _, metric, direction, columns, rows in _tables(report):
            for name, cells in rows.items():
                best = best_column(columns, cells)
                for col in columns:
                    if col in cells:
                        writer.writerow([
                            metric, direction, name, col,
                            _fmt(cells[col], True), int(col == best),
                        ])
        return buf.getvalue().encode()
    raise ValueError(f"unknown table format {format!r}")


# -- suites --------------------------------------------------------------------

_TARGETS = {
    "jxes-tree": (Format.JXES, BackendKind.TREE),
    "jxes-streaming": (Format.JXES, BackendKind.STREAMING),
    "jxes-gz-tree": (Format.JXES_GZ, BackendKind.TREE),
    "jxes-gz-streaming": (Format.JXES_GZ, BackendKind.STREAMING),
    "xes": (Format.XES, None),
    "xes-gz": (Format.XES_GZ, None),
}


def cases_from_suite(suite: dict, base_dir: str | os.PathLike = ".", runs: int | None = None):
    """Expand a suite config into cases.

    ``{"inputs": [...], "targets": [...], "directions": [...], "runs": 3}``;
    inputs are paths relative to ``base_dir``, targets are names such as
    ``jxes-tree`` or ``xes-gz``.
    """
    base = Path(base_dir)
    targets = suite.get("targets", ["jxes-tree", "jxes-streaming", "xes", "xes-gz"])
    directions = suite.get("directions", [Direction.IMPORT, Direction.EXPORT])
    n = runs if runs is not None else suite.get("runs", 3)
    unknown = [t for t in targets if t not in _TARGETS]
    if unknown:
        raise ValueError(f"unknown targets {unknown}; choose from {sorted(_TARGETS)}")
    cases = []
    for inp in suite.get("inputs", []):
        path = str(base / inp)
        for direction in directions:
            for t in targets:
                fmt, backend = _TARGETS[t]
                cases.append(BenchCase(path, fmt, direction, backend, n))
    return cases
