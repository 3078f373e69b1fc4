"""
Benchmarking import and export
==============================

Each case runs once to warm up and then three timed times; memory comes
from one more run under tracemalloc. A broken case shows up as ERROR and
the rest of the suite still runs.
"""

import tempfile
from pathlib import Path

from jxeskit import generate, save_log
from jxeskit.bench import BenchCase, Direction, render_tables, run_bench
from jxeskit.formats import Format
from jxeskit.loggen import preset

work = Path(tempfile.mkdtemp())
src = work / "level-d2.json"
save_log(generate(preset("level-d2")), src)

targets = [(Format.JXES, "tree"), (Format.JXES, "streaming"), (Format.XES, None), (Format.XES_GZ, None)]
cases = [BenchCase(str(src), fmt, d, backend) for d in (Direction.IMPORT, Direction.EXPORT)
         for fmt, backend in targets]
cases.append(BenchCase(str(work / "missing.json"), Format.JXES, Direction.IMPORT))

report = run_bench(cases)
print(render_tables(report, "md").decode())
