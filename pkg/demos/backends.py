"""
Tree and streaming backends
===========================

The tree backend decodes the whole JSON document first; the streaming
backend builds the model from a pull parser and never holds the full
document tree. Both give the same log and the same bytes.
"""

import time
import tracemalloc

from jxeskit import BackendKind, ParseOptions, canonicalize, generate, logs_equivalent, parse_jxes
from jxeskit.loggen import preset
from jxeskit.writer import write_jxes

log = generate(preset("level-d2", traces=2000))
data = canonicalize(log)
print(f"{len(data) / 1e6:.1f} MB of JXES")

parsed = {}
for backend in BackendKind:
    tracemalloc.start()
    t0 = time.perf_counter()
    parsed[backend] = parse_jxes(data, ParseOptions(backend))
    elapsed = time.perf_counter() - t0
    peak = tracemalloc.get_traced_memory()[1]
    tracemalloc.stop()
    print(f"{backend.value:>9}: {elapsed:.2f}s, peak {peak / 1e6:.0f} MB")

print("same model:", logs_equivalent(parsed[BackendKind.TREE], parsed[BackendKind.STREAMING]))
print("same bytes:", write_jxes(log, backend="tree") == write_jxes(log, backend="streaming"))
