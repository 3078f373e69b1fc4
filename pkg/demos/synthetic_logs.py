"""
Synthetic logs and their statistics
===================================

Generated logs are deterministic in the seed. The presets reproduce the
trace count, mean trace length, maximum length and activity alphabet of
two well-known logs.
"""

from jxeskit import GenProfile, generate, log_statistics
from jxeskit.loggen import PRESETS, preset, trace_length_weights
from jxeskit.model import kind_of

for name in PRESETS:
    s = log_statistics(generate(preset(name)))
    print(f"{name:>9}: {s.trace_count} traces, {s.event_count} events, {s.variant_count} variants, "
          f"{s.distinct_activities} activities, max length {s.max_trace_length}")

# trace lengths follow a truncated geometric law with the requested mean
w = trace_length_weights(4.0, 10)
print("P(length = 1..10):", " ".join(f"{p:.3f}" for p in w))

# a custom profile with nested attributes and declared globals
p = GenProfile(seed=3, traces=5, nesting_prob=0.5, event_globals=2, extra_event_attrs=3)
log = generate(p)
print(list(log.globals.event))
for key, attr in log.traces[0].events[0].attributes.items():
    print(f"  {key}: {kind_of(attr.value)}" + (f" with children {list(attr.children)}" if attr.children else ""))
