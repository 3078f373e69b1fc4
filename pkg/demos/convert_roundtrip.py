"""
Converting between JXES and XES
===============================

Read a small JXES document, write it as XES, read that back and check
that nothing was lost on the way.
"""

import tempfile
from pathlib import Path

from jxeskit import canonicalize, load_log, logs_equivalent, parse_jxes, save_log

doc = b"""{
  "classifiers": {"Activity classifier": ["concept:name", "lifecycle:transition"]},
  "traces": [{
    "attrs": {"name": "Dana", "age": "42"},
    "events": [
      {"concept:name": "Register", "date": "2021-03-04T09:15:00.250Z", "org:resource": "Bob"},
      {"concept:name": "Approve", "date": "2021-03-04T11:40:12.000+01:00", "org:resource": "Alice"}
    ]
  }]
}"""
log = parse_jxes(doc)

# the date string was recognised as a date, "42" stayed a string
first = log.traces[0].events[0]
print(repr(first.get("date")), repr(log.traces[0].attributes["age"].value))

out = Path(tempfile.mkdtemp())
save_log(log, out / "log.xes")
print((out / "log.xes").read_text())

# and back again; gzip is chosen from the file name
again, _ = load_log(out / "log.xes")
save_log(again, out / "log.json.gz")
restored, _ = load_log(out / "log.json.gz")
print("equivalent:", logs_equivalent(log, restored))
print(canonicalize(restored).decode())
