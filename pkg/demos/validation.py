"""
Validating documents
====================

The validator reports every finding with a JSONPath instead of stopping
at the first one. Errors mean the reader would refuse the document;
warnings flag things the reader accepts.
"""

from jxeskit.validator import format_text, has_errors, validate_document

broken = b"""{
  "global-attrs": {"event": {"Key 2": 2}, "log": {}},
  "classifiers": {"Activity classifier": ["concept:name"]},
  "traces": [{
    "attrs": {"p": {"value": 1, "x": 2}},
    "events": [{"Key 2": 3}, {}]
  }]
}"""

diags = validate_document(broken)
print(format_text(diags))
print("rejected by the reader:", has_errors(diags))
