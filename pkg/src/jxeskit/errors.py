"""Exception hierarchy shared by the readers, writers and tools."""

from __future__ import annotations

import re

_PLAIN_KEY = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")


def json_path(parts) -> str:
    """Render keys/indices as a JSONPath such as ``$.traces[0]['concept:name']``."""
    out = ["$"]
    for p in parts:
        if isinstance(p, int):
            out.append(f"[{p}]")
        elif _PLAIN_KEY.match(p):
            out.append(f".{p}")
        else:
            out.append("['" + p.replace("\\", "\\\\").replace("'", "\\'") + "']")
    return "".join(out)


class JxesError(Exception):
    """Base class for every error raised by jxeskit."""


class MalformedJson(JxesError):
    """The input is not syntactically valid JSON."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (byte offset {offset})")
        self.offset = offset


class SchemaViolation(JxesError):
    """Valid JSON that does not follow the JXES layout.

    ``parts`` locates the offending value as a sequence of object keys and
    array indices from the document root; callers prepend their own step
    with :meth:`at` while the exception unwinds.
    """

    code = "SchemaViolation"

    def __init__(self, message: str, parts: tuple = ()):
        super().__init__(message)
        self.detail = message
        self.parts = tuple(parts)

    def at(self, *parts) -> "SchemaViolation":
        self.parts = tuple(parts) + self.parts
        return self

    @property
    def path(self) -> str:
        return json_path(self.parts)

    def __str__(self):
        return f"{self.path}: {self.detail}"


class ReservedKeyMisuse(SchemaViolation):
    code = "ReservedKeyMisuse"


class IntOutOfRange(SchemaViolation):
    code = "IntOutOfRange"


class UnknownKey(SchemaViolation):
    """Raised only by strict parsing."""

    code = "UnknownKey"


class DuplicateKey(SchemaViolation):
    """Raised only by strict parsing."""

    code = "DuplicateKey"


class MalformedXml(JxesError):
    pass


class UnsupportedConstruct(JxesError):
    """An XES construct outside the subset that maps losslessly onto JXES."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class InvalidProfile(ValueError):
    pass


class CaseFailure(JxesError):
    pass


class IoFailure(JxesError):
    pass
