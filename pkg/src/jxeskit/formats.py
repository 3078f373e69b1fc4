"""Format dispatch by file name, shared by the CLI and the benchmark."""

from __future__ import annotations

import enum
import os

from ._io import atomic_output
from .model import EventLog
from .reader import BackendKind, ParseOptions, parse_jxes
from .writer import dump_jxes
from .xes import XesDocumentMeta, dump_xes, parse_xes


class Format(str, enum.Enum):
    XES = "xes"
    XES_GZ = "xes-gz"
    JXES = "jxes"
    JXES_GZ = "jxes-gz"

    @property
    def is_xes(self) -> bool:
        return self in (Format.XES, Format.XES_GZ)

    @property
    def compressed(self) -> bool:
        return self in (Format.XES_GZ, Format.JXES_GZ)

    @property
    def suffix(self) -> str:
        return {"xes": ".xes", "xes-gz": ".xes.gz", "jxes": ".json", "jxes-gz": ".json.gz"}[self.value]


_SUFFIXES = (
    (".xes.gz", Format.XES_GZ),
    (".xes", Format.XES),
    (".json.gz", Format.JXES_GZ),
    (".jxes.gz", Format.JXES_GZ),
    (".json", Format.JXES),
    (".jxes", Format.JXES),
)


def detect_format(path, override: str | Format | None = None) -> Format:
    """Format named by ``override`` or implied by the file extension."""
    if override:
        return Format(override)
    name = os.fspath(path).lower()
    for suffix, fmt in _SUFFIXES:
        if name.endswith(suffix):
            return fmt
    raise ValueError(f"cannot infer the format of {path!r}; pass an explicit format")


def load_log(
    path,
    fmt: str | Format | None = None,
    backend: BackendKind | str = BackendKind.TREE,
    strict: bool = False,
) -> tuple[EventLog, XesDocumentMeta]:
    """Read any supported file. JXES files come with empty XES header metadata."""
    fmt = detect_format(path, fmt)
    if fmt.is_xes:
        return parse_xes(path)
    return parse_jxes(path, ParseOptions(BackendKind(backend), strict)), XesDocumentMeta()


def save_log(
    log: EventLog,
    path,
    fmt: str | Format | None = None,
    backend: BackendKind | str = BackendKind.TREE,
    meta: XesDocumentMeta | None = None,
    pretty: bool = False,
) -> int:
    """Atomically write ``log``; returns the number of bytes on disk."""
    fmt = detect_format(path, fmt)
    with atomic_output(path, compress=fmt.compressed) as sink:
        if fmt.is_xes:
            dump_xes(log, sink, meta)
        else:
            dump_jxes(log, sink, backend, pretty)
    return os.path.getsize(path)
