"""File helpers: gzip sniffing on input, atomic (optionally gzipped) output."""

from __future__ import annotations

import contextlib
import gzip
import io
import os
import tempfile
from pathlib import Path
from typing import IO, Iterator, Union

from .errors import IoFailure

GZIP_MAGIC = b"\x1f\x8b"

_UMASK = os.umask(0)
os.umask(_UMASK)

Source = Union[bytes, bytearray, str, os.PathLike, IO[bytes]]


class _Prefixed(io.RawIOBase):
    """Re-attach bytes already consumed from the front of a stream."""

    def __init__(self, head: bytes, stream: IO[bytes]):
        self._head = head
        self._stream = stream

    def readable(self):
        return True

    def readinto(self, b):
        if self._head:
            n = min(len(b), len(self._head))
            b[:n] = self._head[:n]
            self._head = self._head[n:]
            return n
        data = self._stream.read(len(b))
        b[: len(data)] = data
        return len(data)


def is_gzip(data: bytes) -> bool:
    return data[:2] == GZIP_MAGIC


@contextlib.contextmanager
def open_input(source: Source) -> Iterator[IO[bytes]]:
    """Yield a binary stream over ``source``, transparently gunzipping.

    ``source`` may be raw bytes, a filesystem path or a binary file object.
    Compression is detected from the magic bytes, not the file name.
    """
    with contextlib.ExitStack() as stack:
        if isinstance(source, (bytes, bytearray)):
            if is_gzip(source):
                source = gzip.decompress(source)
            yield io.BytesIO(source)
            return
        if isinstance(source, (str, os.PathLike)):
            try:
                stream = stack.enter_context(open(source, "rb"))
            except OSError as exc:
                raise IoFailure(f"cannot open {source}: {exc.strerror}") from exc
        else:
            stream = source
        head = stream.read(2)
        stream = io.BufferedReader(_Prefixed(head, stream))
        if head == GZIP_MAGIC:
            stream = stack.enter_context(gzip.GzipFile(fileobj=stream, mode="rb"))
        yield stream


def read_all(source: Source) -> bytes:
    if isinstance(source, (bytes, bytearray)):
        return gzip.decompress(source) if is_gzip(source) else bytes(source)
    with open_input(source) as stream:
        return stream.read()


@contextlib.contextmanager
def atomic_output(path: str | os.PathLike, compress: bool | None = None) -> Iterator[IO[bytes]]:
    """Write to a temporary file next to ``path`` and rename it into place.

    Output is gzipped (with a zero timestamp, so bytes are reproducible) when
    ``compress`` is true or, by default, when the name ends in ``.gz``.
    Nothing is left behind if the body raises.
    """
    path = Path(path)
    if compress is None:
        compress = path.suffix == ".gz"
    try:
        fd, tmp = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent or ".")
    except OSError as exc:
        raise IoFailure(f"cannot write {path}: {exc.strerror}") from exc
    try:
        with os.fdopen(fd, "wb") as raw:
            if compress:
                with gzip.GzipFile(filename="", mode="wb", fileobj=raw, mtime=0) as gz:
                    yield gz
            else:
                yield raw
        os.chmod(tmp, 0o666 & ~_UMASK)
        os.replace(tmp, path)
    except BaseException as exc:
        with contextlib.suppress(OSError):
            os.unlink(tmp)
        if isinstance(exc, OSError):
            raise IoFailure(f"cannot write {path}: {exc}") from exc
        raise
