"""Low-level JSON access for the two reader backends.

Both accept strict JSON plus one relaxation: a single trailing comma before
``}`` or ``]`` (the published JXES listings contain one). Objects come back
as dicts built with last-wins semantics for repeated keys; ``on_duplicate``
is called once per repeated key and may raise.
"""

from __future__ import annotations

import codecs
import json
import re
from json.decoder import scanstring
from typing import IO, Callable, Iterator

from .errors import MalformedJson

DuplicateHandler = Callable[[str], None]

# a comma counts as trailing only right after a value and before a closer
_STRING_OR_TRAILING_COMMA = re.compile(
    r'"(?:[^"\\]|\\.)*"|(?<=[0-9"el\]}])[ \t\n\r]*(,)(?=[ \t\n\r]*[\]}])', re.S
)
_BARE_CONSTANT = re.compile(r'"(?:[^"\\]|\\.)*"|(-?Infinity|NaN)', re.S)


class _BadConstant(ValueError):
    pass


def _reject_constant(name: str):
    raise _BadConstant(name)


def _byte_offset(text: str, char_pos: int) -> int:
    return len(text[:char_pos].encode("utf-8"))


def decode_utf8(data: bytes) -> str:
    try:
        text = data.decode("utf-8")
    except UnicodeDecodeError as exc:
        raise MalformedJson(f"invalid UTF-8: {exc.reason}", exc.start) from None
    if text.startswith("﻿"):
        text = text[1:]
    return text


def _strip_trailing_commas(text: str) -> tuple[str, list[int]]:
    removed = [m.start(1) for m in _STRING_OR_TRAILING_COMMA.finditer(text) if m.group(1)]
    if not removed:
        return text, removed
    pieces, last = [], 0
    for pos in removed:
        pieces.append(text[last:pos])
        last = pos + 1
    pieces.append(text[last:])
    return "".join(pieces), removed


def _unstrip_pos(pos: int, removed: list[int]) -> int:
    for r in removed:
        if r <= pos:
            pos += 1
        else:
            break
    return pos


def load_tree(data: bytes | str, on_duplicate: DuplicateHandler | None = None):
    """Decode a whole document into Python objects (dict/list/str/int/float/bool/None)."""
    text = decode_utf8(data) if isinstance(data, (bytes, bytearray)) else data

    def pairs_hook(pairs):
        obj = dict(pairs)
        if len(obj) != len(pairs) and on_duplicate is not None:
            seen = set()
            for k, _ in pairs:
                if k in seen:
                    on_duplicate(k)
                seen.add(k)
        return obj

    def loads(s: str):
        return json.loads(s, object_pairs_hook=pairs_hook, parse_constant=_reject_constant)

    try:
        try:
            return loads(text)
        except json.JSONDecodeError as first:
            stripped, removed = _strip_trailing_commas(text)
            if not removed:
                raise MalformedJson(first.msg, _byte_offset(text, first.pos)) from None
            try:
                return loads(stripped)
            except json.JSONDecodeError as exc:
                pos = _unstrip_pos(exc.pos, removed)
                raise MalformedJson(exc.msg, _byte_offset(text, pos)) from None
    except _BadConstant as exc:
        pos = next(
            (m.start(1) for m in _BARE_CONSTANT.finditer(text) if m.group(1)), 0
        )
        raise MalformedJson(f"non-standard constant {exc}", _byte_offset(text, pos)) from None


# -- incremental pull parser ---------------------------------------------------

START_MAP = "start_map"
END_MAP = "end_map"
START_ARRAY = "start_array"
END_ARRAY = "end_array"
KEY = "map_key"
SCALAR = "scalar"

_WS = re.compile(r"[ \t\n\r]*")
_NUMBER = re.compile(r"-?(?:0|[1-9][0-9]*)(\.[0-9]+)?([eE][+-]?[0-9]+)?")
_INTERN_MAX_LEN = 32
_INTERN_MAX_ENTRIES = 1 << 16
_LITERALS = {"true": True, "false": False, "null": None}

# parser expectations
_VALUE, _VALUE_OR_END, _KEY_OR_END, _COLON, _COMMA_OR_END, _DONE = range(6)


class PullParser:
    """Tokenizes a binary stream into ``(kind, value)`` events.

    Only the current chunk of raw text is held in memory. Object keys and
    short string values are interned so repeated ones share one object.
    Event kinds are
    ``start_map``, ``map_key``, ``end_map``, ``start_array``, ``end_array``
    and ``scalar``; scalars are str, int (integer lexeme), float (fraction or
    exponent lexeme), bool or None.
    """

    def __init__(self, stream: IO[bytes], chunk_size: int = 1 << 16):
        self._stream = stream
        self._chunk_size = chunk_size
        self._decoder = codecs.getincrementaldecoder("utf-8")()
        self._first = True
        self._memo: dict[str, str] = {}

    def _read(self) -> str | None:
        raw = self._stream.read(self._chunk_size)
        try:
            if not raw:
                self._decoder.decode(b"", final=True)
                return None
            text = self._decoder.decode(raw)
        except UnicodeDecodeError as exc:
            raise MalformedJson(f"invalid UTF-8: {exc.reason}", -1) from None
        if self._first and text:
            self._first = False
            if text[0] == "﻿":
                text = text[1:]
        return text

    def __iter__(self) -> Iterator[tuple[str, object]]:
        return self._events()

    def _events(self):
        buf = ""
        pos = 0
        base = 0  # byte offset of buf[0]
        eof = False
        stack: list[str] = []
        expect = _VALUE
        ws_match = _WS.match
        num_match = _NUMBER.match
        memo = self._memo
        intern = memo.setdefault

        def error(msg, at):
            return MalformedJson(msg, base + _byte_offset(buf, at))

        while True:
            pos = ws_match(buf, pos).end()
            if pos >= len(buf) - 32 and not eof:
                # keep a little lookahead so literals and numbers are never split
                chunk = self._read()
                if chunk is None:
                    eof = True
                else:
                    base += _byte_offset(buf, pos)
                    buf = buf[pos:] + chunk
                    pos = 0
                continue
            if pos >= len(buf):
                if expect == _DONE:
                    return
                raise error("unexpected end of input", pos)
            c = buf[pos]

            if expect == _DONE:
                raise error("extra data after document", pos)

            if expect == _COLON:
                if c != ":":
                    raise error("expecting ':'", pos)
                pos += 1
                expect = _VALUE
                continue

            if expect == _COMMA_OR_END:
                if c == ",":
                    pos += 1
                    expect = _KEY_OR_END if stack[-1] == "{" else _VALUE_OR_END
                    continue
                if c == "}" and stack[-1] == "{":
                    stack.pop()
                    pos += 1
                    yield END_MAP, None
                elif c == "]" and stack[-1] == "[":
                    stack.pop()
                    pos += 1
                    yield END_ARRAY, None
                else:
                    raise error(
                        "expecting ',' or '" + ("}" if stack[-1] == "{" else "]") + "'", pos
                    )
                expect = _COMMA_OR_END if stack else _DONE
                continue

            if expect == _KEY_OR_END:
                if c == "}":
                    stack.pop()
                    pos += 1
                    yield END_MAP, None
                    expect = _COMMA_OR_END if stack else _DONE
                    continue
                if c != '"':
                    raise error("expecting property name enclosed in double quotes", pos)
                key, pos = self._string(buf, pos, eof, base)
                if key is None:
                    buf, pos, base, eof = self._refill(buf, pos, base)
                    continue
                yield KEY, intern(key, key)
                expect = _COLON
                continue

            # value position
            if c == "]" and expect == _VALUE_OR_END:
                stack.pop()
                pos += 1
                yield END_ARRAY, None
                expect = _COMMA_OR_END if stack else _DONE
                continue
            if c == "{":
                stack.append("{")
                pos += 1
                yield START_MAP, None
                expect = _KEY_OR_END
                continue
            if c == "[":
                stack.append("[")
                pos += 1
                yield START_ARRAY, None
                expect = _VALUE_OR_END
                continue
            if c == '"':
                value, end = self._string(buf, pos, eof, base)
                if value is None:
                    buf, pos, base, eof = self._refill(buf, pos, base)
                    continue
                pos = end
                if len(value) <= _INTERN_MAX_LEN and len(memo) < _INTERN_MAX_ENTRIES:
                    value = intern(value, value)
            elif c == "-" or "0" <= c <= "9":
                m = num_match(buf, pos)
                if m is None:
                    raise error("invalid number", pos)
                if m.end() == len(buf) and not eof:
                    buf, pos, base, eof = self._refill(buf, pos, base)
                    continue
                text = m.group()
                pos = m.end()
                value = float(text) if m.group(1) or m.group(2) else int(text)
            else:
                for lit, lit_value in _LITERALS.items():
                    if buf.startswith(lit, pos):
                        value = lit_value
                        pos += len(lit)
                        break
                else:
                    raise error("expecting value", pos)
            yield SCALAR, value
            expect = _COMMA_OR_END if stack else _DONE

    def _string(self, buf: str, pos: int, eof: bool, base: int):
        """Return ``(text, end)``, or ``(None, pos)`` when more input is needed."""
        try:
            return scanstring(buf, pos + 1, True)
        except json.JSONDecodeError as exc:
            if not eof and ("Unterminated" in exc.msg or exc.pos >= len(buf) - 6):
                return None, pos
            raise MalformedJson(exc.msg, base + _byte_offset(buf, exc.pos)) from None

    def _refill(self, buf: str, pos: int, base: int):
        chunk = self._read()
        if chunk is None:
            return buf, pos, base, True
        base += _byte_offset(buf, pos)
        return buf[pos:] + chunk, 0, base, False
