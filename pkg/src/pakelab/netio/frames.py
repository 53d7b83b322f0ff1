"""Binary framing for the TCP transport.

Every frame opens with a fixed header:

  0x50 0x4B   magic ("PK")
  0x01        protocol version
  <type>      one byte

followed by the frame's fields in order. An integer field is a 2-byte
big-endian length and then the big-endian magnitude, minimally encoded
(zero is the single byte 0x00; anything longer must not start with 0x00).
A text field is a 2-byte length and UTF-8 bytes. Error frames carry one
raw code byte before their detail text.

Decoding is strict: bad magic, unknown type, truncation, non-minimal
integers, invalid UTF-8, out-of-range error codes, oversized frames, and
trailing bytes all raise MalformedFrame; only a wrong version byte raises
VersionMismatch (so peers can distinguish "not this protocol" from "this
protocol, different revision"). Strictness buys a bijection: any bytes
that decode at all re-encode to exactly themselves.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, fields
from typing import BinaryIO, Optional, Union

from ..core import int_to_bytes
from ..errors import MalformedFrame, VersionMismatch

MAGIC = b"\x50\x4b"
VERSION = 0x01
MAX_FRAME = 64 * 1024

TYPE_REGISTER = 0x01
TYPE_MSG1 = 0x02
TYPE_MSG2 = 0x03
TYPE_MSG3 = 0x04
TYPE_MSG4 = 0x05
TYPE_OK = 0x06
TYPE_ERROR = 0x07
TYPE_LKY_MSG2 = 0x08

ERR_MALFORMED = 0x01
ERR_PARAM_MISMATCH = 0x02
ERR_UNKNOWN_IDENTITY = 0x03
ERR_AUTH_FAIL = 0x04
ERR_VERSION_MISMATCH = 0x05
ERR_THROTTLED = 0x06

ERROR_NAMES = {
    ERR_MALFORMED: "malformed-frame",
    ERR_PARAM_MISMATCH: "param-mismatch",
    ERR_UNKNOWN_IDENTITY: "unknown-identity",
    ERR_AUTH_FAIL: "auth-fail",
    ERR_VERSION_MISMATCH: "version-mismatch",
    ERR_THROTTLED: "throttled",
}


@dataclass(frozen=True)
class RegisterFrame:
    id_a: int
    id_b: int
    v: int


@dataclass(frozen=True)
class Msg1Frame:
    q: int
    g: int
    id_a: int
    t_a: int


@dataclass(frozen=True)
class Msg2Frame:
    t_b: int


@dataclass(frozen=True)
class Msg3Frame:
    d_a: int


@dataclass(frozen=True)
class Msg4Frame:
    e_b: int


@dataclass(frozen=True)
class OkFrame:
    pass


@dataclass(frozen=True)
class ErrorFrame:
    code: int
    detail: str

    def __post_init__(self):
        if self.code not in ERROR_NAMES:
            raise ValueError(f"unknown error code {self.code:#04x}")


@dataclass(frozen=True)
class LkyMsg2Frame:
    # masked server share and confirmation for the baseline scheme's
    # combined second message (one frame, since they travel together)
    t_b_masked: int
    d_b: int


Frame = Union[RegisterFrame, Msg1Frame, Msg2Frame, Msg3Frame, Msg4Frame,
              OkFrame, ErrorFrame, LkyMsg2Frame]

_TYPE_OF = {
    RegisterFrame: TYPE_REGISTER,
    Msg1Frame: TYPE_MSG1,
    Msg2Frame: TYPE_MSG2,
    Msg3Frame: TYPE_MSG3,
    Msg4Frame: TYPE_MSG4,
    OkFrame: TYPE_OK,
    ErrorFrame: TYPE_ERROR,
    LkyMsg2Frame: TYPE_LKY_MSG2,
}
_CLASS_OF = {t: c for c, t in _TYPE_OF.items()}

_LABELS = {
    TYPE_REGISTER: "register",
    TYPE_MSG1: "msg1",
    TYPE_MSG2: "msg2",
    TYPE_MSG3: "msg3",
    TYPE_MSG4: "msg4",
    TYPE_OK: "ok",
    TYPE_ERROR: "error",
    TYPE_LKY_MSG2: "lky-msg2",
}


def frame_label(frame: Frame) -> str:
    return _LABELS[_TYPE_OF[type(frame)]]


def _encode_int_field(value: int) -> bytes:
    if value < 0:
        raise ValueError("wire integers are unsigned")
    data = int_to_bytes(value)
    if len(data) > 0xFFFF:
        raise ValueError("integer field exceeds 65535 bytes")
    return struct.pack(">H", len(data)) + data


def _encode_text_field(text: str) -> bytes:
    data = text.encode("utf-8")
    if len(data) > 0xFFFF:
        raise ValueError("text field exceeds 65535 bytes")
    return struct.pack(">H", len(data)) + data


def encode_frame(frame: Frame) -> bytes:
    """Serialize a frame; raises ValueError for unencodable field values."""
    frame_type = _TYPE_OF.get(type(frame))
    if frame_type is None:
        raise ValueError(f"not a wire frame: {type(frame).__name__}")
    out = bytearray(MAGIC)
    out.append(VERSION)
    out.append(frame_type)
    if isinstance(frame, ErrorFrame):
        out.append(frame.code)
        out += _encode_text_field(frame.detail)
    else:
        for f in fields(frame):
            out += _encode_int_field(getattr(frame, f.name))
    if len(out) > MAX_FRAME:
        raise ValueError(f"frame of {len(out)} bytes exceeds the {MAX_FRAME} cap")
    return bytes(out)


class _Cursor:
    """Strict offset walker over one frame's bytes."""

    def __init__(self, data: bytes):
        self.data = data
        self.pos = 0

    def take(self, n: int) -> bytes:
        if self.pos + n > len(self.data):
            raise MalformedFrame(
                f"truncated frame: wanted {n} bytes at offset {self.pos}, "
                f"have {len(self.data) - self.pos}")
        chunk = self.data[self.pos:self.pos + n]
        self.pos += n
        return chunk

    def take_int(self) -> int:
        (length,) = struct.unpack(">H", self.take(2))
        if length == 0:
            raise MalformedFrame("integer field with zero length")
        raw = self.take(length)
        if length > 1 and raw[0] == 0:
            raise MalformedFrame("integer field is not minimally encoded")
        return int.from_bytes(raw, "big")

    def take_text(self) -> str:
        (length,) = struct.unpack(">H", self.take(2))
        raw = self.take(length)
        try:
            return raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedFrame(f"detail text is not UTF-8: {exc}") from None

    def done(self):
        if self.pos != len(self.data):
            raise MalformedFrame(
                f"{len(self.data) - self.pos} trailing bytes after frame")


def decode_frame(data: bytes) -> Frame:
    """Parse exactly one frame from data; everything must be consumed."""
    if len(data) > MAX_FRAME:
        raise MalformedFrame(f"frame of {len(data)} bytes exceeds the {MAX_FRAME} cap")
    cur = _Cursor(data)
    if cur.take(2) != MAGIC:
        raise MalformedFrame("bad magic")
    version = cur.take(1)[0]
    if version != VERSION:
        raise VersionMismatch(f"wire version {version:#04x}, expected {VERSION:#04x}")
    frame_type = cur.take(1)[0]
    cls = _CLASS_OF.get(frame_type)
    if cls is None:
        raise MalformedFrame(f"unknown frame type {frame_type:#04x}")
    if cls is ErrorFrame:
        code = cur.take(1)[0]
        detail = cur.take_text()
        cur.done()
        if code not in ERROR_NAMES:
            raise MalformedFrame(f"unknown error code {code:#04x}")
        return ErrorFrame(code=code, detail=detail)
    values = [cur.take_int() for _ in fields(cls)]
    cur.done()
    return cls(*values)


def read_frame(stream: BinaryIO) -> Optional[Frame]:
    """Read one frame from a blocking byte stream.

    Returns None on clean EOF at a frame boundary. Mid-frame EOF raises
    MalformedFrame. The raw bytes are re-parsed through decode_frame so
    stream and buffer decoding cannot drift apart.
    """
    header = _read_exact(stream, 4, allow_eof=True)
    if header is None:
        return None
    raw = bytearray(header)
    if header[:2] != MAGIC:
        raise MalformedFrame("bad magic")
    if header[2] != VERSION:
        raise VersionMismatch(
            f"wire version {header[2]:#04x}, expected {VERSION:#04x}")
    frame_type = header[3]
    cls = _CLASS_OF.get(frame_type)
    if cls is None:
        raise MalformedFrame(f"unknown frame type {frame_type:#04x}")
    if cls is ErrorFrame:
        raw += _read_exact(stream, 1)
        raw += _read_field(stream)
    else:
        for _ in fields(cls):
            raw += _read_field(stream)
            if len(raw) > MAX_FRAME:
                raise MalformedFrame(f"frame exceeds the {MAX_FRAME} cap")
    return decode_frame(bytes(raw))


def _read_field(stream: BinaryIO) -> bytes:
    header = _read_exact(stream, 2)
    (length,) = struct.unpack(">H", header)
    return header + (_read_exact(stream, length) if length else b"")


def _read_exact(stream: BinaryIO, n: int, allow_eof: bool = False) -> Optional[bytes]:
    chunks = bytearray()
    while len(chunks) < n:
        chunk = stream.read(n - len(chunks))
        if not chunk:
            if allow_eof and not chunks:
                return None
            raise MalformedFrame(
                f"stream ended after {len(chunks)} of {n} expected bytes")
        chunks += chunk
    return bytes(chunks)
