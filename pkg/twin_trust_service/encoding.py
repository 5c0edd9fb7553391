"""
Canonical length-prefixed binary encoding and the single 256-bit hash.

Every field is written as a 4-byte big-endian length followed by its bytes.
Unsigned integers are 8 bytes big-endian, text is UTF-8, anything exposing
``__bytes__`` (addresses) is written as its raw bytes and ``None`` as an
empty field.
"""
import hashlib
import struct

from .errors import DecodeError

HASH_SIZE = 32
ZERO_HASH = bytes(HASH_SIZE)
MAX_UINT = 2**64 - 1

_LENGTH = struct.Struct(">I")


def hash256(data):
    return hashlib.sha256(data).digest()


def encode_bytes(value):
    return _LENGTH.pack(len(value)) + bytes(value)


def encode_uint(value):
    if isinstance(value, bool) or not isinstance(value, int):
        raise TypeError(f"expected an unsigned integer, got {value!r}")
    if value < 0 or value > MAX_UINT:
        raise ValueError(f"{value} does not fit in 64 unsigned bits")
    return encode_bytes(value.to_bytes(8, "big"))


def encode_text(value):
    return encode_bytes(value.encode("utf-8"))


def encode_field(value):
    if value is None:
        return encode_bytes(b"")
    if isinstance(value, (bytes, bytearray)):
        return encode_bytes(value)
    if isinstance(value, str):
        return encode_text(value)
    if isinstance(value, int):
        return encode_uint(value)
    if hasattr(value, "__bytes__"):
        return encode_bytes(bytes(value))
    raise TypeError(f"cannot encode {type(value).__name__}")


def encode_fields(*values):
    return b"".join(encode_field(value) for value in values)


class FieldReader:
    """Sequential reader over an ``encode_fields`` buffer."""

    def __init__(self, data):
        self._data = bytes(data)
        self._offset = 0

    def read_bytes(self):
        end = self._offset + _LENGTH.size
        if end > len(self._data):
            raise DecodeError("truncated length prefix")
        (length,) = _LENGTH.unpack_from(self._data, self._offset)
        start, end = end, end + length
        if end > len(self._data):
            raise DecodeError("truncated field")
        self._offset = end
        return self._data[start:end]

    def read_uint(self):
        raw = self.read_bytes()
        if len(raw) != 8:
            raise DecodeError(f"integer field has {len(raw)} bytes")
        return int.from_bytes(raw, "big")

    def read_text(self):
        try:
            return self.read_bytes().decode("utf-8")
        except UnicodeDecodeError as e:
            raise DecodeError(str(e)) from e

    def read_hash(self):
        raw = self.read_bytes()
        if len(raw) != HASH_SIZE:
            raise DecodeError(f"expected {HASH_SIZE} bytes, got {len(raw)}")
        return raw

    def read_optional_hash(self):
        raw = self.read_bytes()
        if not raw:
            return None
        if len(raw) != HASH_SIZE:
            raise DecodeError(f"expected {HASH_SIZE} bytes, got {len(raw)}")
        return raw

    @property
    def exhausted(self):
        return self._offset == len(self._data)

    def finish(self):
        if not self.exhausted:
            raise DecodeError(f"{len(self._data) - self._offset} trailing bytes")
