"""
32-byte word packing and the metered slot store of Variables mode.
"""
from __future__ import annotations

from ..encoding import encode_fields, hash256
from ..errors import TextTooLong
from .gas import OpKind
from .types import DataView, ViewFormat

WORD = 32
ZERO_WORD = bytes(WORD)
MAX_TEXT = WORD - 1


def uint_word(value):
    return value.to_bytes(WORD, "big")


def word_uint(word):
    return int.from_bytes(word, "big")


def text_word(text):
    """Short text: UTF-8 bytes left-aligned, length in the last byte."""
    raw = text.encode("utf-8")
    if len(raw) > MAX_TEXT:
        raise TextTooLong(f"{text!r} needs {len(raw)} bytes, a slot holds {MAX_TEXT}")
    return raw.ljust(MAX_TEXT, b"\x00") + bytes([len(raw)])


def word_text(word):
    return word[: word[-1]].decode("utf-8")


def view_word(view):
    """Period in the first 31 bytes, format code in the last."""
    return view.streaming_period.to_bytes(MAX_TEXT, "big") + bytes(
        [view.view_format.code]
    )


def word_view(word):
    return DataView(int.from_bytes(word[:MAX_TEXT], "big"), ViewFormat.from_code(word[-1]))


def slot_key(*path):
    return hash256(encode_fields(b"twin-trust/slot", *path))


class SlotStorage:
    """
    Contract state as 32-byte slots. The first write to a slot costs
    ``sstore_set`` whatever its value, zero included; a write to an occupied
    slot costs ``sstore_update``, and writing zero there clears it. Writes are
    charged before they are applied.
    """

    def __init__(self):
        self._slots = {}

    def load(self, key):
        return self._slots.get(key, ZERO_WORD)

    def occupied(self, key):
        return key in self._slots

    def commit(self, writes, meter):
        fresh = sum(1 for key, _ in writes if not self.occupied(key))
        updated = len(writes) - fresh
        if fresh:
            meter.charge(OpKind.SSTORE_SET, fresh)
        if updated:
            meter.charge(OpKind.SSTORE_UPDATE, updated)
        for key, value in writes:
            if value == ZERO_WORD and self.occupied(key):
                del self._slots[key]
            else:
                self._slots[key] = value

    def __len__(self):
        return len(self._slots)

    def root(self):
        return hash256(b"".join(key + value for key, value in sorted(self._slots.items())))
