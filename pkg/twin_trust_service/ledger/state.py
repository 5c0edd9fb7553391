from __future__ import annotations

from dataclasses import dataclass

try:
    from typing import Protocol
except ImportError:  # pragma: no cover
    from typing_extensions import Protocol

from ..encoding import encode_fields, hash256
from ..errors import InvalidBlock


@dataclass(frozen=True)
class BlockContext:
    height: int
    timestamp: int
    block_hash: bytes


class StateMachine(Protocol):
    """What the ledger needs from the contract layer."""

    def apply(self, tx, context):
        """Execute one transaction and return its Receipt; never raises for reverts."""

    def state_root(self):
        """32-byte commitment to the whole contract state."""


class LedgerState:
    """Account nonces plus the contract host, advanced one block at a time."""

    def __init__(self, host, allocations=()):
        self.host = host
        self.nonces = {}
        self.height = 0
        self._allocations = frozenset(allocations)

    def admits(self, sender):
        return not self._allocations or sender in self._allocations

    def apply_block(self, block):
        for tx in block.transactions:
            if not self.admits(tx.sender):
                raise InvalidBlock("UnknownAccount", tx.sender.hex)
        context = BlockContext(block.height, block.timestamp, block.hash)
        receipts = []
        for tx in block.transactions:
            expected = self.nonces.get(tx.sender, 0)
            if tx.nonce != expected:
                raise InvalidBlock("BadNonce", f"{tx.nonce} != {expected}")
            self.nonces[tx.sender] = expected + 1
            receipts.append(self.host.apply(tx, context))
        self.height = block.height
        return tuple(receipts)

    def state_root(self):
        accounts = sorted(self.nonces.items())
        return hash256(
            encode_fields(
                self.height,
                *(field for sender, nonce in accounts for field in (sender, nonce)),
                self.host.state_root(),
            )
        )
