from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Tuple

from ..encoding import ZERO_HASH, encode_fields, hash256
from ..keys import Address
from .types import Block


@dataclass(frozen=True)
class Genesis:
    difficulty: int = 0
    node_count: int = 3
    allocations: Tuple[Address, ...] = ()
    timestamp: int = 0
    chain_id: str = "twin-trust"

    def block(self):
        commitment = hash256(encode_fields(self.chain_id, *self.allocations))
        return Block(
            parent=ZERO_HASH,
            height=0,
            timestamp=self.timestamp,
            difficulty=self.difficulty,
            tx_root=commitment,
        )

    @classmethod
    def from_dict(cls, data):
        return cls(
            difficulty=int(data.get("difficulty", 0)),
            node_count=int(data.get("node_count", 3)),
            allocations=tuple(
                Address.from_hex(address) for address in data.get("prefunded", [])
            ),
            timestamp=int(data.get("timestamp", 0)),
            chain_id=data.get("chain_id", "twin-trust"),
        )

    @classmethod
    def from_file(cls, path):
        with open(path) as f:
            return cls.from_dict(json.load(f))

    def to_dict(self):
        return {
            "chain_id": self.chain_id,
            "difficulty": self.difficulty,
            "node_count": self.node_count,
            "prefunded": [address.hex for address in self.allocations],
            "timestamp": self.timestamp,
        }
