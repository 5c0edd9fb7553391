from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional, Tuple

from ..encoding import (
    HASH_SIZE,
    ZERO_HASH,
    FieldReader,
    encode_fields,
    hash256,
)
from ..errors import DecodeError, TooManyTopics
from ..keys import Address, verify_signature

MAX_TOPICS = 3


def pack_topic(*values):
    """Hash several values into a single searchable 32-byte topic."""
    return hash256(encode_fields(b"twin-trust/topic", *values))


@dataclass(frozen=True)
class Transaction:
    sender: Address
    target: Optional[Address]
    payload: bytes
    nonce: int
    public_key: bytes
    signature: bytes = b""

    def signing_bytes(self):
        return encode_fields(
            b"twin-trust/tx", self.sender, self.target, self.payload, self.nonce
        )

    def encode(self):
        return encode_fields(
            self.sender,
            self.target,
            self.payload,
            self.nonce,
            self.public_key,
            self.signature,
        )

    @classmethod
    def decode(cls, data):
        reader = FieldReader(data)
        tx = cls.read_from(reader)
        reader.finish()
        return tx

    @classmethod
    def read_from(cls, reader):
        sender = Address(reader.read_hash())
        target = reader.read_optional_hash()
        return cls(
            sender=sender,
            target=Address(target) if target else None,
            payload=reader.read_bytes(),
            nonce=reader.read_uint(),
            public_key=reader.read_bytes(),
            signature=reader.read_bytes(),
        )

    @property
    def tx_id(self):
        return hash256(self.encode())

    def has_valid_signature(self):
        if Address.from_public_key(self.public_key) != self.sender:
            return False
        return verify_signature(self.public_key, self.signature, self.signing_bytes())

    def to_dict(self):
        return {
            "sender": self.sender.hex,
            "target": self.target.hex if self.target else None,
            "payload": self.payload.hex(),
            "nonce": self.nonce,
            "public_key": self.public_key.hex(),
            "signature": self.signature.hex(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            sender=Address.from_hex(data["sender"]),
            target=Address.from_hex(data["target"]) if data.get("target") else None,
            payload=bytes.fromhex(data["payload"]),
            nonce=int(data["nonce"]),
            public_key=bytes.fromhex(data["public_key"]),
            signature=bytes.fromhex(data["signature"]),
        )


def sign_transaction(keypair, target, payload, nonce):
    unsigned = Transaction(
        sender=keypair.address,
        target=target,
        payload=payload,
        nonce=nonce,
        public_key=keypair.public_key,
    )
    return Transaction(
        sender=unsigned.sender,
        target=unsigned.target,
        payload=unsigned.payload,
        nonce=unsigned.nonce,
        public_key=unsigned.public_key,
        signature=keypair.sign(unsigned.signing_bytes()),
    )


@dataclass(frozen=True)
class LogEntry:
    emitter: Address
    topics: Tuple[bytes, ...]
    data: bytes = b""

    def __post_init__(self):
        object.__setattr__(self, "topics", tuple(self.topics))
        if len(self.topics) > MAX_TOPICS:
            raise TooManyTopics(
                f"a log entry holds at most {MAX_TOPICS} indexed topics, got {len(self.topics)}"
            )
        for topic in self.topics:
            if len(topic) != HASH_SIZE:
                raise ValueError("topics are 32-byte values")

    def matches(self, emitter=None, topics=()):
        if emitter is not None and emitter != self.emitter:
            return False
        if len(topics) > len(self.topics):
            return False
        return all(
            wanted is None or wanted == got for wanted, got in zip(topics, self.topics)
        )

    def encode(self):
        return encode_fields(self.emitter, *self.topics, self.data)

    def to_dict(self):
        return {
            "emitter": self.emitter.hex,
            "topics": [topic.hex() for topic in self.topics],
            "data": self.data.hex(),
        }

    @classmethod
    def from_dict(cls, data):
        return cls(
            emitter=Address.from_hex(data["emitter"]),
            topics=tuple(bytes.fromhex(topic) for topic in data["topics"]),
            data=bytes.fromhex(data.get("data", "")),
        )


class ReceiptStatus(str, enum.Enum):
    SUCCESS = "success"
    REVERTED = "reverted"


@dataclass(frozen=True)
class Receipt:
    tx_id: bytes
    status: ReceiptStatus
    gas_used: int
    logs: Tuple[LogEntry, ...] = ()
    output: bytes = b""
    error: Optional[str] = None

    @property
    def succeeded(self):
        return self.status is ReceiptStatus.SUCCESS

    def encode(self):
        return encode_fields(
            self.tx_id,
            self.status.value,
            self.gas_used,
            self.output,
            self.error or "",
            *(entry.encode() for entry in self.logs),
        )

    def to_dict(self):
        return {
            "tx_id": self.tx_id.hex(),
            "status": self.status.value,
            "gas_used": self.gas_used,
            "logs": [entry.to_dict() for entry in self.logs],
            "output": self.output.hex(),
            "error": self.error,
        }


def transactions_root(transactions):
    """Binary Merkle root over transaction ids; the empty list commits to zero."""
    level = [tx.tx_id for tx in transactions]
    if not level:
        return ZERO_HASH
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [hash256(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


@dataclass(frozen=True)
class Block:
    parent: bytes
    height: int
    timestamp: int
    difficulty: int
    tx_root: bytes
    nonce: int = 0
    transactions: Tuple[Transaction, ...] = field(default=())

    def header_prefix(self):
        """Header fields before the nonce; mining appends the encoded nonce."""
        return encode_fields(
            self.parent, self.height, self.timestamp, self.difficulty, self.tx_root
        )

    def header_bytes(self):
        return self.header_prefix() + encode_fields(self.nonce)

    @property
    def hash(self):
        return hash256(self.header_bytes())

    def encode(self):
        return self.header_bytes() + encode_fields(
            len(self.transactions), *(tx.encode() for tx in self.transactions)
        )

    @classmethod
    def decode(cls, data):
        reader = FieldReader(data)
        parent = reader.read_hash()
        height = reader.read_uint()
        timestamp = reader.read_uint()
        difficulty = reader.read_uint()
        tx_root = reader.read_hash()
        nonce = reader.read_uint()
        count = reader.read_uint()
        transactions = []
        for _ in range(count):
            transactions.append(Transaction.decode(reader.read_bytes()))
        reader.finish()
        return cls(
            parent=parent,
            height=height,
            timestamp=timestamp,
            difficulty=difficulty,
            tx_root=tx_root,
            nonce=nonce,
            transactions=tuple(transactions),
        )

    def to_dict(self):
        return {
            "parent": self.parent.hex(),
            "height": self.height,
            "timestamp": self.timestamp,
            "difficulty": self.difficulty,
            "tx_root": self.tx_root.hex(),
            "nonce": self.nonce,
            "transactions": [tx.to_dict() for tx in self.transactions],
        }

    @classmethod
    def from_dict(cls, data):
        try:
            return cls(
                parent=bytes.fromhex(data["parent"]),
                height=int(data["height"]),
                timestamp=int(data["timestamp"]),
                difficulty=int(data["difficulty"]),
                tx_root=bytes.fromhex(data["tx_root"]),
                nonce=int(data["nonce"]),
                transactions=tuple(
                    Transaction.from_dict(tx) for tx in data.get("transactions", [])
                ),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise DecodeError(f"bad block record: {e}") from e
