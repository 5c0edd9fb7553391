"""
Account identities: 32-byte addresses and Ed25519 key pairs.
"""
from dataclasses import dataclass

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import serialization
from cryptography.hazmat.primitives.asymmetric.ed25519 import (
    Ed25519PrivateKey,
    Ed25519PublicKey,
)

from .encoding import HASH_SIZE, encode_fields, hash256

_ACCOUNT_DOMAIN = b"twin-trust/account"
_CONTRACT_DOMAIN = b"twin-trust/contract"


@dataclass(frozen=True, order=True)
class Address:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != HASH_SIZE:
            raise ValueError(f"address must be {HASH_SIZE} bytes")

    def __bytes__(self):
        return self.digest

    def __str__(self):
        return self.digest.hex()

    def __repr__(self):
        return f"Address({self.digest.hex()[:12]}…)"

    @property
    def hex(self):
        return self.digest.hex()

    @classmethod
    def from_hex(cls, value):
        return cls(bytes.fromhex(value))

    @classmethod
    def from_public_key(cls, public_key):
        return cls(hash256(encode_fields(_ACCOUNT_DOMAIN, public_key)))

    @classmethod
    def for_contract(cls, deployer, nonce):
        return cls(hash256(encode_fields(_CONTRACT_DOMAIN, deployer, nonce)))


def verify_signature(public_key, signature, message):
    try:
        Ed25519PublicKey.from_public_bytes(public_key).verify(signature, message)
    except (InvalidSignature, ValueError):
        return False
    return True


class KeyPair:
    def __init__(self, private_key):
        self._private_key = private_key
        self.public_key = private_key.public_key().public_bytes(
            encoding=serialization.Encoding.Raw,
            format=serialization.PublicFormat.Raw,
        )
        self.address = Address.from_public_key(self.public_key)

    @classmethod
    def generate(cls):
        return cls(Ed25519PrivateKey.generate())

    @classmethod
    def from_seed(cls, seed):
        """Deterministic key pair, used by fixtures, the demo and benchmarks."""
        if isinstance(seed, str):
            seed = seed.encode("utf-8")
        return cls(Ed25519PrivateKey.from_private_bytes(hash256(seed)))

    def sign(self, message):
        return self._private_key.sign(message)

    def __repr__(self):
        return f"KeyPair({self.address!r})"
