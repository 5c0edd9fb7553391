"""
Signed-nonce credentials presented by trustees.

A credential is an Ed25519 signature over (twin_id, nonce, timestamp). It is
accepted while its timestamp is within the replay window of the twin's clock,
and each nonce is accepted once per window.
"""
from __future__ import annotations

import logging
import secrets
import threading
from dataclasses import dataclass

from ..encoding import encode_fields
from ..errors import BadCredential
from ..keys import Address, verify_signature

logger = logging.getLogger(__name__)

_CREDENTIAL_DOMAIN = b"twin-trust/credential"

KEY_HEADER = "X-Trustee-Key"
NONCE_HEADER = "X-Twin-Nonce"
TIMESTAMP_HEADER = "X-Twin-Timestamp"
SIGNATURE_HEADER = "X-Twin-Signature"


def credential_message(twin_id, nonce, timestamp):
    return encode_fields(_CREDENTIAL_DOMAIN, twin_id, nonce, timestamp)


@dataclass(frozen=True)
class TrusteeCredential:
    public_key: bytes
    nonce: str
    timestamp: int
    signature: bytes

    @property
    def address(self):
        return Address.from_public_key(self.public_key)

    @classmethod
    def issue(cls, keypair, twin_id, timestamp, nonce=None):
        nonce = nonce or secrets.token_hex(8)
        return cls(
            public_key=keypair.public_key,
            nonce=nonce,
            timestamp=int(timestamp),
            signature=keypair.sign(credential_message(twin_id, nonce, int(timestamp))),
        )

    def to_headers(self):
        return {
            KEY_HEADER: self.public_key.hex(),
            NONCE_HEADER: self.nonce,
            TIMESTAMP_HEADER: str(self.timestamp),
            SIGNATURE_HEADER: self.signature.hex(),
        }

    @classmethod
    def from_headers(cls, headers):
        try:
            return cls(
                public_key=bytes.fromhex(headers[KEY_HEADER]),
                nonce=headers[NONCE_HEADER],
                timestamp=int(headers[TIMESTAMP_HEADER]),
                signature=bytes.fromhex(headers[SIGNATURE_HEADER]),
            )
        except (KeyError, TypeError, ValueError) as e:
            raise BadCredential(f"missing or malformed credential headers: {e}") from e


class CredentialVerifier:
    def __init__(self, clock, replay_window=60):
        self.clock = clock
        self.replay_window = replay_window
        self._seen = {}
        self._lock = threading.Lock()

    def verify(self, credential, twin_id):
        """The trustee address behind ``credential``; raises BadCredential."""
        message = credential_message(twin_id, credential.nonce, credential.timestamp)
        if not verify_signature(credential.public_key, credential.signature, message):
            raise BadCredential("credential signature does not verify")
        now = self.clock.now()
        if abs(now - credential.timestamp) > self.replay_window:
            raise BadCredential(
                f"credential timestamp {credential.timestamp} outside the replay window at {now}"
            )
        key = (credential.public_key, credential.nonce)
        with self._lock:
            self._forget_before(now - self.replay_window)
            if key in self._seen:
                raise BadCredential(f"nonce {credential.nonce} already used")
            self._seen[key] = credential.timestamp
        return credential.address

    def _forget_before(self, cutoff):
        for key in [key for key, timestamp in self._seen.items() if timestamp < cutoff]:
            del self._seen[key]
