"""
Proof of work: mining and block verification.
"""
from __future__ import annotations

import enum
import hashlib
import logging
from dataclasses import dataclass, replace
from typing import Optional

from ..encoding import HASH_SIZE, MAX_UINT, encode_fields
from ..errors import DecodeError, MiningCancelled
from .types import Block, transactions_root

logger = logging.getLogger(__name__)

# How often the nonce loop polls its cancel flag.
_CANCEL_POLL = 1024


def leading_zero_bits(digest):
    value = int.from_bytes(digest, "big")
    return HASH_SIZE * 8 - value.bit_length()


def meets_difficulty(digest, difficulty):
    return leading_zero_bits(digest) >= difficulty


@dataclass(frozen=True)
class MiningResult:
    block: Block
    attempts: int


def solve(template, cancel=None, start_nonce=0):
    """Search nonces from ``start_nonce`` until the header meets the difficulty."""
    prefix = hashlib.sha256(template.header_prefix())
    difficulty = template.difficulty
    nonce = start_nonce
    attempts = 0
    while nonce <= MAX_UINT:
        if cancel is not None and attempts % _CANCEL_POLL == 0 and cancel.is_set():
            raise MiningCancelled(f"mining at height {template.height} cancelled")
        candidate = prefix.copy()
        candidate.update(encode_fields(nonce))
        attempts += 1
        if meets_difficulty(candidate.digest(), difficulty):
            return MiningResult(replace(template, nonce=nonce), attempts)
        nonce += 1
    raise MiningCancelled("nonce space exhausted")


def build_template(pending, difficulty, parent, timestamp):
    transactions = tuple(pending)
    return Block(
        parent=parent.hash,
        height=parent.height + 1,
        timestamp=max(int(timestamp), parent.timestamp),
        difficulty=difficulty,
        tx_root=transactions_root(transactions),
        transactions=transactions,
    )


def mine_block(pending, difficulty, parent, timestamp, cancel=None):
    """Mine a block on ``parent`` holding ``pending`` in submission order."""
    template = build_template(pending, difficulty, parent, timestamp)
    result = solve(template, cancel=cancel)
    logger.debug(
        "mined height %s after %s attempts (difficulty %s)",
        template.height,
        result.attempts,
        difficulty,
    )
    return result


class RejectReason(str, enum.Enum):
    MALFORMED = "Malformed"
    BAD_PROOF = "BadProof"
    BAD_PARENT = "BadParent"
    BAD_TX_ROOT = "BadTxRoot"
    BAD_SIGNATURE = "BadSignature"
    BAD_NONCE = "BadNonce"
    BAD_DIFFICULTY = "BadDifficulty"
    BAD_TIMESTAMP = "BadTimestamp"


@dataclass(frozen=True)
class Accept:
    accepted = True


@dataclass(frozen=True)
class Reject:
    reason: RejectReason
    detail: str = ""
    accepted = False


def verify_block(block, parent, nonces=None, difficulty=None):
    """
    Check a block against its parent.

    Parameters
    ----------
    block : Block
    parent : Block
    nonces : mapping of Address to next expected nonce, optional
        State at ``parent``. Without it the per-sender nonce sequence is only
        checked for internal consistency.
    difficulty : int, optional
        Expected difficulty; defaults to the parent's.
    """
    try:
        return _verify(block, parent, nonces, difficulty)
    except Exception as e:  # malformed fields must never escape as exceptions
        return Reject(RejectReason.MALFORMED, str(e))


def verify_block_bytes(raw, parent, nonces=None, difficulty=None):
    try:
        block = Block.decode(raw)
    except (DecodeError, ValueError, TypeError) as e:
        return Reject(RejectReason.MALFORMED, str(e))
    return verify_block(block, parent, nonces, difficulty)


def _verify(block, parent, nonces, difficulty):
    expected_difficulty = parent.difficulty if difficulty is None else difficulty
    if block.parent != parent.hash or block.height != parent.height + 1:
        return Reject(RejectReason.BAD_PARENT, f"height {block.height}")
    if block.difficulty != expected_difficulty:
        return Reject(RejectReason.BAD_DIFFICULTY, f"{block.difficulty}")
    if block.timestamp < parent.timestamp:
        return Reject(RejectReason.BAD_TIMESTAMP, f"{block.timestamp}")
    if not meets_difficulty(block.hash, block.difficulty):
        return Reject(RejectReason.BAD_PROOF, block.hash.hex())
    if block.tx_root != transactions_root(block.transactions):
        return Reject(RejectReason.BAD_TX_ROOT)
    expected = {}
    for tx in block.transactions:
        if not tx.has_valid_signature():
            return Reject(RejectReason.BAD_SIGNATURE, tx.tx_id.hex())
        if tx.sender in expected:
            next_nonce = expected[tx.sender]
        elif nonces is not None:
            next_nonce = nonces.get(tx.sender, 0)
        else:
            next_nonce = tx.nonce
        if tx.nonce != next_nonce:
            return Reject(RejectReason.BAD_NONCE, f"{tx.nonce} != {next_nonce}")
        expected[tx.sender] = next_nonce + 1
    return Accept()
