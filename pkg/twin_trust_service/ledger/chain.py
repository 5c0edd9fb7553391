"""
Block tree, canonical chain selection and per-node state.
"""
from __future__ import annotations

import enum
import json
import logging
import threading
from dataclasses import dataclass, field
from typing import Tuple

from ..errors import DecodeError, IncompatibleGenesis, InvalidBlock, TooManyTopics
from .pow import verify_block
from .state import LedgerState
from .types import MAX_TOPICS, Block

logger = logging.getLogger(__name__)


def resolve_fork(chain_a, chain_b):
    """
    Pick the canonical chain: the longer one, ties going to the
    lexicographically smaller tip hash.
    """
    if not chain_a or not chain_b or chain_a[0].hash != chain_b[0].hash:
        raise IncompatibleGenesis("chains do not share a genesis block")
    if len(chain_a) != len(chain_b):
        return chain_a if len(chain_a) > len(chain_b) else chain_b
    return chain_a if chain_a[-1].hash <= chain_b[-1].hash else chain_b


class AddOutcome(str, enum.Enum):
    EXTENDED = "extended"
    REORG = "reorg"
    SIDE = "side"
    DUPLICATE = "duplicate"
    ORPHAN = "orphan"


@dataclass(frozen=True)
class AddResult:
    outcome: AddOutcome
    abandoned: Tuple[Block, ...] = field(default=())

    @property
    def changed_tip(self):
        return self.outcome in (AddOutcome.EXTENDED, AddOutcome.REORG)


class Chain:
    """
    One node's view of the ledger.

    The tip state holds every canonical block; the confirmed state holds the
    blocks with at least ``confirmations`` confirmations (the tip block has
    one). A switch to a competing branch rebuilds both by replaying from
    genesis.
    """

    def __init__(self, genesis, host_factory, confirmations=3):
        if confirmations < 1:
            raise ValueError("confirmations must be at least 1")
        self.genesis = genesis
        self.genesis_block = genesis.block()
        self.difficulty = genesis.difficulty
        self.confirmations = confirmations
        self._host_factory = host_factory
        self._lock = threading.RLock()
        self._blocks = {self.genesis_block.hash: self.genesis_block}
        self._canonical = [self.genesis_block]
        self._receipts = {self.genesis_block.hash: ()}
        self._tx_index = {}
        self._tip_state = self._new_state()
        self._confirmed_state = self._new_state()

    def _new_state(self):
        return LedgerState(self._host_factory(), self.genesis.allocations)

    # Reads

    @property
    def tip(self):
        with self._lock:
            return self._canonical[-1]

    @property
    def height(self):
        return self.tip.height

    def canonical(self):
        """Immutable snapshot of the canonical chain."""
        with self._lock:
            return tuple(self._canonical)

    def get_block(self, block_hash):
        with self._lock:
            return self._blocks.get(block_hash)

    def block_at(self, height):
        with self._lock:
            if 0 <= height < len(self._canonical):
                return self._canonical[height]
            return None

    def receipts(self, block_hash):
        with self._lock:
            return self._receipts.get(block_hash, ())

    def receipt(self, tx_id):
        """(receipt, confirmations) for a canonical transaction, or None."""
        with self._lock:
            location = self._tx_index.get(tx_id)
            if location is None:
                return None
            height, position = location
            block = self._canonical[height]
            depth = len(self._canonical) - height
            return self._receipts[block.hash][position], depth

    def next_nonce(self, sender):
        with self._lock:
            return self._tip_state.nonces.get(sender, 0)

    def nonces(self):
        with self._lock:
            return dict(self._tip_state.nonces)

    def admits(self, sender):
        return self._tip_state.admits(sender)

    def state(self, confirmations=1):
        """
        Ledger state including only blocks with at least ``confirmations``
        confirmations. Callers must treat it as read-only.
        """
        with self._lock:
            if confirmations <= 1:
                return self._tip_state
            if confirmations == self.confirmations:
                return self._confirmed_state
            state = self._new_state()
            for block in self._canonical[1 : self._confirmed_height(confirmations) + 1]:
                state.apply_block(block)
            return state

    def read_state(self, reader, confirmations=1):
        """Run ``reader(state)`` while no block is being applied."""
        with self._lock:
            return reader(self.state(confirmations))

    def state_root(self):
        with self._lock:
            return self._tip_state.state_root()

    def query_logs(self, emitter=None, topics=(), confirmations=1):
        topics = tuple(topics)
        if len(topics) > MAX_TOPICS:
            raise TooManyTopics(f"filters match at most {MAX_TOPICS} topics")
        with self._lock:
            last = self._confirmed_height(confirmations)
            blocks = self._canonical[1 : last + 1]
            receipts = [self._receipts[block.hash] for block in blocks]
        return [
            entry
            for block_receipts in receipts
            for receipt in block_receipts
            for entry in receipt.logs
            if entry.matches(emitter, topics)
        ]

    def _confirmed_height(self, confirmations):
        return max(0, len(self._canonical) - max(confirmations, 1))

    # Writes

    def add_block(self, block):
        with self._lock:
            block_hash = block.hash
            if block_hash in self._blocks:
                return AddResult(AddOutcome.DUPLICATE)
            parent = self._blocks.get(block.parent)
            if parent is None:
                return AddResult(AddOutcome.ORPHAN)
            if parent.hash == self.tip.hash:
                return self._extend(block, parent)
            verdict = verify_block(block, parent, difficulty=self.difficulty)
            if not verdict.accepted:
                raise InvalidBlock(verdict.reason, verdict.detail)
            self._blocks[block_hash] = block
            branch = self._branch_to(block)
            if resolve_fork(self._canonical, branch) is branch:
                return self._switch_to(branch)
            logger.info("side block %s at height %s", block_hash.hex()[:12], block.height)
            return AddResult(AddOutcome.SIDE)

    def _extend(self, block, parent):
        verdict = verify_block(
            block, parent, nonces=self._tip_state.nonces, difficulty=self.difficulty
        )
        if not verdict.accepted:
            raise InvalidBlock(verdict.reason, verdict.detail)
        receipts = self._tip_state.apply_block(block)
        self._blocks[block.hash] = block
        self._receipts[block.hash] = receipts
        self._canonical.append(block)
        for position, tx in enumerate(block.transactions):
            self._tx_index[tx.tx_id] = (block.height, position)
        self._advance_confirmed()
        logger.info(
            "block %s accepted at height %s with %s transactions",
            block.hash.hex()[:12],
            block.height,
            len(block.transactions),
        )
        return AddResult(AddOutcome.EXTENDED)

    def _advance_confirmed(self):
        target = self._confirmed_height(self.confirmations)
        while self._confirmed_state.height < target:
            self._confirmed_state.apply_block(
                self._canonical[self._confirmed_state.height + 1]
            )

    def _branch_to(self, block):
        branch = [block]
        while branch[-1].height > 0:
            branch.append(self._blocks[branch[-1].parent])
        branch.reverse()
        return branch

    def _switch_to(self, branch):
        tip_state = self._new_state()
        receipts = {self.genesis_block.hash: ()}
        try:
            for block in branch[1:]:
                receipts[block.hash] = tip_state.apply_block(block)
        except InvalidBlock:
            self._blocks.pop(branch[-1].hash, None)
            raise
        kept = {block.hash for block in branch}
        abandoned = tuple(block for block in self._canonical if block.hash not in kept)
        confirmed_state = self._new_state()
        self._canonical = list(branch)
        self._tip_state = tip_state
        self._receipts.update(receipts)
        self._tx_index = {
            tx.tx_id: (block.height, position)
            for block in self._canonical
            for position, tx in enumerate(block.transactions)
        }
        self._confirmed_state = confirmed_state
        self._advance_confirmed()
        logger.warning(
            "reorg to %s at height %s, %s blocks abandoned",
            branch[-1].hash.hex()[:12],
            branch[-1].height,
            len(abandoned),
        )
        return AddResult(AddOutcome.REORG, abandoned)

    # Dump and restore

    def dump(self, stream):
        for block in self.canonical():
            stream.write(json.dumps(block.to_dict(), sort_keys=True) + "\n")

    def restore(self, stream):
        """Replay an NDJSON dump; every block is verified and executed again."""
        restored = 0
        for number, line in enumerate(stream):
            line = line.strip()
            if not line:
                continue
            try:
                block = Block.from_dict(json.loads(line))
            except ValueError as e:
                raise DecodeError(f"line {number + 1}: {e}") from e
            if number == 0:
                if block.hash != self.genesis_block.hash:
                    raise IncompatibleGenesis("dump starts from another genesis block")
                continue
            result = self.add_block(block)
            if result.outcome is AddOutcome.ORPHAN:
                raise InvalidBlock("BadParent", f"line {number + 1}")
            restored += 1
        return restored
