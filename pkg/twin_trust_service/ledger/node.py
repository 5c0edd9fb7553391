from __future__ import annotations

import logging
import threading
from collections import OrderedDict
from concurrent.futures import ThreadPoolExecutor

from ..clock import SystemClock
from ..errors import (
    BadSignature,
    InvalidBlock,
    LedgerError,
    MiningCancelled,
    UnknownAccount,
)
from .chain import AddOutcome, Chain
from .mempool import Mempool
from .pow import mine_block
from .types import Block, Transaction

logger = logging.getLogger(__name__)

TX_MESSAGE = "tx"
BLOCK_MESSAGE = "block"
# Blocks held while their parent is unknown; the oldest is dropped first.
MAX_ORPHANS = 256


class MiningWorker:
    """Runs proof of work on a dedicated thread; ``cancel`` stops the search."""

    def __init__(self, name):
        self._executor = ThreadPoolExecutor(max_workers=1, thread_name_prefix=name)
        self._cancel = threading.Event()

    def submit(self, pending, difficulty, parent, timestamp):
        self._cancel = threading.Event()
        cancel = self._cancel
        return self._executor.submit(
            mine_block, pending, difficulty, parent, timestamp, cancel
        )

    def cancel(self):
        self._cancel.set()

    def shutdown(self):
        self.cancel()
        self._executor.shutdown(wait=True)


class Node:
    """
    A ledger node: one writer applies blocks, readers use chain snapshots.
    """

    def __init__(
        self,
        node_id,
        genesis,
        host_factory,
        bus=None,
        confirmations=3,
        max_block_txs=10,
        clock=None,
        max_orphans=MAX_ORPHANS,
    ):
        self.node_id = node_id
        self.chain = Chain(genesis, host_factory, confirmations=confirmations)
        self.mempool = Mempool()
        self.max_block_txs = max_block_txs
        self.clock = clock or SystemClock()
        self._bus = bus
        self._lock = threading.RLock()
        self._orphans = OrderedDict()
        self.max_orphans = max_orphans
        self._worker = None
        self._mining_height = None
        if bus is not None:
            bus.register(self)

    def __repr__(self):
        return f"Node({self.node_id}, height={self.chain.height})"

    @property
    def difficulty(self):
        return self.chain.difficulty

    @property
    def orphan_count(self):
        with self._lock:
            return len(self._orphans)

    # Transactions

    def submit_transaction(self, tx, gossip=True):
        if not tx.has_valid_signature():
            raise BadSignature(f"signature does not verify for {tx.sender.hex}")
        if not self.chain.admits(tx.sender):
            raise UnknownAccount(f"{tx.sender.hex} is not a genesis account")
        with self._lock:
            tx_id = tx.tx_id
            if tx_id in self.mempool or self.chain.receipt(tx_id) is not None:
                return tx_id
            self.mempool.add(tx, self.chain.next_nonce(tx.sender))
        if gossip and self._bus is not None:
            self._bus.broadcast(self.node_id, TX_MESSAGE, tx.encode())
        return tx_id

    def next_nonce(self, sender):
        with self._lock:
            return self.mempool.next_nonce(sender, self.chain.next_nonce(sender))

    # Blocks

    def _template_inputs(self):
        with self._lock:
            parent = self.chain.tip
            pending = self.mempool.select(self.max_block_txs)
            return pending, parent, self.clock.now()

    def mine(self, cancel=None):
        """Mine one block on the current tip, apply it and gossip it."""
        pending, parent, now = self._template_inputs()
        result = mine_block(pending, self.difficulty, parent, now, cancel=cancel)
        self.receive_block(result.block, gossip=True)
        return result.block

    def mine_async(self):
        """Mine on the worker thread; a competing block at the same height cancels it."""
        if self._worker is None:
            self._worker = MiningWorker(f"miner-{self.node_id}")
        pending, parent, now = self._template_inputs()
        with self._lock:
            self._mining_height = parent.height + 1
        future = self._worker.submit(pending, self.difficulty, parent, now)

        def _done(done):
            with self._lock:
                self._mining_height = None
            try:
                result = done.result()
            except MiningCancelled as e:
                logger.info("node %s: %s", self.node_id, e)
                return
            self.receive_block(result.block, gossip=True)

        future.add_done_callback(_done)
        return future

    def receive_block(self, block, gossip=False):
        with self._lock:
            try:
                result = self.chain.add_block(block)
            except InvalidBlock as e:
                logger.warning(
                    "node %s rejected block at height %s: %s", self.node_id, block.height, e
                )
                return None
            if result.outcome is AddOutcome.ORPHAN:
                self._keep_orphan(block)
                return result
            if result.outcome is AddOutcome.DUPLICATE:
                return result
            if result.changed_tip:
                self._after_tip_change(block, result)
            adopted = [child for child in self._orphans.values() if child.parent == block.hash]
            for child in adopted:
                del self._orphans[child.hash]
        if gossip and self._bus is not None:
            self._bus.broadcast(self.node_id, BLOCK_MESSAGE, block.encode())
        for child in adopted:
            self.receive_block(child)
        return result

    def _keep_orphan(self, block):
        self._orphans[block.hash] = block
        while len(self._orphans) > self.max_orphans:
            _, dropped = self._orphans.popitem(last=False)
            logger.debug(
                "node %s dropped orphan block at height %s", self.node_id, dropped.height
            )

    def _after_tip_change(self, block, result):
        nonces = self.chain.nonces()
        if result.abandoned:
            orphaned = [tx for gone in result.abandoned for tx in gone.transactions]
            self.mempool.rebuild(nonces, extra=orphaned)
        else:
            self.mempool.discard_included(block.transactions, nonces)
        if (
            self._worker is not None
            and self._mining_height is not None
            and self.chain.height >= self._mining_height
        ):
            self._worker.cancel()

    def handle(self, kind, body):
        """Bus delivery; malformed or invalid payloads are logged and dropped."""
        try:
            if kind == TX_MESSAGE:
                self.submit_transaction(Transaction.decode(body), gossip=False)
            elif kind == BLOCK_MESSAGE:
                self.receive_block(Block.decode(body), gossip=False)
            else:
                logger.warning("node %s: unknown message kind %r", self.node_id, kind)
        except LedgerError as e:
            logger.debug("node %s dropped %s message: %s", self.node_id, kind, e)

    # Reads

    def receipt(self, tx_id):
        return self.chain.receipt(tx_id)

    def query_logs(self, emitter=None, topics=(), confirmations=1):
        return self.chain.query_logs(emitter, topics, confirmations)

    def shutdown(self):
        if self._worker is not None:
            self._worker.shutdown()
