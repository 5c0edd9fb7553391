"""
In-process message bus and the simulated multi-node network.
"""
from __future__ import annotations

import logging
import random
import threading
from collections import deque
from dataclasses import dataclass

from ..errors import LedgerError
from .genesis import Genesis
from .node import Node

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Envelope:
    source: int
    destination: int
    kind: str
    body: bytes


class MessageBus:
    """
    FIFO delivery between registered nodes. A seed turns on deterministic
    reordering; partitions drop messages between the named node pairs.
    """

    def __init__(self, seed=None):
        self._nodes = {}
        self._queue = deque()
        self._lock = threading.Lock()
        self._rng = random.Random(seed) if seed is not None else None
        self._partitions = set()

    def register(self, node):
        self._nodes[node.node_id] = node

    def partition(self, a, b):
        self._partitions.add(frozenset((a, b)))

    def heal(self):
        self._partitions.clear()

    def broadcast(self, source, kind, body):
        with self._lock:
            for node_id in self._nodes:
                if node_id != source:
                    self._queue.append(Envelope(source, node_id, kind, body))

    def send(self, source, destination, kind, body):
        with self._lock:
            self._queue.append(Envelope(source, destination, kind, body))

    @property
    def pending(self):
        with self._lock:
            return len(self._queue)

    def _next(self):
        with self._lock:
            if not self._queue:
                return None
            if self._rng is not None and len(self._queue) > 1:
                self._queue.rotate(-self._rng.randrange(len(self._queue)))
            return self._queue.popleft()

    def deliver_all(self):
        """Deliver until quiescent; returns the number of envelopes handled."""
        delivered = 0
        while True:
            envelope = self._next()
            if envelope is None:
                return delivered
            if frozenset((envelope.source, envelope.destination)) in self._partitions:
                continue
            self._nodes[envelope.destination].handle(envelope.kind, envelope.body)
            delivered += 1


class Network:
    """
    N nodes over one bus. Blocks are produced by one designated miner per
    round, round-robin.
    """

    def __init__(
        self,
        genesis,
        host_factory,
        node_count=None,
        confirmations=3,
        max_block_txs=10,
        clock=None,
        bus_seed=None,
    ):
        count = node_count if node_count is not None else genesis.node_count
        if count < 1:
            raise ValueError("a network needs at least one node")
        self.genesis = genesis
        self.bus = MessageBus(seed=bus_seed)
        self.nodes = [
            Node(
                node_id,
                genesis,
                host_factory,
                bus=self.bus,
                confirmations=confirmations,
                max_block_txs=max_block_txs,
                clock=clock,
            )
            for node_id in range(count)
        ]
        self.confirmations = confirmations
        self._round = 0
        self._round_lock = threading.Lock()

    @classmethod
    def from_settings(cls, settings, host_factory, clock=None):
        genesis_path = settings.get("genesis")
        if genesis_path:
            genesis = Genesis.from_file(genesis_path)
        else:
            genesis = Genesis(
                difficulty=int(settings.get("difficulty", 0)),
                node_count=int(settings.get("node_count", 3)),
            )
        return cls(
            genesis,
            host_factory,
            node_count=int(settings.get("node_count", genesis.node_count)),
            confirmations=int(settings.get("confirmations", 3)),
            max_block_txs=int(settings.get("max_block_txs", 10)),
            clock=clock,
        )

    @property
    def primary(self):
        return self.nodes[0]

    def submit(self, tx, node=0):
        return self.nodes[node % len(self.nodes)].submit_transaction(tx)

    def next_nonce(self, sender):
        return self.primary.next_nonce(sender)

    def mine_round(self):
        """Deliver pending gossip, let this round's miner mine, deliver its block."""
        with self._round_lock:
            miner = self.nodes[self._round % len(self.nodes)]
            self._round += 1
            self.bus.deliver_all()
            block = miner.mine()
            self.bus.deliver_all()
            return block

    def mine_competing(self, node_ids):
        """Several miners build on their own tips before any delivery: a fork."""
        with self._round_lock:
            self.bus.deliver_all()
            blocks = [self.nodes[node_id].mine() for node_id in node_ids]
            self.bus.deliver_all()
            return blocks

    def mine_until(self, predicate, max_rounds=10_000):
        for _ in range(max_rounds):
            if predicate():
                return True
            self.mine_round()
        return predicate()

    def wait_for(self, tx_ids, confirmations=None, max_rounds=10_000):
        """Mine until every transaction has the wanted confirmations; returns receipts."""
        wanted = self.confirmations if confirmations is None else confirmations
        tx_ids = list(tx_ids)

        def confirmed():
            for tx_id in tx_ids:
                found = self.primary.receipt(tx_id)
                if found is None or found[1] < wanted:
                    return False
            return True

        if not self.mine_until(confirmed, max_rounds=max_rounds):
            raise LedgerError(f"transactions not confirmed after {max_rounds} rounds")
        return [self.primary.receipt(tx_id)[0] for tx_id in tx_ids]

    def resync(self):
        """Every node re-announces its canonical chain (after a partition heals)."""
        for node in self.nodes:
            for block in node.chain.canonical()[1:]:
                self.bus.broadcast(node.node_id, "block", block.encode())
        return self.bus.deliver_all()

    def tips(self):
        return [node.chain.tip.hash for node in self.nodes]

    def converged(self):
        return len(set(self.tips())) == 1

    def shutdown(self):
        for node in self.nodes:
            node.shutdown()
