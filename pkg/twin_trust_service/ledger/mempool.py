from __future__ import annotations

import threading
from collections import OrderedDict

from ..errors import NonceGap, StaleNonce


class Mempool:
    """Pending transactions in submission order."""

    def __init__(self):
        self._pending = OrderedDict()
        self._next_nonce = {}
        self._lock = threading.Lock()

    def __len__(self):
        with self._lock:
            return len(self._pending)

    def __contains__(self, tx_id):
        with self._lock:
            return tx_id in self._pending

    def next_nonce(self, sender, state_nonce):
        with self._lock:
            return self._next_nonce.get(sender, state_nonce)

    def add(self, tx, state_nonce):
        with self._lock:
            tx_id = tx.tx_id
            if tx_id in self._pending:
                return tx_id
            expected = self._next_nonce.get(tx.sender, state_nonce)
            if tx.nonce < expected:
                raise StaleNonce(f"nonce {tx.nonce} already used, next is {expected}")
            if tx.nonce > expected:
                raise NonceGap(f"nonce {tx.nonce} skips ahead of {expected}")
            self._pending[tx_id] = tx
            self._next_nonce[tx.sender] = expected + 1
            return tx_id

    def select(self, limit):
        with self._lock:
            selected = []
            for tx in self._pending.values():
                if len(selected) >= limit:
                    break
                selected.append(tx)
            return selected

    def discard_included(self, transactions, nonces):
        with self._lock:
            for tx in transactions:
                self._pending.pop(tx.tx_id, None)
            stale = [
                tx_id
                for tx_id, tx in self._pending.items()
                if tx.nonce < nonces.get(tx.sender, 0)
            ]
            for tx_id in stale:
                del self._pending[tx_id]
            for sender, nonce in nonces.items():
                if self._next_nonce.get(sender, 0) < nonce:
                    self._next_nonce[sender] = nonce

    def rebuild(self, nonces, extra=()):
        """
        Drop what the new state already includes and re-admit ``extra``
        (transactions from blocks a reorg abandoned) ahead of the rest.
        """
        with self._lock:
            candidates = list(extra) + list(self._pending.values())
            candidates.sort(key=lambda tx: tx.nonce)
            self._pending.clear()
            self._next_nonce.clear()
            for tx in candidates:
                expected = self._next_nonce.get(tx.sender, nonces.get(tx.sender, 0))
                if tx.nonce != expected or tx.tx_id in self._pending:
                    continue
                self._pending[tx.tx_id] = tx
                self._next_nonce[tx.sender] = expected + 1
