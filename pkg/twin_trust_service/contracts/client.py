from __future__ import annotations

import logging

from ..encoding import FieldReader
from ..errors import TransactionReverted
from ..keys import Address
from ..ledger.types import sign_transaction
from . import codec
from .registry import LogsRegistry
from .types import StorageMode

logger = logging.getLogger(__name__)


class RegistryReader:
    """Registry reads against one node's canonical chain."""

    def __init__(self, node, address):
        self.node = node
        self.address = address

    def mode(self):
        return self.node.chain.read_state(lambda state: state.host.registry(self.address).mode)

    def registry(self, confirmations=1):
        """
        The registry as of ``confirmations``. Logs mode is rebuilt from a log
        query on every read, the way an off-chain reader consumes events.
        """
        registry = self.node.chain.read_state(
            lambda state: state.host.registry(self.address), confirmations
        )
        if registry.mode is StorageMode.LOGS:
            entries = self.node.query_logs(emitter=self.address, confirmations=confirmations)
            return LogsRegistry.from_logs(self.address, entries)
        return registry

    def _read(self, reader, confirmations):
        registry = self.registry(confirmations)
        if registry.mode is StorageMode.LOGS:
            return reader(registry)
        return self.node.chain.read_state(lambda _: reader(registry), confirmations)

    def get_digital_twin(self, caller, index, confirmations=1):
        return self._read(lambda r: r.get_digital_twin(caller, index), confirmations)

    def lookup_twin(self, twin_id, confirmations=1):
        return self._read(lambda r: r.lookup_twin(twin_id), confirmations)

    def validate_access(self, trustee, twin_id, now, confirmations=1):
        return self._read(lambda r: r.validate_access(trustee, twin_id, now), confirmations)

    def active_trusts(self, confirmations=1):
        return self._read(lambda r: r.active_trusts(), confirmations)


class RegistryClient:
    """
    Signs registry calls for one account, submits them to a network and
    mines until they are confirmed.
    """

    def __init__(self, network, keypair, address=None, confirmations=1, raise_on_revert=False):
        self.network = network
        self.keypair = keypair
        self.address = address
        self.confirmations = confirmations
        self.raise_on_revert = raise_on_revert

    @property
    def account(self):
        return self.keypair.address

    def for_account(self, keypair):
        return RegistryClient(
            self.network, keypair, self.address, self.confirmations, self.raise_on_revert
        )

    def reader(self, node=None):
        return RegistryReader(node or self.network.primary, self.address)

    def sign(self, payload, target):
        nonce = self.network.next_nonce(self.account)
        return sign_transaction(self.keypair, target, payload, nonce)

    def submit_call(self, call):
        return self.network.submit(self.sign(codec.encode_call(call), self.address))

    def _transact(self, tx):
        tx_id = self.network.submit(tx)
        (receipt,) = self.network.wait_for([tx_id], self.confirmations)
        if not receipt.succeeded:
            logger.info("transaction %s reverted: %s", tx_id.hex()[:12], receipt.error)
            if self.raise_on_revert:
                raise TransactionReverted(receipt)
        return receipt

    def deploy_registry(self, mode):
        """Deploy a registry in ``mode``; this client then targets it."""
        receipt = self._transact(self.sign(codec.encode_deploy(mode), None))
        self.address = Address(receipt.output)
        return self.address, receipt.gas_used

    def call(self, call):
        return self._transact(self.sign(codec.encode_call(call), self.address))

    def set_digital_twin(self, config):
        return self.call(codec.SetDigitalTwin(config))

    def register_trust(self, trustee, twin_id):
        return self.call(codec.RegisterTrust(self.account, trustee, twin_id))

    def transfer_property(self, twin_id, new_trustee):
        return self.call(codec.TransferProperty(self.account, twin_id, new_trustee))

    def revoke_trust(self, twin_id):
        return self.call(codec.RevokeTrust(self.account, twin_id))

    def store_trust_hashes(self, trustee, twin_id):
        return self.call(codec.StoreTrustHashes(self.account, trustee, twin_id))


def twin_index(receipt):
    """Index returned by a successful ``set_digital_twin`` receipt."""
    reader = FieldReader(receipt.output)
    index = reader.read_uint()
    reader.finish()
    return index
