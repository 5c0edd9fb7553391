"""
Executes registry transactions for the ledger; one host per ledger state.
"""
from __future__ import annotations

import logging

from ..encoding import encode_fields, hash256
from ..errors import ContractError, UnknownContract
from ..keys import Address
from ..ledger.types import Receipt, ReceiptStatus
from . import codec
from .definitions import definition_size
from .gas import DEFAULT_SCHEDULE, GasMeter, OpKind
from .registry import make_registry

logger = logging.getLogger(__name__)


class ContractHost:
    def __init__(self, schedule=DEFAULT_SCHEDULE):
        self.schedule = schedule
        self._contracts = {}

    @classmethod
    def factory(cls, schedule=DEFAULT_SCHEDULE):
        return lambda: cls(schedule)

    def registry(self, address):
        try:
            return self._contracts[address]
        except KeyError:
            raise UnknownContract(f"no registry at {address.hex}") from None

    def addresses(self):
        return list(self._contracts)

    def apply(self, tx, context):
        return self.execute(tx.sender, tx.target, tx.payload, tx.nonce, tx.tx_id)

    def execute(self, sender, target, payload, nonce=0, tx_id=bytes(32)):
        meter = GasMeter(self.schedule)
        try:
            if target is None:
                return self._deploy(sender, payload, nonce, tx_id, meter)
            meter.charge(OpKind.TX)
            registry = self.registry(target)
            call = codec.decode_call(payload)
            output, logs = registry.execute(sender, call, meter)
        except ContractError as e:
            logger.debug("call from %s reverted: %r", sender.hex[:12], e)
            return Receipt(
                tx_id=tx_id,
                status=ReceiptStatus.REVERTED,
                gas_used=max(meter.used, self.schedule.tx_base),
                error=type(e).__name__,
            )
        return Receipt(
            tx_id=tx_id,
            status=ReceiptStatus.SUCCESS,
            gas_used=meter.used,
            logs=tuple(logs),
            output=output,
        )

    def _deploy(self, sender, payload, nonce, tx_id, meter):
        mode = codec.decode_deploy(payload)
        address = Address.for_contract(sender, nonce)
        meter.charge(OpKind.DEPLOY, definition_size(mode))
        self._contracts[address] = make_registry(mode, address)
        logger.info("deployed %s registry at %s", mode.value, address.hex[:12])
        return Receipt(
            tx_id=tx_id,
            status=ReceiptStatus.SUCCESS,
            gas_used=meter.used,
            output=address.digest,
        )

    def state_root(self):
        return hash256(
            encode_fields(
                *(
                    field
                    for address in sorted(self._contracts)
                    for field in (address, self._contracts[address].state_root())
                )
            )
        )
