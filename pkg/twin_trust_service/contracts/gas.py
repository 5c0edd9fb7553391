"""
Gas schedule and metering.

Only ``tx_base`` and ``log_base`` come from measured network behaviour; the
other entries use the conventional magnitudes of public EVM schedules.
"""
from __future__ import annotations

import enum
from dataclasses import asdict, dataclass, fields


class OpKind(str, enum.Enum):
    TX = "tx"
    LOG = "log"
    SSTORE_SET = "sstore_set"
    SSTORE_UPDATE = "sstore_update"
    DEPLOY = "deploy"


@dataclass(frozen=True)
class GasSchedule:
    tx_base: int = 21000
    log_base: int = 375
    log_topic: int = 375
    log_data_byte: int = 8
    sstore_set: int = 20000
    sstore_update: int = 5000
    deploy_base: int = 32000
    code_byte: int = 200

    def __post_init__(self):
        for item in fields(self):
            value = getattr(self, item.name)
            if not isinstance(value, int) or value <= 0:
                raise ValueError(f"gas schedule entry {item.name} must be a positive integer")

    @classmethod
    def from_dict(cls, overrides=None):
        overrides = dict(overrides or {})
        unknown = set(overrides) - {item.name for item in fields(cls)}
        if unknown:
            raise ValueError(f"unknown gas schedule entries: {sorted(unknown)}")
        return cls(**{key: int(value) for key, value in overrides.items()})

    def to_dict(self):
        return asdict(self)


DEFAULT_SCHEDULE = GasSchedule()


def charge(op_kind, shape=None, schedule=DEFAULT_SCHEDULE):
    """
    Gas units for one operation.

    ``shape`` is ``(topics, data_bytes)`` for a log, a slot count for the
    sstore kinds and a definition size in bytes for a deployment.
    """
    op_kind = OpKind(op_kind)
    if op_kind is OpKind.TX:
        return schedule.tx_base
    if op_kind is OpKind.LOG:
        topics, data_bytes = shape
        return (
            schedule.log_base
            + schedule.log_topic * topics
            + schedule.log_data_byte * data_bytes
        )
    if op_kind is OpKind.SSTORE_SET:
        return schedule.sstore_set * shape
    if op_kind is OpKind.SSTORE_UPDATE:
        return schedule.sstore_update * shape
    return schedule.deploy_base + schedule.code_byte * shape


class GasMeter:
    def __init__(self, schedule=DEFAULT_SCHEDULE):
        self.schedule = schedule
        self.used = 0
        self.charges = []

    def charge(self, op_kind, shape=None):
        amount = charge(op_kind, shape, self.schedule)
        self.used += amount
        self.charges.append((OpKind(op_kind), shape, amount))
        return amount
