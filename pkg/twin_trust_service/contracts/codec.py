"""
Call payloads: one selector byte followed by ``encode_fields`` arguments.

    deploy              00 | mode text
    set_digital_twin    01 | twin_id, settlor, trustee, start, end, period, format code
    register_trust      02 | settlor, trustee, twin_id
    transfer_property   03 | settlor, twin_id, new_trustee
    revoke_trust        04 | settlor, twin_id
    store_trust_hashes  05 | settlor, trustee, twin_id

Golden vectors live in tests/unittest/test_contracts_codec.py.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

from ..encoding import FieldReader, encode_fields
from ..errors import BadCall, DecodeError
from ..keys import Address
from .types import DataView, DigitalTwinConfig, StorageMode, ViewFormat


class Selector(enum.IntEnum):
    DEPLOY = 0
    SET_DIGITAL_TWIN = 1
    REGISTER_TRUST = 2
    TRANSFER_PROPERTY = 3
    REVOKE_TRUST = 4
    STORE_TRUST_HASHES = 5


@dataclass(frozen=True)
class SetDigitalTwin:
    config: DigitalTwinConfig


@dataclass(frozen=True)
class RegisterTrust:
    settlor: Address
    trustee: Address
    twin_id: str


@dataclass(frozen=True)
class TransferProperty:
    settlor: Address
    twin_id: str
    new_trustee: Address


@dataclass(frozen=True)
class RevokeTrust:
    settlor: Address
    twin_id: str


@dataclass(frozen=True)
class StoreTrustHashes:
    settlor: Address
    trustee: Address
    twin_id: str


def _with_selector(selector, *fields):
    return bytes([selector]) + encode_fields(*fields)


def encode_deploy(mode):
    return _with_selector(Selector.DEPLOY, StorageMode(mode).value)


def encode_call(call):
    if isinstance(call, SetDigitalTwin):
        config = call.config
        return _with_selector(
            Selector.SET_DIGITAL_TWIN,
            config.twin_id,
            config.twin_settlor,
            config.twin_trustee,
            config.streaming_start,
            config.streaming_end,
            config.streaming_view.streaming_period,
            config.streaming_view.view_format.code,
        )
    if isinstance(call, RegisterTrust):
        return _with_selector(
            Selector.REGISTER_TRUST, call.settlor, call.trustee, call.twin_id
        )
    if isinstance(call, TransferProperty):
        return _with_selector(
            Selector.TRANSFER_PROPERTY, call.settlor, call.twin_id, call.new_trustee
        )
    if isinstance(call, RevokeTrust):
        return _with_selector(Selector.REVOKE_TRUST, call.settlor, call.twin_id)
    if isinstance(call, StoreTrustHashes):
        return _with_selector(
            Selector.STORE_TRUST_HASHES, call.settlor, call.trustee, call.twin_id
        )
    raise TypeError(f"not a registry call: {call!r}")


def _split(payload):
    if not payload:
        raise BadCall("empty payload")
    try:
        selector = Selector(payload[0])
    except ValueError:
        raise BadCall(f"unknown selector {payload[0]:#04x}") from None
    return selector, FieldReader(payload[1:])


def decode_deploy(payload):
    selector, reader = _split(payload)
    if selector is not Selector.DEPLOY:
        raise BadCall("deployment payload expected")
    try:
        mode = StorageMode(reader.read_text())
        reader.finish()
    except (DecodeError, ValueError) as e:
        raise BadCall(str(e)) from e
    return mode


def decode_call(payload):
    selector, reader = _split(payload)
    try:
        call = _read_call(selector, reader)
        reader.finish()
    except DecodeError as e:
        raise BadCall(str(e)) from e
    return call


def _read_call(selector, reader):
    if selector is Selector.SET_DIGITAL_TWIN:
        twin_id = reader.read_text()
        settlor = Address(reader.read_hash())
        trustee = Address(reader.read_hash())
        start = reader.read_uint()
        end = reader.read_uint()
        period = reader.read_uint()
        view_format = ViewFormat.from_code(reader.read_uint())
        return SetDigitalTwin(
            DigitalTwinConfig(
                twin_id=twin_id,
                twin_settlor=settlor,
                twin_trustee=trustee,
                streaming_start=start,
                streaming_end=end,
                streaming_view=DataView(period, view_format),
            )
        )
    if selector is Selector.REGISTER_TRUST:
        return RegisterTrust(
            Address(reader.read_hash()), Address(reader.read_hash()), reader.read_text()
        )
    if selector is Selector.TRANSFER_PROPERTY:
        return TransferProperty(
            Address(reader.read_hash()), reader.read_text(), Address(reader.read_hash())
        )
    if selector is Selector.REVOKE_TRUST:
        return RevokeTrust(Address(reader.read_hash()), reader.read_text())
    if selector is Selector.STORE_TRUST_HASHES:
        return StoreTrustHashes(
            Address(reader.read_hash()), Address(reader.read_hash()), reader.read_text()
        )
    raise BadCall("deployment payload sent to a contract")
