"""
Registry definitions per storage mode.

Both modes declare the same functions. Variables mode adds its state layout
(one declaration per slot-backed field, each carrying its accessor code);
Logs mode adds event declarations instead.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

from ..encoding import hash256
from .types import StorageMode

FUNCTION = "function"
STATE = "state"
EVENT = "event"

FUNCTION_BYTES = 32
PARAM_BYTES = 32
STATE_FIELD_BYTES = 160
EVENT_BYTES = 32


@dataclass(frozen=True)
class Declaration:
    kind: str
    name: str
    params: Tuple[str, ...] = ()

    @property
    def size(self):
        if self.kind == STATE:
            return STATE_FIELD_BYTES
        base = FUNCTION_BYTES if self.kind == FUNCTION else EVENT_BYTES
        return base + PARAM_BYTES * len(self.params)

    @property
    def signature(self):
        return f"{self.name}({','.join(self.params)})"

    @property
    def topic(self):
        return hash256(self.signature.encode("utf-8"))


FUNCTIONS = (
    Declaration(
        FUNCTION,
        "setDigitalTwin",
        (
            "twin_id",
            "twin_settlor",
            "twin_trustee",
            "streaming_start",
            "streaming_end",
            "streaming_view",
        ),
    ),
    Declaration(FUNCTION, "getDigitalTwin", ("index",)),
    Declaration(FUNCTION, "registerTrust", ("t_settlor", "t_trustee", "twin")),
    Declaration(FUNCTION, "transferProperty", ("t_settlor", "twin", "new_trustee")),
    Declaration(FUNCTION, "revokeTrust", ("t_settlor", "twin")),
    Declaration(FUNCTION, "validateAccess", ("t_trustee", "twin", "now")),
    Declaration(FUNCTION, "storeTrustHashes", ("t_settlor", "t_trustee", "twin_hash")),
)

VARIABLES_STATE = tuple(
    Declaration(STATE, name)
    for name in (
        "DigitalTwin.twin_id",
        "DigitalTwin.twin_settlor",
        "DigitalTwin.twin_trustee",
        "DigitalTwin.streaming_start",
        "DigitalTwin.streaming_end",
        "DigitalTwin.streaming_view",
        "TwinAccessStruct.twin",
        "TwinAccessStruct.t_settlor",
        "TwinAccessStruct.t_trustee",
        "TrustRecord.settlor_hash",
        "TrustRecord.trustee_hash",
        "TrustRecord.twin_hash",
        "digital_twins_farm.length",
    )
)

TWIN_REGISTRATION = Declaration(
    EVENT,
    "EventDigitalTwinRegistration",
    (
        "twin_id",
        "t_settlor",
        "t_trustee",
        "streaming_start",
        "streaming_end",
        "streaming_view",
    ),
)
ACCESS_REGISTRATION = Declaration(
    EVENT, "EventTwinAccessRegistration", ("twin", "t_settlor", "t_trustee")
)
PROPERTY_TRANSFER = Declaration(
    EVENT, "EventTwinPropertyTransfer", ("twin", "t_settlor", "t_trustee")
)
ACCESS_REVOCATION = Declaration(
    EVENT, "EventTwinAccessRevocation", ("twin", "t_settlor", "t_trustee")
)
# Anonymous: its three topics are all data, none is a signature.
TRUST_RECORD = Declaration(EVENT, "TrustRecord", ("settlor_hash", "trustee_hash", "twin_hash"))

LOGS_EVENTS = (
    TWIN_REGISTRATION,
    ACCESS_REGISTRATION,
    PROPERTY_TRANSFER,
    ACCESS_REVOCATION,
    TRUST_RECORD,
)

DEFINITIONS = {
    StorageMode.VARIABLES: FUNCTIONS + VARIABLES_STATE,
    StorageMode.LOGS: FUNCTIONS + LOGS_EVENTS,
}


def definition_size(mode):
    return sum(declaration.size for declaration in DEFINITIONS[StorageMode(mode)])
