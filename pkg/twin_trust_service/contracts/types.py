from __future__ import annotations

import enum
from dataclasses import dataclass, field

from ..errors import BadCall, InvalidWindow
from ..keys import Address


class StorageMode(str, enum.Enum):
    VARIABLES = "Variables"
    LOGS = "Logs"


class ViewFormat(str, enum.Enum):
    JSON = "JSON"
    XML = "XML"

    @property
    def code(self):
        return list(ViewFormat).index(self)

    @classmethod
    def from_code(cls, code):
        try:
            return list(cls)[code]
        except IndexError:
            raise BadCall(f"unknown view format code {code}") from None


DEFAULT_FORMAT = ViewFormat.JSON


@dataclass(frozen=True)
class DataView:
    """A period of 0 marks an inactive view that provisions nothing."""

    streaming_period: int = 0
    view_format: ViewFormat = DEFAULT_FORMAT

    @property
    def active(self):
        return self.streaming_period > 0


@dataclass(frozen=True)
class DigitalTwinConfig:
    twin_id: str
    twin_settlor: Address
    twin_trustee: Address
    streaming_start: int
    streaming_end: int
    streaming_view: DataView = field(default_factory=DataView)

    def validate(self):
        if not self.twin_id:
            raise BadCall("twin_id must not be empty")
        if self.twin_settlor == self.twin_trustee:
            raise BadCall("settlor and trustee must differ")
        if self.streaming_start > self.streaming_end:
            raise InvalidWindow(
                f"streaming_start {self.streaming_start} > streaming_end {self.streaming_end}"
            )

    def with_trustee(self, trustee):
        return DigitalTwinConfig(
            twin_id=self.twin_id,
            twin_settlor=self.twin_settlor,
            twin_trustee=trustee,
            streaming_start=self.streaming_start,
            streaming_end=self.streaming_end,
            streaming_view=self.streaming_view,
        )

    def to_dict(self):
        return {
            "twin_id": self.twin_id,
            "twin_settlor": self.twin_settlor.hex,
            "twin_trustee": self.twin_trustee.hex,
            "streaming_start": self.streaming_start,
            "streaming_end": self.streaming_end,
            "streaming_view": {
                "streaming_period": self.streaming_view.streaming_period,
                "view_format": self.streaming_view.view_format.value,
            },
        }

    @classmethod
    def from_dict(cls, data):
        view = data.get("streaming_view") or {}
        return cls(
            twin_id=data["twin_id"],
            twin_settlor=Address.from_hex(data["twin_settlor"]),
            twin_trustee=Address.from_hex(data["twin_trustee"]),
            streaming_start=int(data["streaming_start"]),
            streaming_end=int(data["streaming_end"]),
            streaming_view=DataView(
                streaming_period=int(view.get("streaming_period", 0)),
                view_format=ViewFormat(view.get("view_format", DEFAULT_FORMAT.value)),
            ),
        )


@dataclass(frozen=True)
class TrustStructure:
    twin: str
    t_settlor: Address
    t_trustee: Address


class DenyReason(str, enum.Enum):
    NO_TRUST = "NoTrust"
    WRONG_TRUSTEE = "WrongTrustee"
    WINDOW_CLOSED = "WindowClosed"


@dataclass(frozen=True)
class Grant:
    config: DigitalTwinConfig
    granted = True


@dataclass(frozen=True)
class Deny:
    reason: DenyReason
    granted = False
