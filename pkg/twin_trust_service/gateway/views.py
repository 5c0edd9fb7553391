"""
Data view rendering.

JSON schema::

    {"twin_id": str, "format": "JSON", "streaming_period": int,
     "window": {"start": int, "end": int},
     "samples": [{"timestamp": int, "value": float}, ...]}

XML schema::

    <view twin_id=".." format="XML" streaming_period=".." start=".." end="..">
      <sample timestamp="..">value</sample>
    </view>
"""
from __future__ import annotations

import json
import xml.etree.ElementTree as ET
from dataclasses import dataclass, field
from typing import Tuple

from ..contracts.types import ViewFormat
from ..errors import EmptyWindow, MalformedMessage

MIMETYPES = {
    ViewFormat.JSON: "application/json",
    ViewFormat.XML: "application/xml",
}


def select_samples(samples, view, start, end, anchor=None):
    """Samples on the view's period, counted from ``anchor`` (the window start by default)."""
    if start > end:
        raise EmptyWindow(f"window start {start} is after its end {end}")
    if not view.active:
        return []
    anchor = start if anchor is None else anchor
    return [
        sample
        for sample in samples
        if start <= sample.timestamp <= end
        and (sample.timestamp - anchor) % view.streaming_period == 0
    ]


@dataclass(frozen=True)
class DataViewPayload:
    twin_id: str
    view_format: ViewFormat
    streaming_period: int
    window: Tuple[int, int]
    samples: Tuple[Tuple[int, float], ...] = field(default=())

    granted = True

    @property
    def mimetype(self):
        return MIMETYPES[self.view_format]

    def render(self):
        if self.view_format is ViewFormat.XML:
            return self._render_xml()
        return json.dumps(
            {
                "twin_id": self.twin_id,
                "format": self.view_format.value,
                "streaming_period": self.streaming_period,
                "window": {"start": self.window[0], "end": self.window[1]},
                "samples": [
                    {"timestamp": timestamp, "value": value} for timestamp, value in self.samples
                ],
            },
            sort_keys=True,
        ).encode()

    def _render_xml(self):
        root = ET.Element(
            "view",
            twin_id=self.twin_id,
            format=self.view_format.value,
            streaming_period=str(self.streaming_period),
            start=str(self.window[0]),
            end=str(self.window[1]),
        )
        for timestamp, value in self.samples:
            ET.SubElement(root, "sample", timestamp=str(timestamp)).text = repr(value)
        return ET.tostring(root, encoding="utf-8")

    @classmethod
    def parse(cls, body, view_format=ViewFormat.JSON):
        try:
            if view_format is ViewFormat.XML:
                root = ET.fromstring(body)
                return cls(
                    twin_id=root.get("twin_id"),
                    view_format=ViewFormat.XML,
                    streaming_period=int(root.get("streaming_period")),
                    window=(int(root.get("start")), int(root.get("end"))),
                    samples=tuple(
                        (int(node.get("timestamp")), float(node.text))
                        for node in root.iter("sample")
                    ),
                )
            data = json.loads(body)
            return cls(
                twin_id=data["twin_id"],
                view_format=ViewFormat(data["format"]),
                streaming_period=int(data["streaming_period"]),
                window=(int(data["window"]["start"]), int(data["window"]["end"])),
                samples=tuple(
                    (int(sample["timestamp"]), float(sample["value"]))
                    for sample in data["samples"]
                ),
            )
        except (ET.ParseError, KeyError, TypeError, ValueError) as e:
            raise MalformedMessage(f"cannot parse {view_format.value} view: {e}") from e


def build_payload(twin_id, samples, view, start, end, anchor=None):
    selected = select_samples(samples, view, start, end, anchor)
    return DataViewPayload(
        twin_id=twin_id,
        view_format=view.view_format,
        streaming_period=view.streaming_period,
        window=(start, end),
        samples=tuple((sample.timestamp, sample.value) for sample in selected),
    )


def render_view(samples, view, window, twin_id="", anchor=None):
    start, end = window
    return build_payload(twin_id, samples, view, start, end, anchor).render()
