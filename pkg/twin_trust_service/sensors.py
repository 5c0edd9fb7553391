"""
Simulated constrained devices. Readings are a pure function of the resource
spec and the tick index, so the same seed always yields the same stream.
"""
from __future__ import annotations

import enum
import logging
import math
import threading
from collections import OrderedDict
from dataclasses import dataclass

import numpy as np

from .errors import BadWindow, DuplicateId, UnknownResource

logger = logging.getLogger(__name__)

DAY = 86400
# Random walks are generated in chunks of steps; only recent chunks stay cached.
WALK_CHUNK = 4096
WALK_CACHED_CHUNKS = 64
# Ticks a random walk covers; a power of two multiple of WALK_CHUNK.
WALK_SPAN = 2**48


class Waveform(str, enum.Enum):
    CONSTANT = "constant"
    SINUSOID = "sinusoid"
    RANDOM_WALK = "random-walk"


@dataclass(frozen=True)
class ResourceSpec:
    resource_id: str
    waveform: Waveform = Waveform.CONSTANT
    base: float = 0.0
    amplitude: float = 1.0
    tick: int = 10
    seed: int = 0
    cycle: int = DAY
    origin: int = 0
    unit: str = ""

    def __post_init__(self):
        if self.tick <= 0:
            raise ValueError(f"tick interval must be positive, got {self.tick}")
        if self.cycle <= 0:
            raise ValueError(f"cycle must be positive, got {self.cycle}")

    @classmethod
    def from_dict(cls, data):
        return cls(
            resource_id=data["resource_id"],
            waveform=Waveform(data.get("waveform", Waveform.CONSTANT.value)),
            base=float(data.get("base", 0.0)),
            amplitude=float(data.get("amplitude", 1.0)),
            tick=int(data.get("tick", 10)),
            seed=int(data.get("seed", 0)),
            cycle=int(data.get("cycle", DAY)),
            origin=int(data.get("origin", 0)),
            unit=data.get("unit", ""),
        )


@dataclass(frozen=True)
class SensorSample:
    resource_id: str
    timestamp: int
    value: float


class VirtualResource:
    def __init__(self, spec):
        self.spec = spec
        self._seed = spec.seed % 2**32
        self._chunks = OrderedDict()
        self._lock = threading.Lock()

    @property
    def resource_id(self):
        return self.spec.resource_id

    def _tick_range(self, start, end):
        spec = self.spec
        first = max(0, math.ceil((start - spec.origin) / spec.tick))
        last = math.floor((end - spec.origin) / spec.tick)
        return first, last

    def _draw(self, *key):
        return np.random.default_rng([self._seed, *key]).standard_normal()

    def _walk_at(self, index):
        """
        Unit walk at a chunk boundary, by halving [0, WALK_SPAN] with Brownian
        bridge midpoints. Every midpoint has its own seed, so the value depends
        on nothing but the seed and the index.
        """
        a, b = 0, WALK_SPAN
        wa, wb = 0.0, math.sqrt(WALK_SPAN) * self._draw(1, 0, WALK_SPAN)
        while True:
            if index == a:
                return wa
            if index == b:
                return wb
            m = (a + b) // 2
            wm = (wa + wb) / 2 + math.sqrt((b - a) / 4) * self._draw(0, a, b)
            if index < m:
                b, wb = m, wm
            else:
                a, wa = m, wm

    def _chunk(self, chunk):
        with self._lock:
            cached = self._chunks.get(chunk)
            if cached is not None:
                self._chunks.move_to_end(chunk)
                return cached
        start = chunk * WALK_CHUNK
        w0, w1 = self._walk_at(start), self._walk_at(start + WALK_CHUNK)
        steps = np.random.default_rng([self._seed, 2, chunk]).standard_normal(WALK_CHUNK)
        # iid steps shifted to the bridge's end point
        steps += (w1 - w0 - steps.sum()) / WALK_CHUNK
        values = w0 + np.concatenate(([0.0], np.cumsum(steps[:-1])))
        with self._lock:
            self._chunks[chunk] = values
            while len(self._chunks) > WALK_CACHED_CHUNKS:
                self._chunks.popitem(last=False)
        return values

    def _walk(self, indices):
        if int(indices[-1]) >= WALK_SPAN:
            raise BadWindow(f"random walks end at tick {WALK_SPAN}")
        walk = np.empty(len(indices), dtype=np.float64)
        chunks = indices // WALK_CHUNK
        for chunk in np.unique(chunks):
            picked = chunks == chunk
            walk[picked] = self._chunk(int(chunk))[indices[picked] - chunk * WALK_CHUNK]
        return self.spec.base + self.spec.amplitude * walk

    @property
    def cached_chunks(self):
        return len(self._chunks)

    def values(self, indices):
        spec = self.spec
        if spec.waveform is Waveform.CONSTANT:
            return np.full(len(indices), spec.base, dtype=np.float64)
        if spec.waveform is Waveform.SINUSOID:
            timestamps = spec.origin + indices * spec.tick
            return spec.base + spec.amplitude * np.sin(2 * np.pi * timestamps / spec.cycle)
        if len(indices) == 0:
            return np.empty(0, dtype=np.float64)
        return self._walk(indices)

    def read_at(self, timestamps):
        """Samples at the given timestamps that fall on a tick, in the given order."""
        spec = self.spec
        on_grid = [
            t for t in timestamps if t >= spec.origin and (t - spec.origin) % spec.tick == 0
        ]
        indices = np.array([(t - spec.origin) // spec.tick for t in on_grid], dtype=np.int64)
        if len(indices) and np.any(np.diff(indices) <= 0):
            raise BadWindow("timestamps must be strictly increasing")
        return [
            SensorSample(self.resource_id, int(t), float(value))
            for t, value in zip(on_grid, self.values(indices))
        ]

    def read_window(self, start, end):
        """Samples on every tick in ``[start, end]``, oldest first."""
        if start > end:
            raise BadWindow(f"window start {start} is after its end {end}")
        first, last = self._tick_range(start, end)
        if last < first:
            return []
        indices = np.arange(first, last + 1, dtype=np.int64)
        timestamps = self.spec.origin + indices * self.spec.tick
        return [
            SensorSample(self.resource_id, int(timestamp), float(value))
            for timestamp, value in zip(timestamps, self.values(indices))
        ]


class SensorFleet:
    """The resources a twin host may read; nothing else reaches them."""

    def __init__(self):
        self._resources = {}
        self._lock = threading.Lock()

    @classmethod
    def from_settings(cls, specs):
        fleet = cls()
        for spec in specs or []:
            fleet.spawn(spec if isinstance(spec, ResourceSpec) else ResourceSpec.from_dict(spec))
        return fleet

    def spawn(self, spec):
        with self._lock:
            if spec.resource_id in self._resources:
                raise DuplicateId(f"resource {spec.resource_id} already exists")
            resource = VirtualResource(spec)
            self._resources[spec.resource_id] = resource
        logger.info("spawned %s resource %s", spec.waveform.value, spec.resource_id)
        return resource

    def get(self, resource_id):
        try:
            return self._resources[resource_id]
        except KeyError:
            raise UnknownResource(f"no resource {resource_id}") from None

    def __contains__(self, resource_id):
        return resource_id in self._resources

    def __len__(self):
        return len(self._resources)

    def read_window(self, resource_id, start, end):
        return self.get(resource_id).read_window(start, end)

    def read_at(self, resource_id, timestamps):
        return self.get(resource_id).read_at(timestamps)
