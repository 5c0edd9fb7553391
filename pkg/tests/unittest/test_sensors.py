import math
import unittest

import numpy as np

from twin_trust_service.errors import BadWindow, DuplicateId, UnknownResource
from twin_trust_service.sensors import (
    WALK_CACHED_CHUNKS,
    WALK_CHUNK,
    WALK_SPAN,
    ResourceSpec,
    SensorFleet,
    VirtualResource,
    Waveform,
)


class TestVirtualResource(unittest.TestCase):
    def test_constant(self):
        resource = VirtualResource(ResourceSpec("c", Waveform.CONSTANT, base=20.0, tick=10))
        samples = resource.read_window(0, 50)
        self.assertEqual([s.timestamp for s in samples], [0, 10, 20, 30, 40, 50])
        self.assertTrue(all(s.value == 20.0 for s in samples))

    def test_sinusoid(self):
        spec = ResourceSpec("s", Waveform.SINUSOID, base=40.0, amplitude=15.0, tick=60, cycle=240)
        values = [s.value for s in VirtualResource(spec).read_window(0, 180)]
        expected = [40.0, 55.0, 40.0, 25.0]
        for value, wanted in zip(values, expected):
            self.assertAlmostEqual(value, wanted)

    def test_same_seed_same_stream(self):
        spec = ResourceSpec("w", Waveform.RANDOM_WALK, base=20.0, amplitude=0.5, tick=1, seed=3)
        first = VirtualResource(spec).read_window(0, 99)
        second = VirtualResource(spec).read_window(0, 99)
        self.assertEqual(len(first), 100)
        self.assertEqual(first, second)

    def test_walk_ignores_query_order(self):
        spec = ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=5)
        forward = VirtualResource(spec)
        forward.read_window(0, 10)
        late = forward.read_window(3000, 3005)
        backward = VirtualResource(spec)
        self.assertEqual(backward.read_window(3000, 3005), late)

    def test_different_seeds_differ(self):
        a = VirtualResource(ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=1))
        b = VirtualResource(ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=2))
        self.assertNotEqual(a.read_window(1, 20), b.read_window(1, 20))

    def test_window_between_ticks(self):
        resource = VirtualResource(ResourceSpec("c", tick=10))
        self.assertEqual(resource.read_window(11, 19), [])
        self.assertEqual([s.timestamp for s in resource.read_window(5, 25)], [10, 20])

    def test_origin(self):
        resource = VirtualResource(ResourceSpec("c", tick=10, origin=5))
        self.assertEqual([s.timestamp for s in resource.read_window(0, 30)], [5, 15, 25])

    def test_reversed_window(self):
        with self.assertRaises(BadWindow):
            VirtualResource(ResourceSpec("c")).read_window(50, 0)

    def test_read_at(self):
        resource = VirtualResource(ResourceSpec("c", base=1.5, tick=10))
        samples = resource.read_at([0, 15, 20, 600])
        self.assertEqual([s.timestamp for s in samples], [0, 20, 600])

    def test_read_at_unordered(self):
        with self.assertRaises(BadWindow):
            VirtualResource(ResourceSpec("c", tick=10)).read_at([20, 10])

    def test_read_at_matches_window(self):
        spec = ResourceSpec("w", Waveform.RANDOM_WALK, tick=10, seed=9)
        window = VirtualResource(spec).read_window(0, 200)
        picked = VirtualResource(spec).read_at([0, 60, 120, 180])
        self.assertEqual(picked, [s for s in window if s.timestamp % 60 == 0])

    def test_bad_tick(self):
        with self.assertRaises(ValueError):
            ResourceSpec("c", tick=0)

    def test_values_are_finite(self):
        spec = ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=4)
        self.assertTrue(all(math.isfinite(s.value) for s in VirtualResource(spec).read_window(0, 5000)))


class TestRandomWalkMemory(unittest.TestCase):
    spec = ResourceSpec("thermo", Waveform.RANDOM_WALK, base=20.0, amplitude=0.1, tick=10, seed=11)

    def test_read_at_unix_time(self):
        resource = VirtualResource(self.spec)
        (sample,) = resource.read_at([1_700_000_000])
        self.assertTrue(math.isfinite(sample.value))
        self.assertEqual(resource.cached_chunks, 1)
        self.assertEqual(VirtualResource(self.spec).read_at([1_700_000_000]), [sample])

    def test_window_at_unix_time(self):
        resource = VirtualResource(self.spec)
        samples = resource.read_window(1_700_000_000, 1_700_000_600)
        self.assertEqual(len(samples), 61)
        self.assertLessEqual(resource.cached_chunks, 2)
        self.assertEqual(resource.read_at([1_700_000_300])[0], samples[30])

    def test_chunk_cache_is_bounded(self):
        resource = VirtualResource(ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=2))
        resource.read_at([i * WALK_CHUNK for i in range(WALK_CACHED_CHUNKS + 36)])
        self.assertEqual(resource.cached_chunks, WALK_CACHED_CHUNKS)

    def test_steps_keep_their_scale(self):
        resource = VirtualResource(ResourceSpec("w", Waveform.RANDOM_WALK, tick=1, seed=6))
        values = np.array([s.value for s in resource.read_window(0, 5 * WALK_CHUNK)])
        self.assertAlmostEqual(float(np.std(np.diff(values))), 1.0, delta=0.05)

    def test_walk_ends(self):
        resource = VirtualResource(ResourceSpec("w", Waveform.RANDOM_WALK, tick=1))
        with self.assertRaises(BadWindow):
            resource.read_at([WALK_SPAN])


class TestSensorFleet(unittest.TestCase):
    def setUp(self):
        self.fleet = SensorFleet()
        self.fleet.spawn(ResourceSpec("meter", base=3.0))

    def test_duplicate_id(self):
        with self.assertRaises(DuplicateId):
            self.fleet.spawn(ResourceSpec("meter"))
        self.assertEqual(len(self.fleet), 1)

    def test_unknown_resource(self):
        with self.assertRaises(UnknownResource):
            self.fleet.read_window("nope", 0, 10)

    def test_read(self):
        self.assertIn("meter", self.fleet)
        self.assertEqual(len(self.fleet.read_window("meter", 0, 50)), 6)
        self.assertEqual(self.fleet.read_at("meter", [10])[0].value, 3.0)

    def test_from_settings(self):
        fleet = SensorFleet.from_settings(
            [{"resource_id": "a", "waveform": "sinusoid", "tick": 60}, ResourceSpec("b")]
        )
        self.assertEqual(fleet.get("a").spec.waveform, Waveform.SINUSOID)
        self.assertIn("b", fleet)
