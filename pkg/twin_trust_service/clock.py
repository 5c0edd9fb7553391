import threading
import time


class SystemClock:
    def now(self):
        return int(time.time())


class LogicalClock:
    """Shared simulated clock; only the harness advances it."""

    def __init__(self, start=0):
        self._now = int(start)
        self._lock = threading.Lock()

    def now(self):
        with self._lock:
            return self._now

    def advance(self, seconds):
        if seconds < 0:
            raise ValueError("the clock only moves forward")
        with self._lock:
            self._now += int(seconds)
            return self._now

    def set(self, timestamp):
        with self._lock:
            if timestamp < self._now:
                raise ValueError("the clock only moves forward")
            self._now = int(timestamp)
            return self._now
