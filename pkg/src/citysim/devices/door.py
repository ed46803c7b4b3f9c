"""Fingerprint door with armed security mode.

Templates are opaque exact-match tokens; a match opens the door and
arms a 5 s auto-close timer.  While the system is armed, a presence
reading under 10 cm raises the thief alarm; a smoke reading over the
threshold raises the fire alarm and opens the window regardless of the
armed flag.  The window never closes on its own.
"""

from __future__ import annotations

import logging

from ..errors import DuplicateTemplateError, OutOfRangeError, StoreFullError
from ..kernel import STIMULUS, TIMER_EXPIRY, Kernel, Payload

log = logging.getLogger(__name__)

STORE_CAPACITY = 1024
DOOR_OPEN_MS = 5000
PRESENCE_RANGE_CM = 10.0
SMOKE_THRESHOLD_DEFAULT = 400


class DoorSecurity:
    DEVICE_ID = "door"

    def __init__(self, kernel: Kernel, telemetry,
                 smoke_threshold: int = SMOKE_THRESHOLD_DEFAULT):
        if not 0 <= smoke_threshold <= 1023:
            raise OutOfRangeError(f"smoke_threshold {smoke_threshold} outside 0..1023")
        self.kernel = kernel
        self.telemetry = telemetry
        self.smoke_threshold = smoke_threshold
        self.templates: dict[int, str] = {}
        self.door = "CLOSED"
        self.window = "CLOSED"
        self.armed = False
        self.thief_alarm = False
        self.fire_alarm = False
        self.door_close_at = None

    @property
    def alarm(self) -> str:
        return "ON" if self.thief_alarm or self.fire_alarm else "OFF"

    def handle_event(self, event) -> None:
        key = (event.payload.kind, event.payload.name)
        data = event.payload.data
        if key == (STIMULUS, "enroll"):
            self.enroll_fingerprint(data["template"])
        elif key == (STIMULUS, "verify"):
            self.verify_fingerprint(data["template"])
        elif key == (STIMULUS, "arm"):
            self.set_armed(bool(data["armed"]))
        elif key == (STIMULUS, "presence-sample"):
            self.on_presence_sample(data["distance_cm"])
        elif key == (STIMULUS, "smoke-sample"):
            self.on_smoke_sample(data["value"])
        elif key == (TIMER_EXPIRY, "door-close"):
            self._on_close_expiry(data["expected"])
        else:
            log.warning("door: unhandled payload %s/%s", *key)

    def _alarm_row(self) -> None:
        self.telemetry.record(
            "home_alarm",
            thief_alarm="ON" if self.thief_alarm else "OFF",
            fire_alarm="ON" if self.fire_alarm else "OFF",
        )

    def enroll_fingerprint(self, template: str) -> int:
        if template in self.templates.values():
            raise DuplicateTemplateError("template already enrolled")
        if len(self.templates) >= STORE_CAPACITY:
            raise StoreFullError(f"fingerprint store holds {STORE_CAPACITY} ids")
        free = next(i for i in range(1, STORE_CAPACITY + 1) if i not in self.templates)
        self.templates[free] = template
        return free

    def verify_fingerprint(self, template: str):
        """Return the matching id and open the door, or None when denied."""
        match = None
        for fid, stored in self.templates.items():
            if stored == template:
                match = fid
                break
        if match is None:
            self.telemetry.record("door", result="denied")
            return None
        self.door = "OPEN"
        self.door_close_at = self.kernel.now() + DOOR_OPEN_MS
        self.kernel.schedule(
            self.door_close_at, self.DEVICE_ID,
            Payload(TIMER_EXPIRY, "door-close", {"expected": self.door_close_at}),
        )
        self.telemetry.record("door", result="open")
        return match

    def _on_close_expiry(self, expected: int) -> None:
        if self.door_close_at != expected:
            return  # a newer match extended the interval
        self.door = "CLOSED"
        self.door_close_at = None

    def set_armed(self, flag: bool) -> None:
        self.armed = flag
        if not flag:
            self.thief_alarm = False
            self.fire_alarm = False

    def on_presence_sample(self, distance_cm: float) -> None:
        if distance_cm < 0:
            raise OutOfRangeError(f"distance {distance_cm} cm is negative")
        if self.armed and distance_cm < PRESENCE_RANGE_CM:
            self.thief_alarm = True
            self._alarm_row()

    def on_smoke_sample(self, value: int) -> None:
        if not 0 <= value <= 1023:
            raise OutOfRangeError(f"smoke sample {value} outside 0..1023")
        if value > self.smoke_threshold:
            self.fire_alarm = True
            self.window = "OPEN"
            self._alarm_row()

    def snapshot(self) -> dict:
        return {
            "state": self.door,
            "window": self.window,
            "armed": self.armed,
            "alarm": self.alarm,
            "thief_alarm": "ON" if self.thief_alarm else "OFF",
            "fire_alarm": "ON" if self.fire_alarm else "OFF",
            "enrolled": len(self.templates),
        }
