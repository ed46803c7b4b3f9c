"""Eight-channel street-light controller.

Manual single-byte commands arrive over a serial link; an LDR sample
stream drives the automatic day/night rule; ultrasonic lane sensors
boost individual lamps to HIGH for a hold period and count passing
vehicles on falling edges.
"""

from __future__ import annotations

import logging

from ..errors import OutOfRangeError
from ..kernel import FRAME_DELIVERY, STIMULUS, TIMER_EXPIRY, Kernel, Payload

log = logging.getLogger(__name__)

OFF, DIM, HIGH = "OFF", "DIM", "HIGH"

LDR_THRESHOLD_DEFAULT = 15
DETECT_CM = 100.0
HIGH_HOLD_MS = 5000


class Streetlight:
    DEVICE_ID = "streetlight"
    COMMANDS = frozenset("AHDF012345678")

    def __init__(self, kernel: Kernel, telemetry,
                 ldr_threshold: int = LDR_THRESHOLD_DEFAULT):
        if not 0 <= ldr_threshold <= 1023:
            raise OutOfRangeError(f"ldr_threshold {ldr_threshold} outside 0..1023")
        self.kernel = kernel
        self.telemetry = telemetry
        self.ldr_threshold = ldr_threshold
        self.mode = "MANUAL"
        self.is_night = False
        self.levels: list[str] = [OFF] * 8
        self.high_hold_until: list = [None] * 8
        self.vehicle_count: list[int] = [0] * 8
        self._below: list[bool] = [False] * 8  # last sample under detect range

    # -- event plumbing -------------------------------------------------

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind == FRAME_DELIVERY and payload.name == "serial-byte":
            self.handle_command(payload.data["byte"])
        elif payload.kind == STIMULUS and payload.name == "ldr-sample":
            self.on_ldr_sample(payload.data["value"])
        elif payload.kind == STIMULUS and payload.name == "lane-presence":
            self.on_lane_presence(payload.data["lane"], payload.data["distance_cm"])
        elif payload.kind == TIMER_EXPIRY and payload.name == "high-revert":
            self._on_hold_expiry(payload.data["lane"], payload.data["expected"])
        else:
            log.warning("streetlight: unhandled payload %s/%s",
                        payload.kind, payload.name)

    def _emit_if_changed(self, before: list[str]) -> None:
        if self.levels != before:
            cols = {f"light{i + 1}": self.levels[i] for i in range(8)}
            self.telemetry.record("streetlight", **cols)

    # -- operations ------------------------------------------------------

    def handle_command(self, byte: str) -> None:
        before = list(self.levels)
        if byte == "A":
            self.mode = "AUTOMATIC"
            self.high_hold_until = [None] * 8
            self.levels = [DIM if self.is_night else OFF] * 8
        elif byte == "H":
            self.mode = "MANUAL"
            self.high_hold_until = [None] * 8
            self.levels = [HIGH] * 8
        elif byte == "D":
            self.mode = "MANUAL"
            self.high_hold_until = [None] * 8
            self.levels = [DIM] * 8
        elif byte == "F":
            self.mode = "MANUAL"
            self.high_hold_until = [None] * 8
            self.levels = [OFF] * 8
        elif byte == "0":
            self.mode = "MANUAL"
            self.high_hold_until = [None] * 8
            self.levels = [OFF] * 8
        elif byte in "12345678":
            self.mode = "MANUAL"
            idx = int(byte) - 1
            self.levels[idx] = HIGH
            self.high_hold_until[idx] = None
        else:
            log.warning("streetlight: ignoring unknown command %r", byte)
            return
        self._emit_if_changed(before)

    def on_ldr_sample(self, value: int) -> None:
        if not 0 <= value <= 1023:
            raise OutOfRangeError(f"LDR sample {value} outside 0..1023")
        night = value < self.ldr_threshold
        if night == self.is_night:
            return
        self.is_night = night
        if self.mode != "AUTOMATIC":
            return
        before = list(self.levels)
        self.high_hold_until = [None] * 8
        self.levels = [DIM if night else OFF] * 8
        self._emit_if_changed(before)

    def on_lane_presence(self, lane: int, distance_cm: float) -> None:
        if not 1 <= lane <= 8:
            raise OutOfRangeError(f"lane {lane} outside 1..8")
        if distance_cm < 0:
            raise OutOfRangeError(f"distance {distance_cm} cm is negative")
        idx = lane - 1
        below = distance_cm < DETECT_CM
        if below and not self._below[idx]:
            self.vehicle_count[idx] += 1
        self._below[idx] = below
        if not below:
            return
        if self.mode == "AUTOMATIC" and self.is_night:
            before = list(self.levels)
            hold_until = self.kernel.now() + HIGH_HOLD_MS
            self.levels[idx] = HIGH
            self.high_hold_until[idx] = hold_until
            self.kernel.schedule(
                hold_until, self.DEVICE_ID,
                Payload(TIMER_EXPIRY, "high-revert",
                        {"lane": lane, "expected": hold_until}),
            )
            self._emit_if_changed(before)

    def _on_hold_expiry(self, lane: int, expected: int) -> None:
        idx = lane - 1
        if self.high_hold_until[idx] != expected:
            return  # superseded by a newer detection or a command
        self.high_hold_until[idx] = None
        if self.mode == "AUTOMATIC" and self.is_night:
            before = list(self.levels)
            self.levels[idx] = DIM
            self._emit_if_changed(before)

    def snapshot(self) -> dict:
        snap = {
            "mode": self.mode,
            "is_night": self.is_night,
            "levels": list(self.levels),
            "counts": {str(i + 1): self.vehicle_count[i] for i in range(8)},
        }
        for i in range(8):
            snap[f"light{i + 1}"] = self.levels[i]
        return snap
