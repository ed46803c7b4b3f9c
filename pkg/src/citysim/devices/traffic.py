"""Four-approach signal scheduler with skip-on-empty, plus plate checks.

Scheduling rule: at each phase boundary scan the roads round-robin
starting after the road that just held green; the first road with a
vehicle waiting gets GREEN for the phase duration and the rest show
RED.  If nobody is waiting all heads go OFF and the scheduler sleeps
until a presence event wakes it.  Presence changes mid-green wait for
the boundary; a green never ends early.

Plate reads consult a normalized registry: registered plates log their
record, unknown or criminal plates latch the alarm.
"""

from __future__ import annotations

import logging

from ..errors import DuplicatePlateError, InvalidRoadError
from ..kernel import STIMULUS, TIMER_EXPIRY, Kernel, Payload

log = logging.getLogger(__name__)

ROADS = (1, 2, 3, 4)
GREEN_MS = 20000


def normalize_plate(plate: str) -> str:
    return " ".join(plate.split()).upper()


class TrafficControl:
    DEVICE_ID = "traffic"

    def __init__(self, kernel: Kernel, telemetry, green_ms: int = GREEN_MS):
        self.kernel = kernel
        self.telemetry = telemetry
        self.green_ms = green_ms
        self.green_override: dict[int, int] = {}  # per-road duration hook
        self.present = {r: False for r in ROADS}
        self.signals = {r: "OFF" for r in ROADS}
        self.green_road = 0  # 0 means no road holds green
        self.phase_end = 0
        self.phase_token = 0
        self.registry: dict[str, dict] = {}
        self.alarm = False
        self.last_plate = None

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind == STIMULUS:
            if payload.name == "approach-presence":
                self.on_approach_presence(payload.data["road"], bool(payload.data["present"]))
            elif payload.name == "plate-read":
                self.on_plate_read(payload.data["road"], payload.data["plate"])
            elif payload.name == "register-plate":
                self.register_plate(payload.data["plate"], payload.data["owner"],
                                    payload.data["status"])
        elif payload.kind == TIMER_EXPIRY and payload.name == "phase-advance":
            if payload.data["token"] == self.phase_token:
                self._decide()
        else:
            log.warning("traffic: unhandled payload %s/%s",
                        payload.kind, payload.name)

    # -- scheduling -------------------------------------------------------

    def _set_signal(self, road: int, signal: str) -> None:
        if self.signals[road] != signal:
            self.signals[road] = signal
            self.telemetry.record("traffic", road=str(road), signal=signal)

    def _duration(self, road: int) -> int:
        return self.green_override.get(road, self.green_ms)

    def _decide(self) -> None:
        """Pick the next green at a phase boundary (or on idle wake)."""
        start = self.green_road % 4 + 1
        chosen = 0
        for offset in range(4):
            road = (start - 1 + offset) % 4 + 1
            if self.present[road]:
                chosen = road
                break
        self.phase_token += 1
        if chosen == 0:
            for road in ROADS:
                self._set_signal(road, "OFF")
            self.phase_end = self.kernel.now()
            return
        for road in ROADS:
            self._set_signal(road, "GREEN" if road == chosen else "RED")
        self.green_road = chosen
        self.phase_end = self.kernel.now() + self._duration(chosen)
        self.kernel.schedule(
            self.phase_end, self.DEVICE_ID,
            Payload(TIMER_EXPIRY, "phase-advance", {"token": self.phase_token}),
        )

    def _idle(self) -> bool:
        return all(s != "GREEN" for s in self.signals.values())

    def on_approach_presence(self, road: int, present: bool) -> None:
        if road not in self.present:
            raise InvalidRoadError(f"road {road} outside 1..4")
        self.present[road] = present
        if present and self._idle():
            self._decide()

    def current_phase(self) -> dict:
        countdown = self.phase_end - self.kernel.now()
        return {
            "signals": {str(r): self.signals[r] for r in ROADS},
            "green": self.green_road if self.signals.get(self.green_road) == "GREEN" else 0,
            "countdown_ms": max(0, countdown),
        }

    # -- plate registry ---------------------------------------------------

    def register_plate(self, plate: str, owner: str, status: str) -> None:
        if status not in ("REGISTERED", "CRIMINAL"):
            raise ValueError(f"status must be REGISTERED or CRIMINAL, got {status!r}")
        key = normalize_plate(plate)
        if key in self.registry:
            raise DuplicatePlateError(f"plate {key!r} already registered")
        self.registry[key] = {"plate": key, "owner": owner, "status": status}

    def on_plate_read(self, road: int, plate: str):
        if road not in self.present:
            raise InvalidRoadError(f"road {road} outside 1..4")
        if not plate or not plate.strip():
            raise ValueError("plate text is empty")
        key = normalize_plate(plate)
        entry = self.registry.get(key)
        if entry is None:
            verdict = "unregistered"
            self.alarm = True
            record = None
        elif entry["status"] == "CRIMINAL":
            verdict = "criminal"
            self.alarm = True
            record = entry
        else:
            verdict = "registered"
            record = entry
        self.last_plate = {"road": road, "plate": key, "verdict": verdict}
        self.telemetry.record("plate", road=str(road), plate=key, verdict=verdict)
        return record

    def snapshot(self) -> dict:
        snap = self.current_phase()
        snap["green_road"] = snap["green"]
        snap["alarm"] = "ON" if self.alarm else "OFF"
        snap["present"] = {str(r): self.present[r] for r in ROADS}
        snap["last_plate"] = dict(self.last_plate) if self.last_plate else None
        return snap
