"""RFID-gated private parking plus a four-slot smart lot.

One gate serves both modes: a whitelisted card or an entry-presence
detection opens it and (re)schedules a close 5 s out.  Slot sensors
drive the per-slot indicator and the availability line on the 16x2
LCD.  Indicator colors follow the source flow: RED marks a free slot,
GREEN an occupied one.
"""

from __future__ import annotations

import logging
import string

from ..errors import InvalidSlotError, MalformedUidError
from ..kernel import STIMULUS, TIMER_EXPIRY, Kernel, Payload

log = logging.getLogger(__name__)

SLOTS = (1, 2, 3, 4)
GATE_OPEN_MS = 5000
LCD_COLS = 16


def _pad(text: str) -> str:
    return text[:LCD_COLS].ljust(LCD_COLS)


class Parking:
    DEVICE_ID = "parking"

    def __init__(self, kernel: Kernel, telemetry):
        self.kernel = kernel
        self.telemetry = telemetry
        self.whitelist: dict[str, str] = {}  # uid -> slot label
        self.gate = "CLOSED"
        self.gate_close_at = None
        self.occupied = {s: False for s in SLOTS}
        self.lcd = [_pad(""), _pad("")]
        self._show_availability()

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind == STIMULUS:
            if payload.name == "card-scan":
                self.on_card_scan(payload.data["uid"])
            elif payload.name == "entry-presence":
                self.on_entry_presence(bool(payload.data["detected"]))
            elif payload.name == "slot-presence":
                self.on_slot_presence(payload.data["slot"], bool(payload.data["occupied"]))
            elif payload.name == "whitelist":
                self.add_card(payload.data["uid"], payload.data["slot"])
        elif payload.kind == TIMER_EXPIRY and payload.name == "gate-close":
            self._on_close_expiry(payload.data["expected"])
        else:
            log.warning("parking: unhandled payload %s/%s",
                        payload.kind, payload.name)

    @staticmethod
    def _check_uid(uid: str) -> str:
        if not uid or any(c not in string.hexdigits for c in uid):
            raise MalformedUidError(f"card uid {uid!r} is not hex text")
        return uid.upper()

    def add_card(self, uid: str, slot_label: str) -> None:
        self.whitelist[self._check_uid(uid)] = str(slot_label)

    def _open_gate(self) -> None:
        self.gate = "OPEN"
        self.gate_close_at = self.kernel.now() + GATE_OPEN_MS
        self.kernel.schedule(
            self.gate_close_at, self.DEVICE_ID,
            Payload(TIMER_EXPIRY, "gate-close", {"expected": self.gate_close_at}),
        )

    def _on_close_expiry(self, expected: int) -> None:
        if self.gate_close_at != expected:
            return
        self.gate = "CLOSED"
        self.gate_close_at = None

    def on_card_scan(self, uid: str) -> bool:
        slot = self.whitelist.get(self._check_uid(uid))
        if slot is None:
            self.lcd = [_pad("Show your card"), _pad("")]
            self.telemetry.record("private_parking", card_result="denied")
            return False
        self._open_gate()
        self.lcd = [_pad("PARK AT"), _pad(slot)]
        self.telemetry.record("private_parking", card_result="open")
        return True

    def on_entry_presence(self, detected: bool) -> None:
        if detected:
            self._open_gate()

    def on_slot_presence(self, slot: int, occupied: bool) -> None:
        if slot not in self.occupied:
            raise InvalidSlotError(f"slot {slot} outside 1..4")
        if self.occupied[slot] == occupied:
            self._show_availability()
            return
        self.occupied[slot] = occupied
        self._show_availability()
        self.telemetry.record("smart_parking", slot=str(slot),
                              occupied="true" if occupied else "false")

    def _show_availability(self) -> None:
        self.lcd = [_pad("AVAILABLE SLOTS:"), _pad(str(self.available()))]

    def available(self) -> int:
        return sum(1 for s in SLOTS if not self.occupied[s])

    def indicator(self, slot: int) -> str:
        if slot not in self.occupied:
            raise InvalidSlotError(f"slot {slot} outside 1..4")
        return "GREEN" if self.occupied[slot] else "RED"

    def snapshot(self) -> dict:
        return {
            "gate": self.gate,
            "available": self.available(),
            "slots": {str(s): self.occupied[s] for s in SLOTS},
            "indicators": {str(s): self.indicator(s) for s in SLOTS},
            "lcd": list(self.lcd),
        }
