"""Six-appliance relay bank driven by LAN command messages."""

from __future__ import annotations

import logging

from ..errors import UnknownApplianceError
from ..kernel import FRAME_DELIVERY, Kernel

log = logging.getLogger(__name__)

APPLIANCES = ("fridge", "ac", "light1", "light2", "fan", "tv")


class HomeAutomation:
    DEVICE_ID = "home"

    def __init__(self, kernel: Kernel, telemetry):
        self.kernel = kernel
        self.telemetry = telemetry
        self.states: dict[str, str] = {k: "OFF" for k in APPLIANCES}
        self.toggle_counts: dict[str, int] = {k: 0 for k in APPLIANCES}

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind == FRAME_DELIVERY and payload.name == "lan":
            msg = payload.data["message"]
            self.handle_app_command(msg["appliance"], bool(msg["on"]))
        else:
            log.warning("home: unhandled payload %s/%s", payload.kind, payload.name)

    def handle_app_command(self, appliance: str, on: bool) -> None:
        if appliance not in self.states:
            raise UnknownApplianceError(f"no appliance named {appliance!r}")
        new = "ON" if on else "OFF"
        if self.states[appliance] == new:
            return
        self.states[appliance] = new
        self.toggle_counts[appliance] += 1
        self.telemetry.record("home_appliance", appliance=appliance, new_state=new)

    def toggle_count(self, appliance: str) -> int:
        if appliance not in self.toggle_counts:
            raise UnknownApplianceError(f"no appliance named {appliance!r}")
        return self.toggle_counts[appliance]

    def snapshot(self) -> dict:
        snap: dict = {"counts": dict(self.toggle_counts)}
        snap.update(self.states)
        return snap
