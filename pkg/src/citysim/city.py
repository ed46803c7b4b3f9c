"""Assembled city: kernel, transports, devices, telemetry in one box.

The same injection helpers serve the scenario runner (which seeds
events at absolute virtual times) and the operator gateway (which
injects at the current instant), so a recorded command log replays
through the identical path.  Commands that ride a transport inherit
its latency; local sensor stimuli are delivered at their own instant.
"""

from __future__ import annotations

from .errors import UnknownQueryPathError, UnknownTargetError
from .kernel import FRAME_DELIVERY, STIMULUS, Kernel, Payload, SimConfig
from .telemetry import Telemetry
from .transports import LanLink, SerialLink, SmsNetwork
from .devices import (
    AccidentDispatch,
    DoorSecurity,
    HomeAutomation,
    InfoDisplay,
    Parking,
    Streetlight,
    TrafficControl,
)

SERIAL_LATENCY_MS = 20
LAN_LATENCY_MS = 50


class CitySim:
    def __init__(self, config: SimConfig | None = None, *,
                 directory: dict | None = None,
                 ldr_threshold: int = 15,
                 smoke_threshold: int = 400,
                 flame_threshold: int = 400,
                 display_self_refresh: bool = True):
        self.kernel = Kernel(config)
        self.telemetry = Telemetry(self.kernel)
        self.sms = SmsNetwork(self.kernel)

        self.streetlight = Streetlight(self.kernel, self.telemetry,
                                       ldr_threshold=ldr_threshold)
        self.home = HomeAutomation(self.kernel, self.telemetry)
        self.door = DoorSecurity(self.kernel, self.telemetry,
                                 smoke_threshold=smoke_threshold)
        self.traffic = TrafficControl(self.kernel, self.telemetry)
        self.parking = Parking(self.kernel, self.telemetry)
        self.accident = AccidentDispatch(self.kernel, self.telemetry, self.sms,
                                         flame_threshold=flame_threshold,
                                         directory=directory)
        self.display = InfoDisplay(self.kernel, self.telemetry,
                                   self_refresh=display_self_refresh)

        for device in (self.streetlight, self.home, self.door, self.traffic,
                       self.parking, self.accident, self.display):
            self.kernel.register(device.DEVICE_ID, device)

        self.bt_streetlight = SerialLink(self.kernel, "bt-streetlight",
                                         Streetlight.DEVICE_ID,
                                         latency_ms=SERIAL_LATENCY_MS)
        self.bt_display = SerialLink(self.kernel, "bt-display",
                                     InfoDisplay.DEVICE_ID,
                                     latency_ms=SERIAL_LATENCY_MS)
        self.wifi_home = LanLink(self.kernel, "wifi-home",
                                 HomeAutomation.DEVICE_ID,
                                 latency_ms=LAN_LATENCY_MS)

    # -- injection helpers -------------------------------------------------
    # `at` is the instant the operator-side send happens; transported
    # commands land latency later.  Omitting `at` means "now".

    def _base(self, at) -> int:
        return self.kernel.now() if at is None else at

    def send_streetlight_command(self, byte: str, at: int | None = None):
        return self.kernel.schedule(
            self._base(at) + self.bt_streetlight.latency_ms,
            Streetlight.DEVICE_ID,
            Payload(FRAME_DELIVERY, "serial-byte",
                    {"link": self.bt_streetlight.link_id, "byte": byte}),
        )

    def send_home_command(self, appliance: str, on: bool, at: int | None = None):
        return self.kernel.schedule(
            self._base(at) + self.wifi_home.latency_ms,
            HomeAutomation.DEVICE_ID,
            Payload(FRAME_DELIVERY, "lan",
                    {"link": self.wifi_home.link_id,
                     "message": {"appliance": appliance, "on": bool(on)}}),
        )

    def send_notice(self, text: str, at: int | None = None):
        return self.kernel.schedule(
            self._base(at) + self.bt_display.latency_ms,
            InfoDisplay.DEVICE_ID,
            Payload(FRAME_DELIVERY, "serial-text",
                    {"link": self.bt_display.link_id, "text": text}),
        )

    def stimulus(self, target: str, name: str, data: dict | None = None,
                 at: int | None = None):
        if target not in self.kernel.devices():
            raise UnknownTargetError(f"no device named {target!r}")
        return self.kernel.schedule(
            self._base(at), target, Payload(STIMULUS, name, data or {}),
        )

    # -- observation ---------------------------------------------------------

    def snapshots(self) -> dict:
        return {device_id: device.snapshot()
                for device_id, device in self.kernel.devices().items()}

    def query(self, path: str):
        """Resolve a dotted snapshot path like traffic.green or door.state."""
        parts = path.split(".")
        if not parts or parts[0] not in self.kernel.devices():
            raise UnknownQueryPathError(f"no device for query {path!r}")
        node = self.kernel.devices()[parts[0]].snapshot()
        for part in parts[1:]:
            if isinstance(node, dict):
                if part in node:
                    node = node[part]
                    continue
                raise UnknownQueryPathError(f"{path!r}: no key {part!r}")
            if isinstance(node, (list, tuple)):
                try:
                    node = node[int(part)]
                    continue
                except (ValueError, IndexError):
                    raise UnknownQueryPathError(
                        f"{path!r}: bad list index {part!r}") from None
            raise UnknownQueryPathError(f"{path!r}: cannot descend into {part!r}")
        return node
