"""Fire response and roadside emergency dispatch.

A flame reading over the threshold latches the water pump and alarm
and texts the fire department; each roadside button texts its own
department.  Every SMS carries the latest valid GPS fix, or the
LOCATION UNKNOWN marker when none has been cached.  The alert body
grammar is fixed so inbox contents are bit-stable across runs:

    <KIND> ALERT lat=<d.dddd> lon=<d.dddd>
    <KIND> ALERT LOCATION UNKNOWN
"""

from __future__ import annotations

import logging

from ..errors import NmeaError, OutOfRangeError, UnknownDepartmentError
from ..kernel import STIMULUS, Kernel
from ..transports import GpsFix, SmsMessage, parse_nmea_rmc

log = logging.getLogger(__name__)

KINDS = ("fire", "police", "ambulance")
FLAME_THRESHOLD_DEFAULT = 400
DIRECTORY_DEFAULT = {"fire": "100", "police": "101", "ambulance": "102"}


class AccidentDispatch:
    DEVICE_ID = "accident"

    def __init__(self, kernel: Kernel, telemetry, sms,
                 flame_threshold: int = FLAME_THRESHOLD_DEFAULT,
                 directory: dict | None = None):
        if not 0 <= flame_threshold <= 1023:
            raise OutOfRangeError(f"flame_threshold {flame_threshold} outside 0..1023")
        self.kernel = kernel
        self.telemetry = telemetry
        self.sms = sms
        self.flame_threshold = flame_threshold
        self.directory = dict(DIRECTORY_DEFAULT if directory is None else directory)
        self.pump = "OFF"
        self.alarm = "OFF"
        self.last_fix: GpsFix | None = None
        self.counters = {k: 0 for k in KINDS}

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind != STIMULUS:
            return
        if payload.name == "nmea":
            try:
                fix = parse_nmea_rmc(payload.data["sentence"], at=event.at)
            except NmeaError as exc:
                log.warning("accident: dropping bad GPS sentence: %s", exc)
                return
            self.on_gps_fix(fix)
        elif payload.name == "flame-sample":
            self.on_flame_sample(payload.data["value"])
        elif payload.name == "button":
            self.on_button_press(payload.data["kind"])
        elif payload.name == "reset":
            self.reset()
        else:
            log.warning("accident: unhandled stimulus %s", payload.name)

    def on_gps_fix(self, fix: GpsFix) -> None:
        if fix.valid:
            self.last_fix = fix

    def _alert_body(self, kind: str) -> str:
        if self.last_fix is None:
            return f"{kind.upper()} ALERT LOCATION UNKNOWN"
        return (f"{kind.upper()} ALERT "
                f"lat={self.last_fix.lat:.4f} lon={self.last_fix.lon:.4f}")

    def _dispatch(self, kind: str) -> None:
        number = self.directory.get(kind)
        if number is None:
            raise UnknownDepartmentError(f"no phone number configured for {kind!r}")
        self.sms.send(SmsMessage(to=number, body=self._alert_body(kind),
                                 sent_at=self.kernel.now()))
        self.counters[kind] += 1
        if self.last_fix is None:
            lat = lon = ""
        else:
            lat, lon = f"{self.last_fix.lat:.4f}", f"{self.last_fix.lon:.4f}"
        self.telemetry.record("accident", kind=kind, lat=lat, lon=lon)

    def on_flame_sample(self, value: int) -> None:
        if not 0 <= value <= 1023:
            raise OutOfRangeError(f"flame sample {value} outside 0..1023")
        if value <= self.flame_threshold:
            return
        self.pump = "ON"
        self.alarm = "ON"
        self._dispatch("fire")

    def on_button_press(self, kind: str) -> None:
        if kind not in KINDS:
            raise UnknownDepartmentError(f"unknown emergency kind {kind!r}")
        self._dispatch(kind)

    def reset(self) -> None:
        self.pump = "OFF"
        self.alarm = "OFF"

    def snapshot(self) -> dict:
        fix = None
        if self.last_fix is not None:
            fix = {"lat": self.last_fix.lat, "lon": self.last_fix.lon,
                   "valid": self.last_fix.valid}
        return {
            "pump": self.pump,
            "alarm": self.alarm,
            "counters": dict(self.counters),
            "last_fix": fix,
        }
