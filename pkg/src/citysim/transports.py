"""Virtual transport links: serial byte streams, LAN messages, SMS, GPS.

Each link delays its frames by a fixed per-link latency and preserves
send order (the kernel's insertion-sequence tie-break gives FIFO for
free when latency is constant).  SMS lands in per-number inboxes that
tests and telemetry can inspect.  GPS stimuli are NMEA-0183 RMC
sentences; the parser checks the XOR checksum and converts the
degrees+minutes fields to signed decimal degrees.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .errors import (
    BadChecksumError,
    MalformedFieldError,
    OversizedBodyError,
    UnknownLinkError,
    UnsupportedSentenceError,
)
from .kernel import FRAME_DELIVERY, Kernel, Payload

SMS_BODY_LIMIT = 160


@dataclass(frozen=True)
class GpsFix:
    lat: float
    lon: float
    valid: bool
    at: int = 0


@dataclass(frozen=True)
class SmsMessage:
    to: str
    body: str
    sent_at: int = 0


class SerialLink:
    """Point-to-point byte link (Bluetooth HC-05 stand-in).

    ``send_bytes`` delivers one frame per byte; ``send_text`` delivers a
    whole string as a single frame (line-oriented peripherals such as
    the notice display read it that way).
    """

    def __init__(self, kernel: Kernel, link_id: str, target: str,
                 latency_ms: int = 20, range_m: float = 15.0,
                 loss_probability: float = 0.0):
        self.kernel = kernel
        self.link_id = link_id
        self.target = target
        self.latency_ms = latency_ms
        self.range_m = range_m  # informational only
        self.loss_probability = loss_probability
        self._rng = random.Random(kernel.config.seed)

    def _lost(self) -> bool:
        return self.loss_probability > 0 and self._rng.random() < self.loss_probability

    def send_bytes(self, data: bytes) -> list:
        if not data:
            raise ValueError("empty byte burst")
        events = []
        for b in data:
            if self._lost():
                continue
            events.append(self.kernel.schedule_after(
                self.latency_ms, self.target,
                Payload(FRAME_DELIVERY, "serial-byte",
                        {"link": self.link_id, "byte": chr(b)}),
            ))
        return events

    def send_text(self, text: str):
        if self._lost():
            return None
        return self.kernel.schedule_after(
            self.latency_ms, self.target,
            Payload(FRAME_DELIVERY, "serial-text",
                    {"link": self.link_id, "text": text}),
        )


class LanLink:
    """Wi-Fi / LAN message link carrying one JSON-like object per frame."""

    def __init__(self, kernel: Kernel, link_id: str, target: str,
                 latency_ms: int = 50):
        self.kernel = kernel
        self.link_id = link_id
        self.target = target
        self.latency_ms = latency_ms

    def send(self, message: dict):
        return self.kernel.schedule_after(
            self.latency_ms, self.target,
            Payload(FRAME_DELIVERY, "lan", {"link": self.link_id, "message": dict(message)}),
        )


class SmsNetwork:
    """GSM stand-in: addressed messages land in inspectable inboxes.

    The network registers itself as a kernel device so deliveries show
    up in the event transcript like any other frame.
    """

    DEVICE_ID = "sms"

    def __init__(self, kernel: Kernel, latency_ms: int = 2000):
        self.kernel = kernel
        self.latency_ms = latency_ms
        self.inboxes: dict[str, list[dict]] = {}
        kernel.register(self.DEVICE_ID, self)

    def send(self, msg: SmsMessage):
        if len(msg.body) > SMS_BODY_LIMIT:
            raise OversizedBodyError(
                f"SMS body is {len(msg.body)} chars; limit is {SMS_BODY_LIMIT}"
            )
        if not msg.to:
            raise ValueError("SMS needs a destination number")
        return self.kernel.schedule_after(
            self.latency_ms, self.DEVICE_ID,
            Payload(FRAME_DELIVERY, "sms", {"to": msg.to, "body": msg.body}),
        )

    def handle_event(self, event) -> None:
        data = event.payload.data
        self.inboxes.setdefault(data["to"], []).append(
            {"to": data["to"], "body": data["body"], "delivered_at_ms": event.at}
        )

    def inbox(self, number: str) -> list[dict]:
        return list(self.inboxes.get(number, []))

    def dump(self) -> list[dict]:
        """All delivered messages as a flat JSON-ready list."""
        out = []
        for number in self.inboxes:
            out.extend(self.inboxes[number])
        out.sort(key=lambda m: (m["delivered_at_ms"], m["to"]))
        return out

    def snapshot(self) -> dict:
        return {
            "counts": {num: len(msgs) for num, msgs in self.inboxes.items()},
            "inboxes": {num: list(msgs) for num, msgs in self.inboxes.items()},
        }


class LinkHub:
    """Name→link directory so the gateway and scenarios share one wiring."""

    def __init__(self):
        self._links: dict[str, object] = {}

    def add(self, link) -> None:
        self._links[link.link_id] = link

    def get(self, link_id: str):
        try:
            return self._links[link_id]
        except KeyError:
            raise UnknownLinkError(f"no link named {link_id!r}") from None


def nmea_checksum(payload: str) -> int:
    """XOR of all character codes between '$' and '*'."""
    value = 0
    for ch in payload:
        value ^= ord(ch)
    return value


def _dm_to_degrees(field: str, hemi: str, degree_digits: int) -> float:
    degrees = float(field[:degree_digits])
    minutes = float(field[degree_digits:])
    value = degrees + minutes / 60.0
    if hemi in ("S", "W"):
        value = -value
    return value


def parse_nmea_rmc(sentence: str, at: int = 0) -> GpsFix:
    """Decode an RMC sentence to a fix in signed decimal degrees.

    Raises BadChecksumError / MalformedFieldError / UnsupportedSentenceError
    per the usual NMEA failure modes; a status of 'V' yields valid=False.
    """
    sentence = sentence.strip()
    if not sentence.startswith("$") or "*" not in sentence:
        raise MalformedFieldError("sentence must look like $...*HH")
    body, _, tail = sentence[1:].partition("*")
    if len(tail) < 2:
        raise MalformedFieldError("missing two-digit checksum")
    try:
        claimed = int(tail[:2], 16)
    except ValueError:
        raise MalformedFieldError(f"checksum {tail[:2]!r} is not hex") from None
    actual = nmea_checksum(body)
    if claimed != actual:
        raise BadChecksumError(
            f"checksum {claimed:02X} does not match computed {actual:02X}"
        )
    fields = body.split(",")
    if not fields[0].endswith("RMC"):
        raise UnsupportedSentenceError(f"unsupported sentence type {fields[0]!r}")
    if len(fields) < 10:
        raise MalformedFieldError(f"RMC needs at least 10 fields, got {len(fields)}")
    status = fields[2]
    if status not in ("A", "V"):
        raise MalformedFieldError(f"status must be A or V, got {status!r}")
    valid = status == "A"
    lat = lon = 0.0
    if fields[3] and fields[5]:
        try:
            lat = _dm_to_degrees(fields[3], fields[4], 2)
            lon = _dm_to_degrees(fields[5], fields[6], 3)
        except (ValueError, IndexError):
            raise MalformedFieldError(
                f"bad coordinate fields {fields[3]!r} / {fields[5]!r}"
            ) from None
        if not (-90.0 <= lat <= 90.0) or not (-180.0 <= lon <= 180.0):
            raise MalformedFieldError(f"coordinates out of range: {lat}, {lon}")
    elif valid:
        raise MalformedFieldError("valid fix without coordinates")
    return GpsFix(lat=lat, lon=lon, valid=valid, at=at)


def compose_nmea_rmc(lat: float, lon: float, valid: bool = True,
                     time_utc: str = "120000", date: str = "010120") -> str:
    """Build an RMC sentence for scenario tooling; round-trips within 1e-4°."""
    def dm(value: float, degree_digits: int) -> tuple[str, bool]:
        negative = value < 0
        value = abs(value)
        degrees = int(value)
        minutes = (value - degrees) * 60.0
        if minutes >= 59.99995:  # carry after rounding to 4 d.p.
            degrees += 1
            minutes = 0.0
        return f"{degrees:0{degree_digits}d}{minutes:07.4f}", negative

    lat_field, south = dm(lat, 2)
    lon_field, west = dm(lon, 3)
    body = ",".join([
        "GPRMC", time_utc, "A" if valid else "V",
        lat_field, "S" if south else "N",
        lon_field, "W" if west else "E",
        "000.0", "000.0", date, "", "",
    ])
    return f"${body}*{nmea_checksum(body):02X}"
