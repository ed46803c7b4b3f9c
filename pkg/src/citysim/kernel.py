"""Deterministic virtual-time event kernel.

The kernel owns the simulation clock (integer milliseconds), a priority
queue of pending events ordered by (time, insertion sequence), and the
registry of devices that receive them.  Everything that happens in a run
flows through here, which is what makes replays bit-identical: same
config, same scenario, same dispatch order.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from datetime import datetime, timedelta

from .errors import PastTimestampError, UnknownTargetError

# Payload kinds carried by events.
STIMULUS = "stimulus"
FRAME_DELIVERY = "frame-delivery"
TIMER_EXPIRY = "timer-expiry"


@dataclass(frozen=True)
class Payload:
    """What an event delivers: a named stimulus, frame, or timer tick."""

    kind: str  # STIMULUS | FRAME_DELIVERY | TIMER_EXPIRY
    name: str  # device-specific discriminator, e.g. "ldr", "serial-byte"
    data: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SimEvent:
    at: int  # virtual milliseconds
    seq: int  # global insertion sequence, assigned by the kernel
    target: str  # registered device id
    payload: Payload


@dataclass(frozen=True)
class SimConfig:
    """Run configuration: calendar epoch for virtual time 0 plus RNG seed."""

    epoch: datetime = datetime(2020, 1, 1, 0, 0, 0)
    seed: int = 0

    def wall_datetime(self, at_ms: int) -> datetime:
        return self.epoch + timedelta(milliseconds=at_ms)


class Kernel:
    """Single-threaded event queue with a monotonic virtual clock.

    Devices interact with the world only through scheduled events; the
    clock advances only by dispatching the earliest pending event or by
    an explicit idle-advance in :meth:`run_until`.
    """

    def __init__(self, config: SimConfig | None = None):
        self.config = config or SimConfig()
        self._now = 0
        self._seq = 0
        self._queue: list[tuple[int, int, SimEvent]] = []
        self._devices: dict[str, object] = {}
        # One line per dispatched event: "at,seq,target,payload-kind".
        self.transcript: list[str] = []

    def register(self, device_id: str, device) -> None:
        self._devices[device_id] = device

    def devices(self) -> dict[str, object]:
        return dict(self._devices)

    def now(self) -> int:
        return self._now

    def schedule(self, at: int, target: str, payload: Payload) -> SimEvent:
        """Queue an event for dispatch at virtual time ``at``.

        Ties at equal times are broken by insertion order, so two events
        scheduled for the same instant dispatch in the order they were
        scheduled.
        """
        if at < self._now:
            raise PastTimestampError(
                f"cannot schedule at {at} ms; clock is at {self._now} ms"
            )
        event = SimEvent(at=at, seq=self._seq, target=target, payload=payload)
        self._seq += 1
        heapq.heappush(self._queue, (event.at, event.seq, event))
        return event

    def schedule_after(self, delay_ms: int, target: str, payload: Payload) -> SimEvent:
        return self.schedule(self._now + delay_ms, target, payload)

    def step(self) -> SimEvent | None:
        """Dispatch the earliest pending event, or return None when idle."""
        if not self._queue:
            return None
        _, _, event = heapq.heappop(self._queue)
        self._now = event.at
        device = self._devices.get(event.target)
        if device is None:
            raise UnknownTargetError(f"no device registered as {event.target!r}")
        self.transcript.append(
            f"{event.at},{event.seq},{event.target},{event.payload.kind}"
        )
        device.handle_event(event)
        return event

    def run_until(self, t: int) -> int:
        """Dispatch every event due at or before ``t``; clock ends at ``t``."""
        if t < self._now:
            raise PastTimestampError(
                f"cannot run until {t} ms; clock is at {self._now} ms"
            )
        count = 0
        while self._queue and self._queue[0][0] <= t:
            self.step()
            count += 1
        self._now = max(self._now, t)
        return count

    def pending(self) -> int:
        return len(self._queue)

    def export_transcript(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for line in self.transcript:
                fh.write(line + "\n")
