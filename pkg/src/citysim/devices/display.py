"""Public information boards: two 16x2 character displays.

Display one cycles ambient temperature/humidity, re-sampling itself
every 10 s once primed.  Display two shows operator notices: text up
to 32 characters wraps across the two rows; anything longer scrolls
one column per 500 ms as a marquee over the message plus a 32-space
gap.  Samples outside the sensor's range (0..50 C, 20..90 %RH) are
logged and dropped without touching the grid.
"""

from __future__ import annotations

import logging

from ..errors import EmptyMessageError
from ..kernel import FRAME_DELIVERY, STIMULUS, TIMER_EXPIRY, Kernel, Payload

log = logging.getLogger(__name__)

LCD_COLS = 16
SAMPLE_PERIOD_MS = 10000
MARQUEE_TICK_MS = 500
MARQUEE_GAP = " " * (2 * LCD_COLS)

TEMP_RANGE = (0.0, 50.0)
RH_RANGE = (20.0, 90.0)


def _pad(text: str) -> str:
    return text[:LCD_COLS].ljust(LCD_COLS)


class InfoDisplay:
    DEVICE_ID = "display"

    def __init__(self, kernel: Kernel, telemetry, self_refresh: bool = True):
        self.kernel = kernel
        self.telemetry = telemetry
        self.self_refresh = self_refresh
        self.env_grid = [_pad(""), _pad("")]
        self.notice_grid = [_pad(""), _pad("")]
        self.last_sample = None
        self.ambient = None  # conditions the next self-sample will read
        self.next_sample_at = None
        self.message = None
        self.scroll_offset = 0
        self._marquee_token = 0

    def handle_event(self, event) -> None:
        payload = event.payload
        if payload.kind == STIMULUS:
            if payload.name == "env-sample":
                self.on_env_sample(payload.data["temp_c"], payload.data["rh_pct"])
            elif payload.name == "set-ambient":
                self.set_ambient(payload.data["temp_c"], payload.data["rh_pct"])
        elif payload.kind == FRAME_DELIVERY and payload.name == "serial-text":
            self.on_text_message(payload.data["text"])
        elif payload.kind == TIMER_EXPIRY:
            if payload.name == "env-refresh":
                self._on_refresh(payload.data["expected"])
            elif payload.name == "marquee-tick":
                self._on_marquee_tick(payload.data["token"])
        else:
            log.warning("display: unhandled payload %s/%s",
                        payload.kind, payload.name)

    # -- environment board -------------------------------------------------

    @staticmethod
    def _in_range(temp_c: float, rh_pct: float) -> bool:
        return (TEMP_RANGE[0] <= temp_c <= TEMP_RANGE[1]
                and RH_RANGE[0] <= rh_pct <= RH_RANGE[1])

    def set_ambient(self, temp_c: float, rh_pct: float) -> None:
        """Change the conditions future samples will read; no row now."""
        self.ambient = (temp_c, rh_pct)

    def _schedule_refresh(self) -> None:
        self.next_sample_at = self.kernel.now() + SAMPLE_PERIOD_MS
        self.kernel.schedule(
            self.next_sample_at, self.DEVICE_ID,
            Payload(TIMER_EXPIRY, "env-refresh", {"expected": self.next_sample_at}),
        )

    def on_env_sample(self, temp_c: float, rh_pct: float) -> None:
        self.ambient = (temp_c, rh_pct)
        if not self._in_range(temp_c, rh_pct):
            log.warning("display: rejecting out-of-range sample %.1fC %.0f%%",
                        temp_c, rh_pct)
            if self.self_refresh:
                self._schedule_refresh()
            return
        self.last_sample = {"temp_c": temp_c, "rh_pct": rh_pct}
        self.env_grid = [_pad(f"TEMP: {temp_c:.1f}C"), _pad(f"HUM: {rh_pct:.0f}%")]
        self.telemetry.record("info_env", temp_c=f"{temp_c:.1f}", rh_pct=f"{rh_pct:.0f}")
        if self.self_refresh:
            self._schedule_refresh()

    def _on_refresh(self, expected: int) -> None:
        if self.next_sample_at != expected:
            return  # an explicit sample restarted the cycle
        if self.ambient is not None:
            self.on_env_sample(*self.ambient)

    # -- notice board --------------------------------------------------------

    def on_text_message(self, msg: str) -> None:
        if not msg:
            raise EmptyMessageError("notice text is empty")
        self.message = msg
        self.scroll_offset = 0
        self._marquee_token += 1
        self._render_notice()
        self.telemetry.record("info_notice", text=msg)
        if len(msg) > 2 * LCD_COLS:
            self.kernel.schedule_after(
                MARQUEE_TICK_MS, self.DEVICE_ID,
                Payload(TIMER_EXPIRY, "marquee-tick", {"token": self._marquee_token}),
            )

    def _render_notice(self) -> None:
        msg = self.message
        if len(msg) <= 2 * LCD_COLS:
            self.notice_grid = [_pad(msg[:LCD_COLS]), _pad(msg[LCD_COLS:])]
            return
        track = msg + MARQUEE_GAP
        window = "".join(track[(self.scroll_offset + i) % len(track)]
                         for i in range(2 * LCD_COLS))
        self.notice_grid = [window[:LCD_COLS], window[LCD_COLS:]]

    def _on_marquee_tick(self, token: int) -> None:
        if token != self._marquee_token:
            return  # replaced by a newer message
        self.scroll_offset = (self.scroll_offset + 1) % (len(self.message) + 2 * LCD_COLS)
        self._render_notice()
        self.kernel.schedule_after(
            MARQUEE_TICK_MS, self.DEVICE_ID,
            Payload(TIMER_EXPIRY, "marquee-tick", {"token": self._marquee_token}),
        )

    def render(self) -> dict:
        return {"env": list(self.env_grid), "notice": list(self.notice_grid)}

    def snapshot(self) -> dict:
        snap = self.render()
        snap["last_sample"] = dict(self.last_sample) if self.last_sample else None
        snap["message"] = self.message
        return snap
