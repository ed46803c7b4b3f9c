"""Live bridge between operator clients and the virtual-time kernel.

Clients connect over WebSocket at /ws, send ClientCommand JSON objects
and receive snapshot frames {device, snapshot, virtual_ms}.  History
is served from the telemetry store at GET /history/<table>; GET
/devices lists device ids with their snapshot schemas.

Two pacing modes share all of the command plumbing:

* paced (``citysim serve``): a background task advances the kernel so
  one wall millisecond equals one virtual millisecond, and a 500 ms
  heartbeat pushes every device snapshot.
* unpaced (tests): each accepted command immediately settles — the
  kernel runs just far enough to absorb transport latency — keeping
  protocol tests deterministic with no sleeps.

Kernel access is serialized through one asyncio lock; the kernel
itself stays single-threaded.  Slow clients never block the loop:
each client has a bounded frame queue that drops oldest frames first.
"""

from __future__ import annotations

import asyncio
import contextlib
import json
import time

from fastapi import FastAPI, WebSocket, WebSocketDisconnect
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from .city import CitySim
from .errors import RejectedActionError, SimError
from .telemetry import SCHEMAS

HEARTBEAT_MS = 500
PACER_TICK_S = 0.05
CLIENT_QUEUE_LIMIT = 64
SETTLE_MS = 200  # unpaced: absorb serial/LAN latency after each command

# (target, action) -> required argument fields
COMMAND_WHITELIST: dict[tuple[str, str], tuple[str, ...]] = {
    ("streetlight", "command"): ("byte",),
    ("home", "set"): ("appliance", "on"),
    ("display", "notice"): ("text",),
    ("accident", "button"): ("kind",),
    ("accident", "reset"): (),
    ("door", "arm"): ("armed",),
}


class Gateway:
    def __init__(self, city: CitySim, paced: bool = False,
                 settle_ms: int = SETTLE_MS):
        self.city = city
        self.paced = paced
        self.settle_ms = settle_ms
        self.lock = asyncio.Lock()
        self.clients: set[asyncio.Queue] = set()
        self.command_log: list[dict] = []
        self._last_sent: dict[str, dict] = {}
        self._wall_start: float | None = None
        self._tasks: list[asyncio.Task] = []

    # -- command path ------------------------------------------------------

    def _wall_virtual_ms(self) -> int:
        if self._wall_start is None:
            return self.city.kernel.now()
        return int((time.monotonic() - self._wall_start) * 1000)

    def submit(self, command: dict) -> int:
        """Validate and inject one ClientCommand; returns its base time.

        Must be called with the kernel lock held.
        """
        target = command.get("target")
        action = command.get("action")
        key = (target, action)
        if key not in COMMAND_WHITELIST:
            raise RejectedActionError(f"command {target}/{action} is not allowed")
        args = {k: v for k, v in command.items() if k not in ("target", "action")}
        missing = set(COMMAND_WHITELIST[key]) - set(args)
        if missing:
            raise RejectedActionError(
                f"command {target}/{action} missing {sorted(missing)}")
        extra = set(args) - set(COMMAND_WHITELIST[key])
        if extra:
            raise RejectedActionError(
                f"command {target}/{action} has unknown fields {sorted(extra)}")

        base = max(self.city.kernel.now(), self._wall_virtual_ms())
        if key == ("streetlight", "command"):
            self.city.send_streetlight_command(args["byte"], at=base)
        elif key == ("home", "set"):
            self.city.send_home_command(args["appliance"], bool(args["on"]), at=base)
        elif key == ("display", "notice"):
            self.city.send_notice(args["text"], at=base)
        elif key == ("accident", "button"):
            self.city.stimulus("accident", "button", {"kind": args["kind"]}, at=base)
        elif key == ("accident", "reset"):
            self.city.stimulus("accident", "reset", {}, at=base)
        elif key == ("door", "arm"):
            self.city.stimulus("door", "arm", {"armed": bool(args["armed"])}, at=base)

        self.command_log.append({
            "at_ms": base, "target": target, "action": action, **args,
        })
        return base

    def command_log_as_scenario(self) -> str:
        """The accepted commands as replayable scenario lines."""
        action_to_event = {"command": "command", "set": "set", "notice": "notice",
                           "button": "button", "reset": "reset", "arm": "arm"}
        lines = []
        for entry in self.command_log:
            step = dict(entry)
            step["event"] = action_to_event[step.pop("action")]
            lines.append(json.dumps(step, sort_keys=True))
        return "\n".join(lines) + ("\n" if lines else "")

    # -- snapshot fan-out -----------------------------------------------------

    def _frame(self, device_id: str) -> dict:
        return {
            "device": device_id,
            "snapshot": self.city.kernel.devices()[device_id].snapshot(),
            "virtual_ms": self.city.kernel.now(),
        }

    def _push(self, frame: dict) -> None:
        for queue in self.clients:
            if queue.full():
                with contextlib.suppress(asyncio.QueueEmpty):
                    queue.get_nowait()  # drop oldest, newest wins
            queue.put_nowait(frame)

    def broadcast_changed(self) -> None:
        for device_id in self.city.kernel.devices():
            frame = self._frame(device_id)
            if self._last_sent.get(device_id) != frame["snapshot"]:
                self._last_sent[device_id] = frame["snapshot"]
                self._push(frame)

    def broadcast_all(self) -> None:
        for device_id in self.city.kernel.devices():
            frame = self._frame(device_id)
            self._last_sent[device_id] = frame["snapshot"]
            self._push(frame)

    # -- background pacing ------------------------------------------------

    async def start(self) -> None:
        if self.paced:
            self._wall_start = time.monotonic()
            self._tasks.append(asyncio.create_task(self._pace_loop()))
            self._tasks.append(asyncio.create_task(self._heartbeat_loop()))

    async def stop(self) -> None:
        for task in self._tasks:
            task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await task
        self._tasks.clear()

    async def _pace_loop(self) -> None:
        while True:
            await asyncio.sleep(PACER_TICK_S)
            async with self.lock:
                horizon = self._wall_virtual_ms()
                if horizon > self.city.kernel.now():
                    self.city.kernel.run_until(horizon)
                self.broadcast_changed()

    async def _heartbeat_loop(self) -> None:
        while True:
            await asyncio.sleep(HEARTBEAT_MS / 1000)
            async with self.lock:
                self.broadcast_all()


def create_app(city: CitySim, paced: bool = False,
               settle_ms: int = SETTLE_MS) -> FastAPI:
    gateway = Gateway(city, paced=paced, settle_ms=settle_ms)

    @contextlib.asynccontextmanager
    async def lifespan(_app: FastAPI):
        await gateway.start()
        yield
        await gateway.stop()

    app = FastAPI(title="citysim operator gateway", lifespan=lifespan)
    app.state.gateway = gateway
    # the operator console may be served from a different origin
    app.add_middleware(CORSMiddleware, allow_origins=["*"], allow_methods=["GET"])

    @app.get("/devices")
    async def devices():
        async with gateway.lock:
            out = []
            for device_id, device in city.kernel.devices().items():
                snapshot = device.snapshot()
                out.append({
                    "id": device_id,
                    "schema": sorted(snapshot),
                    "snapshot": snapshot,
                })
        return {"devices": out, "virtual_ms": city.kernel.now()}

    @app.get("/history/{table}")
    async def history(table: str):
        if table not in SCHEMAS:
            return JSONResponse(
                status_code=404,
                content={"detail": f"unknown table {table!r}",
                         "tables": sorted(SCHEMAS)},
            )
        async with gateway.lock:
            rows = city.telemetry.rows(table)
        return {"table": table, "columns": list(SCHEMAS[table]), "rows": rows}

    @app.websocket("/ws")
    async def ws(socket: WebSocket):
        await socket.accept()
        queue: asyncio.Queue = asyncio.Queue(maxsize=CLIENT_QUEUE_LIMIT)

        async def sender():
            while True:
                frame = await queue.get()
                await socket.send_text(json.dumps(frame))

        send_task = asyncio.create_task(sender())
        async with gateway.lock:
            gateway.clients.add(queue)
            for device_id in city.kernel.devices():
                queue.put_nowait(gateway._frame(device_id))
        try:
            while True:
                text = await socket.receive_text()
                try:
                    command = json.loads(text)
                    if not isinstance(command, dict):
                        raise ValueError("command must be a JSON object")
                except ValueError as exc:
                    await socket.send_text(json.dumps(
                        {"error": "bad-frame", "detail": str(exc)}))
                    continue
                async with gateway.lock:
                    try:
                        base = gateway.submit(command)
                        if not gateway.paced:
                            city.kernel.run_until(base + gateway.settle_ms)
                    except RejectedActionError as exc:
                        await socket.send_text(json.dumps(
                            {"error": "rejected-action", "detail": str(exc)}))
                        continue
                    except SimError as exc:
                        await socket.send_text(json.dumps(
                            {"error": "command-failed", "detail": str(exc)}))
                        continue
                    gateway.broadcast_changed()
        except WebSocketDisconnect:
            pass
        finally:
            async with gateway.lock:
                gateway.clients.discard(queue)
            send_task.cancel()
            with contextlib.suppress(asyncio.CancelledError):
                await send_task

    return app


def serve(scenario, host: str = "127.0.0.1", port: int = 8000) -> None:
    """Run the gateway against a world seeded from a scenario."""
    import uvicorn

    from .scenario import build_city, seed_steps

    city = build_city(scenario)
    seed_steps(city, scenario)
    app = create_app(city, paced=True)
    uvicorn.run(app, host=host, port=port, log_level="info")
