"""Scenario files: line-delimited JSON steps, assertions, and a runner.

A scenario is one JSON object per line; blank lines and lines starting
with '#' are ignored.  An optional leading {"config": {...}} line sets
the epoch, seed, and device options.  Steps look like

    {"at_ms": 0, "target": "streetlight", "event": "command", "byte": "H"}

and assertions like

    {"at_ms": 5000, "assert": "traffic.green", "expected": 1}

An assertion at time t is evaluated after every event due at or before
t has been dispatched.  Numeric expectations compare exactly for ints
and within 1e-6 for floats (binary float noise, not a semantic
tolerance).
"""

from __future__ import annotations

import json
import logging
import os
from dataclasses import dataclass, field
from datetime import datetime

from .city import CitySim
from .errors import ScenarioParseError, UnknownQueryPathError
from .kernel import SimConfig

log = logging.getLogger(__name__)

# (target, event) -> required argument fields
STEP_GRAMMAR: dict[tuple[str, str], tuple[str, ...]] = {
    ("streetlight", "command"): ("byte",),
    ("streetlight", "ldr"): ("value",),
    ("streetlight", "lane"): ("lane", "distance_cm"),
    ("home", "set"): ("appliance", "on"),
    ("door", "enroll"): ("template",),
    ("door", "verify"): ("template",),
    ("door", "arm"): ("armed",),
    ("door", "presence"): ("distance_cm",),
    ("door", "smoke"): ("value",),
    ("traffic", "presence"): ("road", "present"),
    ("traffic", "plate"): ("road", "plate"),
    ("traffic", "register_plate"): ("plate", "owner", "status"),
    ("parking", "card"): ("uid",),
    ("parking", "entry"): ("detected",),
    ("parking", "slot"): ("slot", "occupied"),
    ("parking", "whitelist"): ("uid", "slot"),
    ("accident", "nmea"): ("sentence",),
    ("accident", "flame"): ("value",),
    ("accident", "button"): ("kind",),
    ("accident", "reset"): (),
    ("display", "env"): ("temp_c", "rh_pct"),
    ("display", "set_ambient"): ("temp_c", "rh_pct"),
    ("display", "notice"): ("text",),
}

CONFIG_KEYS = frozenset({
    "epoch", "seed", "directory", "ldr_threshold", "smoke_threshold",
    "flame_threshold", "display_self_refresh",
})

FLOAT_SLOP = 1e-6


@dataclass(frozen=True)
class Step:
    at_ms: int
    target: str
    event: str
    args: dict
    line_no: int


@dataclass(frozen=True)
class Assertion:
    at_ms: int
    query: str
    expected: object
    line_no: int


@dataclass
class Scenario:
    config: dict = field(default_factory=dict)
    steps: list = field(default_factory=list)
    assertions: list = field(default_factory=list)

    def horizon(self) -> int:
        times = [s.at_ms for s in self.steps] + [a.at_ms for a in self.assertions]
        return max(times) if times else 0


def _bad(line_no: int, message: str) -> ScenarioParseError:
    return ScenarioParseError(line_no, message)


def parse_scenario(text: str) -> Scenario:
    scenario = Scenario()
    seen_any = False
    last_at = 0
    monotonic = True
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise _bad(line_no, f"not valid JSON: {exc.msg}")
        if not isinstance(obj, dict):
            raise _bad(line_no, "each line must be a JSON object")

        if "config" in obj:
            if seen_any or scenario.config:
                raise _bad(line_no, "config line must come first and only once")
            cfg = obj["config"]
            unknown = set(cfg) - CONFIG_KEYS
            if unknown:
                raise _bad(line_no, f"unknown config keys {sorted(unknown)}")
            scenario.config = cfg
            continue
        seen_any = True

        if "at_ms" not in obj:
            raise _bad(line_no, "missing at_ms")
        at_ms = obj["at_ms"]
        if not isinstance(at_ms, int) or at_ms < 0:
            raise _bad(line_no, f"at_ms must be a non-negative integer, got {at_ms!r}")
        if at_ms < last_at:
            monotonic = False
        last_at = max(last_at, at_ms)

        if "assert" in obj:
            extra = set(obj) - {"at_ms", "assert", "expected"}
            if extra:
                raise _bad(line_no, f"unexpected assertion keys {sorted(extra)}")
            if "expected" not in obj:
                raise _bad(line_no, "assertion missing expected")
            scenario.assertions.append(
                Assertion(at_ms, obj["assert"], obj["expected"], line_no))
            continue

        target = obj.get("target")
        event = obj.get("event")
        if target is None or event is None:
            raise _bad(line_no, "step needs target and event")
        key = (target, event)
        if key not in STEP_GRAMMAR:
            known_targets = {t for t, _ in STEP_GRAMMAR}
            if target not in known_targets:
                raise _bad(line_no, f"unknown target {target!r}")
            raise _bad(line_no, f"target {target!r} has no event {event!r}")
        args = {k: v for k, v in obj.items()
                if k not in ("at_ms", "target", "event")}
        missing = set(STEP_GRAMMAR[key]) - set(args)
        if missing:
            raise _bad(line_no, f"step {target}/{event} missing {sorted(missing)}")
        extra = set(args) - set(STEP_GRAMMAR[key])
        if extra:
            raise _bad(line_no, f"step {target}/{event} has unknown fields {sorted(extra)}")
        scenario.steps.append(Step(at_ms, target, event, args, line_no))

    if not monotonic:
        log.warning("scenario steps were not in time order; sorting stably")
        scenario.steps.sort(key=lambda s: s.at_ms)
    scenario.assertions.sort(key=lambda a: a.at_ms)
    return scenario


def load_scenario(path: str) -> Scenario:
    with open(path) as fh:
        return parse_scenario(fh.read())


def build_city(scenario: Scenario, epoch: datetime | None = None,
               seed: int | None = None) -> CitySim:
    cfg = scenario.config
    if epoch is None and "epoch" in cfg:
        epoch = datetime.fromisoformat(cfg["epoch"])
    if seed is None:
        seed = cfg.get("seed", 0)
    defaults = SimConfig()
    sim_config = SimConfig(epoch=epoch or defaults.epoch, seed=seed)
    return CitySim(
        sim_config,
        directory=cfg.get("directory"),
        ldr_threshold=cfg.get("ldr_threshold", 15),
        smoke_threshold=cfg.get("smoke_threshold", 400),
        flame_threshold=cfg.get("flame_threshold", 400),
        display_self_refresh=cfg.get("display_self_refresh", True),
    )


def seed_steps(city: CitySim, scenario: Scenario) -> None:
    """Schedule every step; transported commands land latency later."""
    for step in scenario.steps:
        args = step.args
        if step.target == "streetlight" and step.event == "command":
            city.send_streetlight_command(args["byte"], at=step.at_ms)
        elif step.target == "home" and step.event == "set":
            city.send_home_command(args["appliance"], args["on"], at=step.at_ms)
        elif step.target == "display" and step.event == "notice":
            city.send_notice(args["text"], at=step.at_ms)
        else:
            name = {
                ("streetlight", "ldr"): "ldr-sample",
                ("streetlight", "lane"): "lane-presence",
                ("door", "enroll"): "enroll",
                ("door", "verify"): "verify",
                ("door", "arm"): "arm",
                ("door", "presence"): "presence-sample",
                ("door", "smoke"): "smoke-sample",
                ("traffic", "presence"): "approach-presence",
                ("traffic", "plate"): "plate-read",
                ("traffic", "register_plate"): "register-plate",
                ("parking", "card"): "card-scan",
                ("parking", "entry"): "entry-presence",
                ("parking", "slot"): "slot-presence",
                ("parking", "whitelist"): "whitelist",
                ("accident", "nmea"): "nmea",
                ("accident", "flame"): "flame-sample",
                ("accident", "button"): "button",
                ("accident", "reset"): "reset",
                ("display", "env"): "env-sample",
                ("display", "set_ambient"): "set-ambient",
            }[(step.target, step.event)]
            city.stimulus(step.target, name, args, at=step.at_ms)


def _matches(actual, expected) -> bool:
    if isinstance(expected, float) or isinstance(actual, float):
        try:
            return abs(float(actual) - float(expected)) <= FLOAT_SLOP
        except (TypeError, ValueError):
            return False
    return actual == expected


def check_assertions(city: CitySim, assertions: list) -> list[dict]:
    """Evaluate time-ordered assertions, advancing the clock as needed."""
    results = []
    for assertion in assertions:
        if assertion.at_ms >= city.kernel.now():
            city.kernel.run_until(assertion.at_ms)
        try:
            actual = city.query(assertion.query)
            ok = _matches(actual, assertion.expected)
        except UnknownQueryPathError as exc:
            actual = f"<error: {exc}>"
            ok = False
        results.append({
            "at_ms": assertion.at_ms,
            "query": assertion.query,
            "expected": assertion.expected,
            "actual": actual,
            "ok": ok,
        })
    return results


def run_scenario(scenario: Scenario, out_dir: str | None = None,
                 until_ms: int | None = None,
                 epoch: datetime | None = None,
                 seed: int | None = None) -> tuple[CitySim, list[dict]]:
    city = build_city(scenario, epoch=epoch, seed=seed)
    seed_steps(city, scenario)
    results = check_assertions(city, scenario.assertions)
    horizon = scenario.horizon()
    if until_ms is not None:
        horizon = max(horizon, until_ms)
    if horizon > city.kernel.now():
        city.kernel.run_until(horizon)
    if out_dir is not None:
        export_run(city, out_dir)
    return city, results


def export_run(city: CitySim, out_dir: str) -> None:
    os.makedirs(out_dir, exist_ok=True)
    city.telemetry.export_csv(out_dir)
    city.telemetry.export_json(os.path.join(out_dir, "telemetry.json"))
    city.kernel.export_transcript(os.path.join(out_dir, "transcript.txt"))
    with open(os.path.join(out_dir, "sms.json"), "w") as fh:
        json.dump(city.sms.dump(), fh, indent=2)
        fh.write("\n")
