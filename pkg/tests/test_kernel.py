"""Event queue ordering, clock semantics, and transcript determinism."""

import random

import pytest

from citysim.errors import PastTimestampError, UnknownTargetError
from citysim.kernel import Kernel, Payload, SimConfig, STIMULUS


class Recorder:
    def __init__(self):
        self.seen = []

    def handle_event(self, event):
        self.seen.append((event.at, event.seq, event.payload.name))

    def snapshot(self):
        return {"count": len(self.seen)}


def make():
    k = Kernel()
    r = Recorder()
    k.register("dev", r)
    return k, r


def test_min_ordering():
    k, r = make()
    k.schedule(3000, "dev", Payload(STIMULUS, "a"))
    k.schedule(2000, "dev", Payload(STIMULUS, "b"))
    ev = k.step()
    assert ev.at == 2000 and ev.payload.name == "b"
    assert k.now() == 2000


def test_same_time_tie_broken_by_insertion():
    k, r = make()
    k.schedule(5000, "dev", Payload(STIMULUS, "first"))
    k.schedule(5000, "dev", Payload(STIMULUS, "second"))
    k.run_until(5000)
    assert [name for _, _, name in r.seen] == ["first", "second"]


def test_past_timestamp_rejected():
    k, r = make()
    k.schedule(100, "dev", Payload(STIMULUS, "x"))
    k.run_until(100)
    with pytest.raises(PastTimestampError):
        k.schedule(50, "dev", Payload(STIMULUS, "late"))


def test_unknown_target():
    k, _ = make()
    k.schedule(10, "ghost", Payload(STIMULUS, "x"))
    with pytest.raises(UnknownTargetError):
        k.step()


def test_step_on_empty_queue():
    k, _ = make()
    assert k.step() is None
    assert k.now() == 0


def test_run_until_counts_and_idle_advance():
    k, r = make()
    for at in (1000, 2000, 9000):
        k.schedule(at, "dev", Payload(STIMULUS, "x"))
    assert k.run_until(5000) == 2
    assert k.now() == 5000
    assert k.run_until(5000) == 0
    assert k.run_until(9000) == 1
    assert k.now() == 9000


def test_schedule_after_is_relative():
    k, r = make()
    k.schedule(100, "dev", Payload(STIMULUS, "x"))
    k.run_until(100)
    ev = k.schedule_after(50, "dev", Payload(STIMULUS, "y"))
    assert ev.at == 150


def test_clock_monotone_over_random_schedule():
    rng = random.Random(7)
    k, r = make()
    for _ in range(300):
        k.schedule(rng.randrange(0, 100000), "dev", Payload(STIMULUS, "x"))
    last = 0
    while True:
        ev = k.step()
        if ev is None:
            break
        assert k.now() >= last
        last = k.now()
    assert len(r.seen) == 300


def test_transcript_replay_identical(tmp_path):
    def run():
        rng = random.Random(42)
        k, _ = make()
        for _ in range(200):
            k.schedule(rng.randrange(0, 50000), "dev",
                       Payload(STIMULUS, f"n{rng.randrange(10)}"))
        k.run_until(50000)
        return list(k.transcript)

    assert run() == run()


def test_transcript_export_format(tmp_path):
    k, _ = make()
    k.schedule(10, "dev", Payload(STIMULUS, "x"))
    k.run_until(10)
    path = tmp_path / "t.txt"
    k.export_transcript(str(path))
    assert path.read_text() == "10,0,dev,stimulus\n"


def test_epoch_maps_virtual_time():
    from datetime import datetime

    cfg = SimConfig(epoch=datetime(2021, 6, 1, 12, 0, 0))
    assert cfg.wall_datetime(0) == datetime(2021, 6, 1, 12, 0, 0)
    assert cfg.wall_datetime(61_500).second == 1
    assert cfg.wall_datetime(61_500).minute == 1
