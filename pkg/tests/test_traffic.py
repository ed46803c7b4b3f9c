"""Signal scheduler and plate registry behavior."""

import random

import pytest

from citysim import CitySim
from citysim.devices.traffic import GREEN_MS, normalize_plate
from citysim.errors import DuplicatePlateError, InvalidRoadError

from traffic_reference import reference_greens, run_city_greens


def make_city():
    return CitySim()


def presence(city, at, road, flag):
    city.stimulus("traffic", "approach-presence",
                  {"road": road, "present": flag}, at=at)


def test_initial_all_off_and_idle():
    city = make_city()
    snap = city.traffic.snapshot()
    assert snap["signals"] == {"1": "OFF", "2": "OFF", "3": "OFF", "4": "OFF"}
    assert snap["green"] == 0
    assert snap["countdown_ms"] == 0


def test_presence_on_idle_grants_immediately():
    city = make_city()
    presence(city, 1000, 2, True)
    city.kernel.run_until(1000)
    snap = city.traffic.snapshot()
    assert snap["signals"]["2"] == "GREEN"
    assert snap["signals"]["1"] == "RED"
    assert snap["signals"]["3"] == "RED"
    assert snap["signals"]["4"] == "RED"
    assert snap["countdown_ms"] == GREEN_MS


def test_presence_false_on_idle_does_nothing():
    city = make_city()
    presence(city, 1000, 2, False)
    city.kernel.run_until(5000)
    assert city.traffic.snapshot()["green"] == 0


def test_green_holds_exactly_phase_duration():
    city = make_city()
    presence(city, 0, 1, True)
    presence(city, 0, 3, True)
    city.kernel.run_until(GREEN_MS - 1)
    assert city.traffic.snapshot()["green"] == 1
    assert city.traffic.snapshot()["countdown_ms"] == 1
    city.kernel.run_until(GREEN_MS)
    # boundary hands green to the next waiting road with no gap
    assert city.traffic.snapshot()["green"] == 3
    assert city.traffic.snapshot()["countdown_ms"] == GREEN_MS


def test_scan_skips_empty_roads():
    city = make_city()
    presence(city, 0, 1, True)
    presence(city, 0, 4, True)
    city.kernel.run_until(0)
    assert city.traffic.snapshot()["green"] == 1
    city.kernel.run_until(GREEN_MS)
    # roads 2 and 3 are empty; 4 wins the scan
    assert city.traffic.snapshot()["green"] == 4
    city.kernel.run_until(2 * GREEN_MS)
    assert city.traffic.snapshot()["green"] == 1


def test_arrival_mid_green_waits_for_boundary():
    city = make_city()
    presence(city, 0, 2, True)
    presence(city, 5000, 1, True)
    city.kernel.run_until(5000)
    assert city.traffic.snapshot()["green"] == 2
    city.kernel.run_until(GREEN_MS)
    assert city.traffic.snapshot()["green"] == 1


def test_lone_road_regranted_back_to_back():
    city = make_city()
    presence(city, 0, 3, True)
    for cycle in range(3):
        city.kernel.run_until(cycle * GREEN_MS)
        snap = city.traffic.snapshot()
        assert snap["green"] == 3
        assert snap["countdown_ms"] == GREEN_MS


def test_all_clear_goes_dark_at_boundary():
    city = make_city()
    presence(city, 0, 1, True)
    presence(city, 7000, 1, False)
    city.kernel.run_until(19999)
    assert city.traffic.snapshot()["green"] == 1
    city.kernel.run_until(GREEN_MS)
    snap = city.traffic.snapshot()
    assert snap["green"] == 0
    assert snap["signals"] == {"1": "OFF", "2": "OFF", "3": "OFF", "4": "OFF"}


def test_arrival_exactly_at_boundary_is_seen():
    city = make_city()
    presence(city, 0, 1, True)
    presence(city, 5000, 1, False)
    presence(city, GREEN_MS, 2, True)
    city.kernel.run_until(GREEN_MS)
    # the 20000 ms arrival lands before the boundary decision runs
    assert city.traffic.snapshot()["green"] == 2


def test_invalid_road_rejected():
    city = make_city()
    with pytest.raises(InvalidRoadError):
        city.traffic.on_approach_presence(0, True)
    with pytest.raises(InvalidRoadError):
        city.traffic.on_approach_presence(5, True)


def test_signal_rows_logged_on_transitions_only():
    city = make_city()
    presence(city, 0, 2, True)
    city.kernel.run_until(3 * GREEN_MS)
    rows = city.telemetry.rows("traffic")
    # one grant: road 2 GREEN plus three RED rows; re-grants change nothing
    assert len(rows) == 4
    greens = [r for r in rows if r["signal"] == "GREEN"]
    assert [g["road"] for g in greens] == ["2"]


# -- plate registry --------------------------------------------------------

def test_normalize_plate():
    assert normalize_plate("  ab  12\tc ") == "AB 12 C"
    assert normalize_plate("XYZ999") == "XYZ999"


def test_duplicate_plate_rejected():
    city = make_city()
    city.traffic.register_plate("KA 01 AB 1234", "asha", "REGISTERED")
    with pytest.raises(DuplicatePlateError):
        city.traffic.register_plate("ka  01 ab 1234", "other", "REGISTERED")


def test_plate_verdicts_and_alarm_latch():
    city = make_city()
    t = city.traffic
    t.register_plate("GOOD 1", "asha", "REGISTERED")
    t.register_plate("BAD 1", "mal", "CRIMINAL")

    rec = t.on_plate_read(1, "good  1")
    assert rec["owner"] == "asha"
    assert t.alarm is False

    assert t.on_plate_read(2, "NOPE 9") is None
    assert t.alarm is True

    t.on_plate_read(3, "bad 1")
    assert t.alarm is True

    # a later clean read does not clear the latch
    t.on_plate_read(4, "GOOD 1")
    assert t.alarm is True

    verdicts = [r["verdict"] for r in city.telemetry.rows("plate")]
    assert verdicts == ["registered", "unregistered", "criminal", "registered"]
    plates = [r["plate"] for r in city.telemetry.rows("plate")]
    assert plates == ["GOOD 1", "NOPE 9", "BAD 1", "GOOD 1"]


def test_empty_plate_rejected():
    city = make_city()
    with pytest.raises(ValueError):
        city.traffic.on_plate_read(1, "   ")


def test_bad_registration_status_rejected():
    city = make_city()
    with pytest.raises(ValueError):
        city.traffic.register_plate("X 1", "who", "WANTED")


# -- equivalence against the brute-force reference --------------------------

def random_schedule(rng, n_events, horizon):
    return [(rng.randrange(0, horizon), rng.randrange(1, 5), rng.random() < 0.5)
            for _ in range(n_events)]


def test_matches_reference_on_random_schedules():
    rng = random.Random(1401)
    for _ in range(100):
        n = rng.randrange(1, 40)
        horizon = rng.randrange(GREEN_MS, 8 * GREEN_MS)
        events = random_schedule(rng, n, horizon)
        expect = reference_greens(events, horizon)
        got = run_city_greens(events, horizon)
        assert got == expect, f"events={events} horizon={horizon}"


def test_matches_reference_on_boundary_heavy_schedules():
    # times snapped to phase-boundary multiples stress same-instant ordering
    rng = random.Random(77)
    for _ in range(50):
        n = rng.randrange(2, 25)
        events = [(rng.randrange(0, 7) * GREEN_MS, rng.randrange(1, 5),
                   rng.random() < 0.6) for _ in range(n)]
        horizon = 8 * GREEN_MS
        expect = reference_greens(events, horizon)
        got = run_city_greens(events, horizon)
        assert got == expect, f"events={events}"
