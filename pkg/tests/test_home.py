"""Appliance bank: absolute set commands, toggle counting, LAN path."""

import random

import pytest

from citysim import CitySim
from citysim.devices.home import APPLIANCES
from citysim.errors import UnknownApplianceError


def test_initial_all_off():
    city = CitySim()
    assert all(city.home.states[k] == "OFF" for k in APPLIANCES)
    assert set(APPLIANCES) == {"fridge", "ac", "light1", "light2", "fan", "tv"}


def test_set_on_and_idempotence():
    city = CitySim()
    home = city.home
    home.handle_app_command("fridge", True)
    assert home.states["fridge"] == "ON"
    assert home.toggle_count("fridge") == 1
    home.handle_app_command("fridge", True)
    assert home.toggle_count("fridge") == 1  # no-change: no bump
    assert len(city.telemetry.rows("home_appliance")) == 1


def test_unknown_appliance():
    city = CitySim()
    with pytest.raises(UnknownApplianceError):
        city.home.handle_app_command("heater", True)
    with pytest.raises(UnknownApplianceError):
        city.home.toggle_count("heater")


def test_on_off_on_counts_three():
    city = CitySim()
    for flag in (True, False, True):
        city.home.handle_app_command("fan", flag)
    assert city.home.toggle_count("fan") == 3


def test_lan_delivery_path():
    city = CitySim()
    city.send_home_command("tv", True, at=0)
    city.kernel.run_until(49)
    assert city.home.states["tv"] == "OFF"  # still in flight
    city.kernel.run_until(50)
    assert city.home.states["tv"] == "ON"


def test_last_writer_wins_and_recount_oracle():
    city = CitySim()
    rng = random.Random(13)
    last = {k: "OFF" for k in APPLIANCES}
    changes = 0
    for _ in range(400):
        k = rng.choice(APPLIANCES)
        on = rng.random() < 0.5
        new = "ON" if on else "OFF"
        if last[k] != new:
            changes += 1
        last[k] = new
        city.home.handle_app_command(k, on)
    assert city.home.states == last
    assert sum(city.home.toggle_counts.values()) == changes
    assert len(city.telemetry.rows("home_appliance")) == changes
