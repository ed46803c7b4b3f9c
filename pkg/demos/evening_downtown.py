"""An evening downtown: dusk lighting, home control, and the notice board.

Run:  python3 demos/evening_downtown.py
"""

from citysim import CitySim

city = CitySim()

# dusk: the light sensor drops below the day/night threshold
city.send_streetlight_command("A", at=0)  # hand control to the automatic mode
city.stimulus("streetlight", "ldr-sample", {"value": 12}, at=1000)

# a pedestrian walks past lamps 3 and 4; each goes HIGH for 5 s then DIMs
city.stimulus("streetlight", "lane-presence", {"lane": 3, "distance_cm": 80}, at=5000)
city.stimulus("streetlight", "lane-presence", {"lane": 4, "distance_cm": 60}, at=6500)

# meanwhile someone gets home and switches things on from their phone
city.send_home_command("light1", True, at=4000)
city.send_home_command("ac", True, at=4200)
city.send_home_command("tv", True, at=9000)
city.send_home_command("tv", False, at=30000)

# the city posts tonight's notice; 40 chars means it scrolls as a marquee
city.send_notice("ROAD CLOSED AHEAD USE DETOUR VIA MAIN ST", at=2000)
city.stimulus("display", "env-sample", {"temp_c": 27.5, "rh_pct": 61.0}, at=2500)

for checkpoint in (1200, 5100, 10020, 11000, 31000):
    city.kernel.run_until(checkpoint)
    lights = city.streetlight.snapshot()["levels"]
    print(f"t={checkpoint:>6} ms  lamps={lights}")

print("\nhome at 31 s:", {k: v for k, v in city.home.snapshot().items()
                          if k != "counts"})
print("\nnotice board right now:")
for line in city.display.render()["notice"]:
    print(f"  |{line}|")
print("\nappliance log:")
for row in city.telemetry.rows("home_appliance"):
    print(f"  {row['time']}  {row['appliance']} -> {row['new_state']}")
