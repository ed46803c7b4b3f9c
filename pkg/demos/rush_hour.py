"""Intersection walkthrough: skip-on-empty scheduling in one evening rush.

Run:  python3 demos/rush_hour.py
"""

from citysim import CitySim

city = CitySim()

# cars queue up on roads 1 and 4; roads 2 and 3 stay empty for a while
city.stimulus("traffic", "approach-presence", {"road": 1, "present": True}, at=0)
city.stimulus("traffic", "approach-presence", {"road": 4, "present": True}, at=0)
# road 2 fills up mid-phase; the running green must not end early
city.stimulus("traffic", "approach-presence", {"road": 2, "present": True}, at=12000)
# everyone clears out
for road in (1, 2, 4):
    city.stimulus("traffic", "approach-presence", {"road": road, "present": False},
                  at=55000)

city.kernel.run_until(90000)

print("signal transitions (from the telemetry log):")
for row in city.telemetry.rows("traffic"):
    print(f"  {row['time']}  road {row['road']} -> {row['signal']}")

snap = city.traffic.snapshot()
print(f"\nat 90 s: green={snap['green']} (0 means all heads OFF)")
print("note how road 3 never got a phase: no car ever waited there.")
