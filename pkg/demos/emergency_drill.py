"""Emergency drill: GPS fix, fire detection, and SMS dispatch accounting.

Run:  python3 demos/emergency_drill.py
"""

from citysim import CitySim
from citysim.transports import compose_nmea_rmc

city = CitySim()

# the roadside unit reports its position
sentence = compose_nmea_rmc(28.4200, 70.3000)
print("GPS sentence:", sentence)
city.stimulus("accident", "nmea", {"sentence": sentence}, at=0)

# a corrupted copy arrives too; it must be dropped, not crash anything
city.stimulus("accident", "nmea", {"sentence": sentence[:-2] + "00"}, at=500)

# flame sensor trips: pump + alarm latch, fire department is texted
city.stimulus("accident", "flame-sample", {"value": 700}, at=2000)

# bystanders press the roadside buttons
city.stimulus("accident", "button", {"kind": "ambulance"}, at=3000)
city.stimulus("accident", "button", {"kind": "police"}, at=3100)

# operator resets the sounder after the drill
city.stimulus("accident", "reset", {}, at=20000)

city.kernel.run_until(25000)

snap = city.accident.snapshot()
print(f"\npump={snap['pump']} alarm={snap['alarm']} counters={snap['counters']}")
print("\ndelivered SMS (2 s network latency each):")
for msg in city.sms.dump():
    print(f"  t={msg['delivered_at_ms']:>5} ms  to {msg['to']}: {msg['body']}")
