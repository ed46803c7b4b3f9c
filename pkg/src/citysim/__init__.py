"""Deterministic discrete-event simulation of a small smart city."""

from .kernel import Kernel, Payload, SimConfig, SimEvent
from .city import CitySim
from .scenario import (
    Scenario,
    check_assertions,
    load_scenario,
    parse_scenario,
    run_scenario,
)
from .transports import (
    GpsFix,
    SmsMessage,
    compose_nmea_rmc,
    nmea_checksum,
    parse_nmea_rmc,
)

__version__ = "0.1.0"

__all__ = [
    "CitySim",
    "GpsFix",
    "Kernel",
    "Payload",
    "Scenario",
    "SimConfig",
    "SimEvent",
    "SmsMessage",
    "check_assertions",
    "compose_nmea_rmc",
    "load_scenario",
    "nmea_checksum",
    "parse_nmea_rmc",
    "parse_scenario",
    "run_scenario",
    "__version__",
]
