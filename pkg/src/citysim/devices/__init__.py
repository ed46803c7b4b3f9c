from .streetlight import Streetlight
from .home import HomeAutomation
from .door import DoorSecurity
from .traffic import TrafficControl
from .parking import Parking
from .accident import AccidentDispatch
from .display import InfoDisplay

__all__ = [
    "Streetlight",
    "HomeAutomation",
    "DoorSecurity",
    "TrafficControl",
    "Parking",
    "AccidentDispatch",
    "InfoDisplay",
]
