"""Routing protocol implementations and the name registry."""

from ..engine import Engine
from .aodv import Aodv
from .base import Protocol
from .dsr import Dsr
from .eelar import Eelar
from .lar import Lar


def build_protocol(name: str, engine: Engine) -> Protocol:
    if name == "EELAR":
        return Eelar(engine)
    if name == "LAR1":
        return Lar(engine, scheme=1)
    if name == "LAR2":
        return Lar(engine, scheme=2)
    if name == "AODV":
        return Aodv(engine)
    if name == "DSR":
        return Dsr(engine)
    raise ValueError(f"unknown protocol {name!r}")
