"""Common surface all routing protocols implement against the engine."""

from ..engine import Engine
from ..packets import Packet
from ..schemas import ScenarioConfig


class Protocol:
    name = "?"

    def __init__(self, engine: Engine):
        self.engine = engine
        self.cfg: ScenarioConfig = engine.cfg

    def control_packet(self, kind: str, origin: int, dst: int, t: float, **fields) -> Packet:
        return Packet(
            kind=kind,
            origin=origin,
            dst=dst,
            pid=self.engine.next_pid(origin),
            size=self.cfg.control_bytes,
            created=t,
            **fields,
        )

    def start(self) -> None:
        """Schedule initial joins/timers. Called once before the run."""

    def on_data(self, src: int, dst: int, pid, t: float) -> None:
        raise NotImplementedError

    def on_packet(self, node: int, pkt: Packet, t: float) -> None:
        raise NotImplementedError

    def on_timer(self, target: int, tag: str, data, t: float) -> None:
        pass

    def on_unicast_fail(self, sender: int, receiver: int, pkt: Packet, t: float) -> None:
        pass
