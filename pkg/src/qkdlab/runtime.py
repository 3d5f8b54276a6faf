"""Protocol execution fabric: custody of subsystems, the quantum channel, the public board.

A :class:`Session` owns the joint state of everything in play. Parties act on
it only through session methods, which check that the acting party holds
every subsystem it touches. Carriers travel with :func:`send`; while a
carrier is in flight it is marked in transit and only the installed
interceptor may act on it.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from enum import Enum
from typing import Any

import numpy as np

from .qcore import (
    ControlledGateSpec,
    Gate,
    StateVector,
    apply_controlled,
    apply_single,
    discard,
    extend,
    measure_z,
)


class PartyId(str, Enum):
    ALICE = "Alice"
    BOB = "Bob"
    CHARLIE = "Charlie"
    EVE = "Eve"

    def __str__(self):
        return self.value


IN_TRANSIT = "InTransit"

ALICE, BOB, CHARLIE, EVE = PartyId.ALICE, PartyId.BOB, PartyId.CHARLIE, PartyId.EVE


class CustodyError(RuntimeError):
    """A party touched a subsystem it does not hold (protocol-integrity violation)."""


class CustodyLedger:
    def __init__(self, holders: dict | None = None):
        self._holders: dict[str, Any] = dict(holders or {})
        self.interceptor_active = False

    def holder(self, label: str):
        try:
            return self._holders[label]
        except KeyError:
            raise CustodyError(f"{label!r} is not a live subsystem") from None

    def assign(self, label: str, holder) -> None:
        self._holders[label] = holder

    def release(self, label: str) -> None:
        self.holder(label)
        del self._holders[label]

    def labels(self) -> list[str]:
        return list(self._holders)

    def snapshot(self) -> dict[str, str]:
        return {k: str(v) for k, v in self._holders.items()}

    def held_by(self, party) -> list[str]:
        return [k for k, v in self._holders.items() if v == party]


def assert_custody(ledger: CustodyLedger, party, subsystems) -> None:
    """No-op when ``party`` may act on every subsystem; raises CustodyError otherwise."""
    for label in subsystems:
        h = ledger.holder(label)
        if h == party:
            continue
        if h == IN_TRANSIT and party == EVE and ledger.interceptor_active:
            continue
        raise CustodyError(f"{party} cannot act on {label!r}, held by {h}")


@dataclass(frozen=True)
class Announcement:
    round: int
    announcer: str
    payload: dict


class PublicBoard:
    """Append-only classical channel readable by everyone, the interceptor included."""

    def __init__(self):
        self._entries: list[Announcement] = []

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def entries(self) -> tuple[Announcement, ...]:
        return tuple(self._entries)

    def checks(self) -> list[Announcement]:
        return [a for a in self._entries if a.payload.get("kind") == "check"]


def announce(board: PublicBoard, round: int, announcer, payload: dict) -> None:
    board._entries.append(Announcement(round, str(announcer), dict(payload)))


@dataclass(frozen=True)
class Transit:
    round: int
    subsystem: str
    sender: str
    receiver: str
    delivered: str


class Interceptor:
    """Channel hook. The base class is the passive interceptor: it touches nothing."""

    name = "passive"

    def begin_round(self, session: "Session") -> None:
        pass

    def on_transit(self, session: "Session", subsystem: str, sender, receiver) -> str:
        return subsystem

    def finish(self, session: "Session") -> None:
        pass


class QuantumChannel:
    def __init__(self, interceptor: Interceptor | None = None):
        self.interceptor = interceptor
        self.log: list[Transit] = []


@dataclass
class RoundRecord:
    round: int
    kind: str = "message"
    mode: str | None = None
    alice: int | None = None
    bob: int | None = None
    charlie: int | None = None
    eve: int | None = None
    detected: bool = False
    key_fidelity: float | None = None
    transits: list = field(default_factory=list)
    announcements: list = field(default_factory=list)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


class Transcript:
    def __init__(self):
        self.rounds: list[RoundRecord] = []

    def new_round(self, n: int) -> RoundRecord:
        if n != len(self.rounds) + 1:
            raise ValueError(f"round {n} does not follow round {len(self.rounds)}")
        rec = RoundRecord(n)
        self.rounds.append(rec)
        return rec

    def __getitem__(self, n: int) -> RoundRecord:
        return self.rounds[n - 1]

    def __len__(self):
        return len(self.rounds)

    def to_jsonl(self) -> str:
        return "".join(r.to_json() + "\n" for r in self.rounds)


class Session:
    """One protocol run: joint state, custody, channel, board and transcript.

    ``postselect`` maps ``(round, subsystem)`` or ``(round, subsystem, party)``
    to a forced measurement outcome; it turns a random run into a chosen
    branch for exact analysis.
    """

    def __init__(self, config, state: StateVector, holders: dict, rng,
                 interceptor: Interceptor | None = None, postselect: dict | None = None):
        self.config = config
        self.state = state
        self.ledger = CustodyLedger(holders)
        self.channel = QuantumChannel(interceptor)
        self.board = PublicBoard()
        self.transcript = Transcript()
        self.rng = rng if rng is not None else np.random.default_rng()
        self.round_index = 0
        self.postselect = dict(postselect or {})
        self.scratch: dict = {}

    @property
    def interceptor(self) -> Interceptor | None:
        return self.channel.interceptor

    @property
    def record(self) -> RoundRecord:
        return self.transcript[self.round_index]

    def begin_round(self) -> RoundRecord:
        self.round_index += 1
        rec = self.transcript.new_round(self.round_index)
        if self.interceptor is not None:
            self.interceptor.begin_round(self)
        return rec

    def prepare(self, party, label: str, dim: int, vector=0) -> None:
        self.state = extend(self.state, label, dim, vector)
        self.ledger.assign(label, party)

    def apply(self, party, gate: Gate, label: str) -> None:
        assert_custody(self.ledger, party, [label])
        self.state = apply_single(self.state, gate, label)

    def control(self, party, spec: ControlledGateSpec, control: str, target: str) -> None:
        assert_custody(self.ledger, party, [control, target])
        self.state = apply_controlled(self.state, spec, control, target)

    def measure(self, party, label: str) -> int:
        assert_custody(self.ledger, party, [label])
        key = (self.round_index, label)
        forced = self.postselect.get(key + (str(party),), self.postselect.get(key))
        rec, self.state = measure_z(self.state, label, self.rng, outcome=forced)
        return rec.outcome

    def discard(self, party, label: str) -> None:
        assert_custody(self.ledger, party, [label])
        self.state = discard(self.state, label)
        self.ledger.release(label)

    def take(self, party, label: str) -> None:
        """Interceptor seizes an in-flight subsystem."""
        assert_custody(self.ledger, party, [label])
        self.ledger.assign(label, party)


def send(session: Session, subsystem: str, sender, receiver) -> str:
    """Move ``subsystem`` from ``sender`` to ``receiver`` through the channel.

    Returns the label actually delivered; an interceptor may substitute one of
    its own subsystems of equal dimension.
    """
    ledger = session.ledger
    assert_custody(ledger, sender, [subsystem])
    ledger.assign(subsystem, IN_TRANSIT)
    delivered = subsystem
    interceptor = session.interceptor
    if interceptor is not None:
        ledger.interceptor_active = True
        try:
            delivered = interceptor.on_transit(session, subsystem, sender, receiver)
        finally:
            ledger.interceptor_active = False
    if delivered != subsystem:
        if ledger.holder(delivered) != EVE:
            raise CustodyError(f"substitute {delivered!r} is not held by the interceptor")
        if session.state.layout.dim(delivered) != session.state.layout.dim(subsystem):
            raise CustodyError("substitute dimension differs from the intercepted carrier")
        if ledger.holder(subsystem) == IN_TRANSIT:
            ledger.assign(subsystem, EVE)
    elif ledger.holder(subsystem) != IN_TRANSIT:
        raise CustodyError(f"{subsystem!r} was seized but not replaced")
    ledger.assign(delivered, receiver)
    transit = Transit(session.round_index, subsystem, str(sender), str(receiver), delivered)
    session.channel.log.append(transit)
    if session.round_index:
        session.record.transits.append(asdict(transit))
    return delivered


def post(session: Session, announcer, payload: dict, round: int | None = None) -> None:
    """Announce on the session board and mirror the entry into that round's transcript record."""
    n = session.round_index if round is None else round
    announce(session.board, n, announcer, payload)
    if n:
        session.transcript[n].announcements.append({"announcer": str(announcer), **payload})
