"""Three-party secret sharing over a reusable GHZ key, and its D-level repair.

Odd rounds carry |q, q> to Bob and Charlie, each half encrypted by Alice's
key particle. Even rounds follow a Hadamard on every key share and carry the
codeword |q-bar> (|00>+|11> or |01>+|10>), encrypted once; Bob and Charlie
recover q from the parity of their two measurement outcomes.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..qcore import CNOT, StateVector, SubsystemLayout
from ..runtime import ALICE, BOB, CHARLIE, Session, send
from .base import RoundOutcome, _hadamard, apply_key_ops, carrier_label
from .zlg import PARITY_FLIP

SLOTS = (("b", BOB, "B"), ("c", CHARLIE, "C"))


@dataclass(frozen=True)
class BkEvenCodeword:
    q: int

    def __post_init__(self):
        if self.q not in (0, 1):
            raise ValueError(f"codeword bit must be 0 or 1, got {self.q}")

    def amplitudes(self) -> np.ndarray:
        v = np.zeros(4, dtype=np.complex128)
        if self.q == 0:
            v[[0, 3]] = 1 / np.sqrt(2)
        else:
            v[[1, 2]] = 1 / np.sqrt(2)
        return v

    def state(self, labels=("1", "2")) -> StateVector:
        return StateVector(SubsystemLayout((2, 2), labels), self.amplitudes())


def _prepare_carriers(session, n, q, codeword):
    gb, gc = carrier_label(n, "b"), carrier_label(n, "c")
    if codeword:
        # |q-bar> = CNOT(H|0> x |q>)
        session.prepare(ALICE, gb, 2, 0)
        session.prepare(ALICE, gc, 2, q)
        session.apply(ALICE, _hadamard(2, False), gb)
        session.control(ALICE, CNOT, gb, gc)
    else:
        session.prepare(ALICE, gb, 2, q)
        session.prepare(ALICE, gc, 2, q)
    return gb, gc


def _bk_round(session: Session, q: int, odd: bool) -> RoundOutcome:
    if q not in (0, 1):
        raise ValueError(f"symbol {q} is not a bit")
    apply_key_ops(session)
    n = session.round_index
    gb, gc = _prepare_carriers(session, n, q, codeword=not odd)
    session.control(ALICE, PARITY_FLIP, "A", gb)
    if odd:
        session.control(ALICE, PARITY_FLIP, "A", gc)
    received = {}
    for (slot, party, key), g in zip(SLOTS, (gb, gc)):
        received[slot] = send(session, g, ALICE, party)
    outcomes = {}
    for slot, party, key in SLOTS:
        g = received[slot]
        session.control(party, PARITY_FLIP, key, g)
        outcomes[slot] = session.measure(party, g)
        session.discard(party, g)
    if odd:
        return RoundOutcome(q, outcomes["b"], outcomes["c"])
    joint = outcomes["b"] ^ outcomes["c"]
    return RoundOutcome(q, joint, joint)


def _check(session, family):
    if session.config.family != family:
        raise ValueError(f"round needs a {family} session, got {session.config.family}")


def bk_round_odd(session: Session, q: int) -> RoundOutcome:
    _check(session, "bk")
    if session.round_index % 2 != 1:
        raise ValueError("odd encoding on an even round")
    return _bk_round(session, q, odd=True)


def bk_round_even(session: Session, q: int) -> RoundOutcome:
    _check(session, "bk")
    if session.round_index % 2 != 0:
        raise ValueError("even encoding on an odd round")
    return _bk_round(session, q, odd=False)


def bk_hd_round(session: Session, q: int, parity: str | None = None) -> RoundOutcome:
    _check(session, "bk-hd")
    expected = "odd" if session.round_index % 2 else "even"
    if parity is not None and parity != expected:
        raise ValueError(f"round {session.round_index} is {expected}, not {parity}")
    return _bk_round(session, q, odd=expected == "odd")
