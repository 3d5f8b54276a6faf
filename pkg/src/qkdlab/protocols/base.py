from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from ..qcore import hadamard_gate, rotation_gate
from ..runtime import ALICE, BOB, CHARLIE, Session

KEY_LABELS = {ALICE: "A", BOB: "B", CHARLIE: "C"}


@dataclass(frozen=True)
class RoundOutcome:
    alice_symbol: int
    bob_symbol: int
    charlie_symbol: int | None = None
    round_kind: str = "message"
    detected: bool = False

    def __post_init__(self):
        if self.detected and self.round_kind != "check":
            raise ValueError("only check rounds can raise detection")

    @property
    def correct(self) -> bool:
        ok = self.bob_symbol == self.alice_symbol
        if self.charlie_symbol is not None:
            ok = ok and self.charlie_symbol == self.alice_symbol
        return ok


def carrier_label(n: int, slot: str = "") -> str:
    return f"g{n}{'.' + slot if slot else ''}"


@lru_cache(maxsize=None)
def _hadamard(d: int, conjugated: bool):
    return hadamard_gate(d, conjugated)


@lru_cache(maxsize=None)
def _rotation(theta: float):
    return rotation_gate(theta)


def key_ops(config, n: int) -> list:
    """Gates each legitimate party applies to its key share at the start of round ``n``."""
    f = config.family
    d = config.key_dim
    if f in ("zlg", "zlg-nonorth", "zlg-check-a", "zlg-check-b"):
        r = _rotation(config.theta)
        return [(ALICE, r), (BOB, r)]
    if f == "kbb":
        return [(ALICE, _hadamard(d, False)), (BOB, _hadamard(d, True))]
    if f in ("zlg-hd", "kbb-hd"):
        # H then H* on each side over two rounds composes to the identity
        odd = n % 2 == 1
        return [(ALICE, _hadamard(d, not odd)), (BOB, _hadamard(d, odd))]
    if f in ("bk", "bk-hd"):
        if n == 1:
            return []
        h = _hadamard(d, n % 2 == 1)
        return [(ALICE, h), (BOB, h), (CHARLIE, h)]
    raise ValueError(f)


def apply_key_ops(session: Session) -> None:
    for party, gate in key_ops(session.config, session.round_index):
        session.apply(party, gate, KEY_LABELS[party])
    session.scratch["pre_encode"] = session.state


QUARTER_TURN = math.pi / 4
