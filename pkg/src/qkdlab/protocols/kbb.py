"""d-level generalization with controlled shifts, and its sectioned higher-dimensional repair."""

from __future__ import annotations

from functools import lru_cache

from ..qcore import LEFT_SHIFT, RIGHT_SHIFT, power_of, shift_gate
from ..runtime import ALICE, BOB, Session, send
from .base import RoundOutcome, apply_key_ops, carrier_label


@lru_cache(maxsize=None)
def residue_shifts(k: int):
    """Controlled shifts by the key index mod k, for a k-level carrier."""
    return power_of(shift_gate(k, 1)), power_of(shift_gate(k, -1))


def _shift_round(session, q, encode, decode):
    cfg = session.config
    if not 0 <= q < cfg.symbol_dim:
        raise ValueError(f"symbol {q} outside alphabet of size {cfg.symbol_dim}")
    apply_key_ops(session)
    g = carrier_label(session.round_index)
    session.prepare(ALICE, g, cfg.carrier_dim, q)
    session.control(ALICE, encode, "A", g)
    g = send(session, g, ALICE, BOB)
    session.control(BOB, decode, "B", g)
    bob = session.measure(BOB, g)
    session.discard(BOB, g)
    return RoundOutcome(alice_symbol=q, bob_symbol=bob)


def kbb_round(session: Session, q: int) -> RoundOutcome:
    if session.config.family != "kbb":
        raise ValueError("kbb_round needs a kbb session")
    return _shift_round(session, q, RIGHT_SHIFT, LEFT_SHIFT)


def kbb_hd_round(session: Session, q: int) -> RoundOutcome:
    if session.config.family != "kbb-hd":
        raise ValueError("kbb_hd_round needs a kbb-hd session")
    encode, decode = residue_shifts(session.config.carrier_dim)
    return _shift_round(session, q, encode, decode)
