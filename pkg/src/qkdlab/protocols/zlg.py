"""Bell-pair quantum-encryption protocol with qubit carriers, plus its repaired variants.

The parties share a two-qubit Bell key. Each round both rotate their key
particle, Alice encrypts a carrier qubit with a CNOT from her key particle,
and Bob decrypts with a CNOT from his. Variants:

* non-orthogonal carriers: the carrier is psi_0 = a|0> + b|1> or
  psi_1 = b|0> - a|1> and Bob reads it out in that basis;
* check variant A: check rounds may carry an extra quarter-turn on Alice's
  key particle that Bob undoes once she announces it;
* check variant B: check rounds may send the bare carrier, which Bob measures
  directly after Alice's announcement;
* higher-dimensional key: a D-level Bell key, generalized Hadamards, and a
  carrier flipped by the parity of the key index.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from ..qcore import CNOT, basis_change, pauli_x, power_of
from ..runtime import ALICE, BOB, Session, post, send
from .base import QUARTER_TURN, RoundOutcome, _rotation, apply_key_ops, carrier_label

PARITY_FLIP = power_of(pauli_x())


def _check_family(session: Session, *families):
    if session.config.family not in families:
        raise ValueError(f"round needs family in {families}, session is {session.config.family}")


def _finish(session, carrier, q, bob):
    session.discard(BOB, carrier)
    return RoundOutcome(alice_symbol=q, bob_symbol=bob)


def _encrypted_round(session: Session, q: int, spec=CNOT) -> RoundOutcome:
    apply_key_ops(session)
    g = carrier_label(session.round_index)
    session.prepare(ALICE, g, 2, q)
    session.control(ALICE, spec, "A", g)
    g = send(session, g, ALICE, BOB)
    session.control(BOB, spec, "B", g)
    return _finish(session, g, q, session.measure(BOB, g))


def zlg_round(session: Session, q: int) -> RoundOutcome:
    _check_family(session, "zlg", "zlg-check-a", "zlg-check-b")
    return _encrypted_round(session, q)


@lru_cache(maxsize=None)
def carrier_basis(alpha: float, beta: float) -> np.ndarray:
    """Rows are psi_0 and psi_1."""
    return np.array([[alpha, beta], [beta, -alpha]], dtype=np.complex128)


def zlg_nonorth_round(session: Session, q: int) -> RoundOutcome:
    _check_family(session, "zlg-nonorth")
    cfg = session.config
    basis = carrier_basis(cfg.alpha, cfg.beta)
    apply_key_ops(session)
    g = carrier_label(session.round_index)
    session.prepare(ALICE, g, 2, basis[q])
    session.control(ALICE, CNOT, "A", g)
    g = send(session, g, ALICE, BOB)
    session.control(BOB, CNOT, "B", g)
    session.apply(BOB, basis_change(basis), g)
    return _finish(session, g, q, session.measure(BOB, g))


def _check_round(session: Session, q: int, mode: str, variant: str) -> RoundOutcome:
    if mode not in ("message", "check-i", "check-ii"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode != "check-ii":
        return _encrypted_round(session, q)
    apply_key_ops(session)
    g = carrier_label(session.round_index)
    session.prepare(ALICE, g, 2, q)
    if variant == "a":
        session.apply(ALICE, _rotation(QUARTER_TURN), "A")
        session.control(ALICE, CNOT, "A", g)
    g = send(session, g, ALICE, BOB)
    if variant == "a":
        post(session, ALICE, {"kind": "operation", "op": "R(pi/4)", "to": "Bob"})
        session.apply(BOB, _rotation(QUARTER_TURN), "B")
        session.control(BOB, CNOT, "B", g)
    else:
        post(session, ALICE, {"kind": "operation", "op": "none", "to": "Bob"})
    return _finish(session, g, q, session.measure(BOB, g))


def zlg_check_a_round(session: Session, q: int, mode: str = "message") -> RoundOutcome:
    _check_family(session, "zlg-check-a")
    return _check_round(session, q, mode, "a")


def zlg_check_b_round(session: Session, q: int, mode: str = "message") -> RoundOutcome:
    _check_family(session, "zlg-check-b")
    return _check_round(session, q, mode, "b")


def zlg_hd_round(session: Session, q: int) -> RoundOutcome:
    _check_family(session, "zlg-hd")
    return _encrypted_round(session, q, PARITY_FLIP)
