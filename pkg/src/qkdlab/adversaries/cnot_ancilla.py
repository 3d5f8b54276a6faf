"""Copy each flying carrier onto a fresh ancilla with a CNOT and read the ancilla."""

from __future__ import annotations

from ..protocols.config import ZLG_FAMILIES
from ..qcore import CNOT
from ..runtime import EVE, Interceptor
from .base import AttackState, Hypothesis, PlanError, build_report, resolve_hypotheses


class CnotAncillaAttack(Interceptor):
    """Eve's raw bit is the carrier value in flight, q xor (key bit).

    With no rotation the key bit is frozen after the first copy, so she keeps
    two hypotheses for it and lets the check announcements pick one.
    """

    name = "cnot-ancilla"

    def __init__(self, config):
        if config.family not in ZLG_FAMILIES:
            raise PlanError(f"cnot-ancilla needs a qubit-carrier family {ZLG_FAMILIES}; got {config.family}")
        self.raw: dict[int, int] = {}

    def on_transit(self, session, subsystem, sender, receiver):
        anc = f"eve.copy{session.round_index}"
        session.prepare(EVE, anc, 2, 0)
        session.control(EVE, CNOT, subsystem, anc)
        # nothing touches the ancilla again, so reading it now is the same as later
        self.raw[session.round_index] = session.measure(EVE, anc)
        session.discard(EVE, anc)
        return subsystem

    def finish(self, session):
        hyps = tuple(Hypothesis((k,), (k,)) for k in (0, 1))
        state = resolve_hypotheses(AttackState(2, hyps, dict(self.raw)), session.board)
        return build_report(self.name, session, state)


def cnot_ancilla_attack(config) -> CnotAncillaAttack:
    return CnotAncillaAttack(config)
