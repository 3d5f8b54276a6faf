"""Attack strategies installed as channel interceptors."""

from .base import (
    AttackReport,
    AttackState,
    Hypothesis,
    PassiveInterceptor,
    PlanError,
    build_report,
    passive_interceptor,
    resolve_hypotheses,
)
from .cnot_ancilla import CnotAncillaAttack, cnot_ancilla_attack
from .f_attack import (
    FamilyAdapter,
    FAttack,
    adapter_for,
    f_attack,
    f_attack_bk,
    f_attack_kbb,
    f_attack_zlg,
    hypotheses_for,
    offset_table,
)

ATTACKS = ("passive", "cnot-ancilla", "f-attack")


def make_interceptor(name: str, config):
    """Fresh interceptor for one session, by attack name."""
    if name == "passive":
        return passive_interceptor()
    if name == "cnot-ancilla":
        return cnot_ancilla_attack(config)
    if name == "f-attack":
        return f_attack(config)
    raise PlanError(f"unknown attack {name!r}; expected one of {', '.join(ATTACKS)}")


__all__ = [
    "ATTACKS",
    "AttackReport",
    "AttackState",
    "CnotAncillaAttack",
    "FAttack",
    "FamilyAdapter",
    "Hypothesis",
    "PassiveInterceptor",
    "PlanError",
    "adapter_for",
    "build_report",
    "cnot_ancilla_attack",
    "f_attack",
    "f_attack_bk",
    "f_attack_kbb",
    "f_attack_zlg",
    "hypotheses_for",
    "make_interceptor",
    "offset_table",
    "passive_interceptor",
    "resolve_hypotheses",
]
