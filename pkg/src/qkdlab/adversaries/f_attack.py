"""Entanglement-swapping relay attack on reusable-key protocols.

Round 1: Eve z-measures the flying carrier(s). This collapses the shared key
into a product state without disturbing the receivers.

Round 2: she keeps the carrier(s) Alice sends, which are now entangled with
Alice's key share, and hands the receivers half of a fresh Bell pair of her
own instead. Once the receivers decode and measure, Eve holds one particle
tied to Alice's key (her A side) and one tied to each receiver's key (her B
side). The receivers' round-2 symbol is a guess: right with probability 1/d.

Round 3 on: Eve co-rotates her particles with the parties' key operations,
decrypts each carrier with her A side, reads it, re-encrypts it with her B
side and forwards it. Her raw reading differs from the plaintext by a
case-dependent offset. She keeps one hypothesis per case and prunes them
against the public check values after the run.

The offset table for each case is not hard-coded. It is derived by running
the protocol itself with the relevant measurement outcomes postselected.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..protocols.base import carrier_label, key_ops
from ..protocols.config import ProtocolConfig
from ..qcore import (
    CNOT,
    LEFT_SHIFT,
    RIGHT_SHIFT,
    ControlledGateSpec,
    NumericalError,
    hadamard_gate,
    partial_trace_rank,
)
from ..runtime import ALICE, BOB, EVE, Interceptor
from .base import AttackState, Hypothesis, PlanError, build_report, resolve_hypotheses

DERIVE_ROUNDS = 10
CYCLE = 4


@dataclass(frozen=True)
class FamilyAdapter:
    """What Eve believes about the protocol she is attacking."""

    base: str
    dim: int
    encode: ControlledGateSpec
    decode: ControlledGateSpec
    slots: tuple[str, ...]

    def base_config(self, rounds: int = DERIVE_ROUNDS) -> ProtocolConfig:
        if self.base == "kbb":
            return ProtocolConfig("kbb", key_dim=self.dim, rounds=rounds)
        return ProtocolConfig(self.base, rounds=rounds)

    def sync_ops(self, n: int):
        """Gates for Eve's A-side and B-side particles at the start of round ``n``."""
        ops = dict(key_ops(self.base_config(), n))
        return ops.get(BOB), ops.get(ALICE)


def adapter_for(config: ProtocolConfig) -> FamilyAdapter:
    f = config.family
    if f.startswith("zlg"):
        if f != "zlg-hd" and not math.isclose(config.theta, math.pi / 4, abs_tol=1e-12):
            raise PlanError(f"f-attack on {f} needs theta = pi/4; got {config.theta}")
        return FamilyAdapter("zlg", 2, CNOT, CNOT, ("",))
    if f == "kbb":
        return FamilyAdapter("kbb", config.key_dim, RIGHT_SHIFT, LEFT_SHIFT, ("",))
    if f == "kbb-hd":
        return FamilyAdapter("kbb", config.carrier_dim, RIGHT_SHIFT, LEFT_SHIFT, ("",))
    if f in ("bk", "bk-hd"):
        return FamilyAdapter("bk", 2, CNOT, CNOT, ("b", "c"))
    raise PlanError(f"f-attack does not support family {f}")


class FAttack(Interceptor):
    name = "f-attack"

    def __init__(self, config: ProtocolConfig, adapter: FamilyAdapter | None = None, derive: bool = False):
        self.adapter = adapter or adapter_for(config)
        self.derive = derive
        self.a_side: list[str] = []
        self.b_side: list[str] = []
        self.readings: dict[int, list[int]] = {}
        self.key_rank: int | None = None

    def _slot(self, subsystem: str) -> int:
        slots = self.adapter.slots
        if len(slots) == 1:
            return 0
        return slots.index(subsystem.rsplit(".", 1)[1])

    def begin_round(self, session):
        n = session.round_index
        if n < 3 or not self.a_side:
            return
        a_op, b_op = self.adapter.sync_ops(n)
        for label in self.a_side:
            if a_op is not None:
                session.apply(EVE, a_op, label)
        for label in self.b_side:
            if b_op is not None:
                session.apply(EVE, b_op, label)

    def on_transit(self, session, subsystem, sender, receiver):
        n = session.round_index
        i = self._slot(subsystem)
        ad = self.adapter
        if n == 1:
            self.readings.setdefault(n, []).append(session.measure(EVE, subsystem))
            if i == len(ad.slots) - 1:
                self.key_rank = partial_trace_rank(session.state, ["A"])
            return subsystem
        if n == 2:
            session.take(EVE, subsystem)
            suffix = f".{ad.slots[i]}" if ad.slots[i] else ""
            keep, sub = f"eve.key{suffix}", f"eve.sub{suffix}"
            session.prepare(EVE, keep, ad.dim, 0)
            session.prepare(EVE, sub, ad.dim, 0)
            session.apply(EVE, _hadamard(ad.dim), keep)
            session.control(EVE, RIGHT_SHIFT, keep, sub)
            self.a_side.append(subsystem)
            self.b_side.append(keep)
            return sub
        session.control(EVE, ad.decode, self.a_side[i], subsystem)
        self.readings.setdefault(n, []).append(session.measure(EVE, subsystem))
        session.control(EVE, ad.encode, self.b_side[i], subsystem)
        return subsystem

    def raw_symbols(self) -> dict[int, int]:
        raw = {}
        for n, outs in self.readings.items():
            if len(outs) == 2 and n % 2 == 0:
                raw[n] = outs[0] ^ outs[1]
            else:
                raw[n] = outs[0]
        return raw

    def finish(self, session):
        if self.derive:
            return self.raw_symbols()
        hyps = hypotheses_for(self.adapter.base, self.adapter.dim)
        state = AttackState(self.adapter.dim, hyps, self.raw_symbols(),
                            tuple(self.a_side + self.b_side))
        state = resolve_hypotheses(state, session.board)
        return build_report(self.name, session, state, self.key_rank)


@lru_cache(maxsize=None)
def _hadamard(d: int):
    return hadamard_gate(d)


def _branches(base: str, dim: int):
    """(label, forced round-1 outcome j, round-2 symbol q2, forced receiver outcomes) per case."""
    if base == "bk":
        for j in range(2):
            for q2 in range(2):
                for mb in range(2):
                    yield (j, q2, mb), j, q2, {"eve.sub.b": mb, "eve.sub.c": mb ^ q2}
    else:
        for j in range(dim):
            for q2 in range(dim):
                yield (j, q2), j, q2, {"eve.sub": q2}


def _derive_once(adapter: FamilyAdapter, j: int, q2: int, receivers: dict, tail, seed: int):
    from ..protocols.driver import run_protocol

    cfg = adapter.base_config()
    forced = {(1, carrier_label(1, s), str(EVE)): j for s in adapter.slots}
    forced.update({(2, label): m for label, m in receivers.items()})
    symbols = [0, q2, *tail]
    eve = FAttack(cfg, adapter, derive=True)
    run = run_protocol(cfg, np.random.default_rng(seed), interceptor=eve,
                       postselect=forced, symbols=symbols)
    if run.errors():
        raise RuntimeError(f"relay corrupted rounds {run.errors()} in the success branch")
    raw = run.attack
    return tuple((raw[n] - symbols[n - 1]) % adapter.dim for n in range(3, DERIVE_ROUNDS + 1))


@lru_cache(maxsize=None)
def offset_table(base: str, dim: int) -> dict:
    """Map each case label to Eve's raw-minus-plaintext offsets from round 3 on.

    Every case is simulated twice, with different plaintexts and measurement
    seeds. The offsets must agree and repeat with period four, or the relay
    is not deterministic and the attack model is wrong.
    """
    adapter = adapter_for(ProtocolConfig(base, key_dim=dim if base == "kbb" else None))
    rng = np.random.default_rng(0)
    table = {}
    for label, j, q2, receivers in _branches(base, dim):
        tails = [tuple(int(x) for x in rng.integers(dim, size=DERIVE_ROUNDS - 2)) for _ in range(2)]
        try:
            first = _derive_once(adapter, j, q2, receivers, tails[0], 11)
        except NumericalError:
            continue  # branch has zero probability
        second = _derive_once(adapter, j, q2, receivers, tails[1], 12)
        if first != second or first[:CYCLE] != first[CYCLE:2 * CYCLE]:
            raise RuntimeError(f"relay offsets for case {label} are not deterministic: {first} vs {second}")
        table[label] = (j, q2, first[:CYCLE])
    return table


@lru_cache(maxsize=None)
def hypotheses_for(base: str, dim: int) -> tuple[Hypothesis, ...]:
    return tuple(
        Hypothesis(label, cycle, cycle_start=3, shifts=((1, j),), known=((2, q2),))
        for label, (j, q2, cycle) in offset_table(base, dim).items()
    )


def f_attack(config: ProtocolConfig) -> FAttack:
    return FAttack(config)


def f_attack_zlg(config: ProtocolConfig) -> FAttack:
    if not config.family.startswith("zlg"):
        raise PlanError(f"f_attack_zlg needs a zlg-family session; got {config.family}")
    return FAttack(config)


def f_attack_kbb(config: ProtocolConfig) -> FAttack:
    if not config.family.startswith("kbb"):
        raise PlanError(f"f_attack_kbb needs a kbb-family session; got {config.family}")
    return FAttack(config)


def f_attack_bk(config: ProtocolConfig) -> FAttack:
    if not config.family.startswith("bk"):
        raise PlanError(f"f_attack_bk needs a bk-family session; got {config.family}")
    return FAttack(config)
