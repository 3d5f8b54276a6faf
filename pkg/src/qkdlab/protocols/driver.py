"""Run a protocol family end to end: key setup, round dispatch, check comparison."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..qcore import StateVector, bell_state, fidelity, ghz_state
from ..runtime import ALICE, BOB, CHARLIE, Interceptor, Session, post
from .base import RoundOutcome
from .bk import bk_hd_round, bk_round_even, bk_round_odd
from .config import ProtocolConfig
from .kbb import kbb_hd_round, kbb_round
from .zlg import (
    zlg_check_a_round,
    zlg_check_b_round,
    zlg_hd_round,
    zlg_nonorth_round,
    zlg_round,
)

MODES = ("message", "check-i", "check-ii")


def initial_key(config: ProtocolConfig) -> StateVector:
    if config.parties == 3:
        return ghz_state(config.key_dim, ("A", "B", "C"))
    return bell_state(config.key_dim, ("A", "B"))


def new_session(config: ProtocolConfig, rng=None, interceptor: Interceptor | None = None,
                postselect: dict | None = None) -> Session:
    key = initial_key(config)
    holders = {"A": ALICE, "B": BOB}
    if config.parties == 3:
        holders["C"] = CHARLIE
    return Session(config, key, holders, rng, interceptor, postselect)


@dataclass(frozen=True)
class Schedule:
    symbols: tuple[int, ...]
    modes: tuple[str, ...]
    checks: frozenset[int]

    def is_check(self, n: int) -> bool:
        return n in self.checks


def make_schedule(config: ProtocolConfig, rng, check_fraction: float = 0.0,
                  check_rounds=()) -> Schedule:
    """Alice's private choices for every round, drawn up front from ``rng``.

    Draw order is fixed (symbols, then modes or check coins) so a seed pins the
    whole schedule.
    """
    if not 0.0 <= check_fraction <= 1.0:
        raise ValueError(f"check fraction must lie in [0, 1], got {check_fraction}")
    n = config.rounds
    symbols = tuple(int(s) for s in rng.integers(config.symbol_dim, size=n))
    forced = {int(r) for r in check_rounds if 1 <= int(r) <= n}
    if config.has_check_modes:
        if config.exact_modes:
            modes = list(np.repeat(MODES, n // 3))
            rng.shuffle(modes)
        else:
            modes = [MODES[i] for i in rng.integers(3, size=n)]
        modes = [("check-i" if (i + 1) in forced and m == "message" else str(m))
                 for i, m in enumerate(modes)]
        checks = {i + 1 for i, m in enumerate(modes) if m != "message"}
    else:
        modes = ["message"] * n
        coins = rng.random(n) < check_fraction
        checks = {i + 1 for i in range(n) if coins[i]} | forced
    return Schedule(symbols, tuple(modes), frozenset(checks))


def play_round(session: Session, q: int, mode: str = "message") -> RoundOutcome:
    """Advance the session by one round and fill its transcript record."""
    rec = session.begin_round()
    n = session.round_index
    f = session.config.family
    if f == "zlg":
        out = zlg_round(session, q)
    elif f == "zlg-nonorth":
        out = zlg_nonorth_round(session, q)
    elif f == "zlg-check-a":
        out = zlg_check_a_round(session, q, mode)
    elif f == "zlg-check-b":
        out = zlg_check_b_round(session, q, mode)
    elif f == "zlg-hd":
        out = zlg_hd_round(session, q)
    elif f == "kbb":
        out = kbb_round(session, q)
    elif f == "kbb-hd":
        out = kbb_hd_round(session, q)
    elif f == "bk":
        out = bk_round_odd(session, q) if n % 2 else bk_round_even(session, q)
    elif f == "bk-hd":
        out = bk_hd_round(session, q)
    else:
        raise ValueError(f"unknown family {f!r}")
    rec.mode = mode if session.config.has_check_modes else None
    rec.alice, rec.bob, rec.charlie = out.alice_symbol, out.bob_symbol, out.charlie_symbol
    before = session.scratch.get("pre_encode")
    if before is not None and before.layout == session.state.layout:
        # decoding should hand back the key exactly as it was before encryption
        rec.key_fidelity = fidelity(before, session.state)
    return out


@dataclass
class ProtocolRun:
    config: ProtocolConfig
    schedule: Schedule
    outcomes: list[RoundOutcome]
    session: Session
    detected_at: int | None = None
    detections: list[int] = field(default_factory=list)
    attack: object = None

    @property
    def transcript(self):
        return self.session.transcript

    @property
    def board(self):
        return self.session.board

    def errors(self) -> list[int]:
        """Rounds whose receiver symbols differ from Alice's."""
        return [i + 1 for i, o in enumerate(self.outcomes) if not o.correct]


def compare_checks(session: Session, schedule: Schedule, outcomes) -> list[int]:
    """Alice posts every check symbol with its round; the receivers compare privately."""
    mismatched = []
    for n in sorted(schedule.checks):
        q = schedule.symbols[n - 1]
        post(session, ALICE, {"kind": "check", "round": n, "value": q}, round=n)
        rec = session.transcript[n]
        rec.kind = "check"
        if not outcomes[n - 1].correct:
            rec.detected = True
            mismatched.append(n)
    return mismatched


def run_protocol(config: ProtocolConfig, choice_rng, measure_rng=None, interceptor=None,
                 check_fraction: float = 0.0, check_rounds=(), postselect=None,
                 symbols=None) -> ProtocolRun:
    """Play ``config.rounds`` rounds, then compare check rounds on the board.

    ``symbols`` overrides Alice's drawn symbols (the schedule is still drawn so
    the random streams stay aligned).
    """
    schedule = make_schedule(config, choice_rng, check_fraction, check_rounds)
    if symbols is not None:
        if len(symbols) != config.rounds:
            raise ValueError(f"{len(symbols)} symbols for {config.rounds} rounds")
        schedule = Schedule(tuple(int(s) for s in symbols), schedule.modes, schedule.checks)
    rng = measure_rng if measure_rng is not None else choice_rng
    session = new_session(config, rng, interceptor, postselect)
    outcomes = [play_round(session, q, m) for q, m in zip(schedule.symbols, schedule.modes)]
    mismatched = compare_checks(session, schedule, outcomes)
    run = ProtocolRun(config, schedule, outcomes, session,
                      detected_at=mismatched[0] if mismatched else None, detections=mismatched)
    session.scratch["detected_at"] = run.detected_at
    session.scratch["schedule"] = schedule
    if interceptor is not None:
        run.attack = interceptor.finish(session)
        inferred = getattr(run.attack, "inferred", None)
        if inferred is not None:
            for rec, e in zip(session.transcript.rounds, inferred):
                rec.eve = e
    return run
