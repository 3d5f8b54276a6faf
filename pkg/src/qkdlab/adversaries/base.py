"""Eve's bookkeeping: raw symbols, hypotheses over the shared-state case, the final report."""

from __future__ import annotations

from dataclasses import dataclass, field, replace

from ..protocols.config import ConfigError
from ..runtime import Interceptor


class PlanError(ConfigError):
    """Attack cannot be run against the requested protocol configuration."""

    def __init__(self, constraint: str):
        super().__init__("attack", constraint)


@dataclass(frozen=True)
class Hypothesis:
    """One candidate for the case Eve is in, as a rule turning raw symbols into plaintext.

    ``known`` pins a round's plaintext outright; ``shifts`` gives per-round
    offsets for early rounds; from ``cycle_start`` on the offsets repeat ``cycle``.
    """

    label: tuple
    cycle: tuple[int, ...]
    cycle_start: int = 1
    shifts: tuple[tuple[int, int], ...] = ()
    known: tuple[tuple[int, int], ...] = ()

    def predict(self, n: int, raw: int | None, dim: int) -> int | None:
        for r, v in self.known:
            if r == n:
                return v
        if raw is None:
            return None
        for r, off in self.shifts:
            if r == n:
                return (raw - off) % dim
        if n < self.cycle_start:
            return None
        return (raw - self.cycle[(n - self.cycle_start) % len(self.cycle)]) % dim


@dataclass(frozen=True)
class AttackState:
    dim: int
    hypotheses: tuple[Hypothesis, ...]
    raw: dict = field(default_factory=dict)
    held: tuple[str, ...] = ()
    contradiction: bool = False

    @property
    def resolved(self) -> bool:
        return len(self.hypotheses) == 1 and not self.contradiction

    def predictions(self, n: int) -> set:
        return {h.predict(n, self.raw.get(n), self.dim) for h in self.hypotheses}

    def inferred(self, n: int) -> int | None:
        """Eve's plaintext for round ``n`` if every surviving hypothesis agrees."""
        if self.contradiction:
            return None
        p = self.predictions(n)
        return p.pop() if len(p) == 1 else None


def resolve_hypotheses(state: AttackState, board) -> AttackState:
    """Drop hypotheses that disagree with any announced check value.

    If nothing survives the state is flagged as contradictory and the
    hypothesis set is left as it was.
    """
    checks = [a.payload for a in board if a.payload.get("kind") == "check"]
    keep = []
    for h in state.hypotheses:
        ok = True
        for c in checks:
            n = c["round"]
            p = h.predict(n, state.raw.get(n), state.dim)
            if p is not None and p != c["value"]:
                ok = False
                break
        if ok:
            keep.append(h)
    if not keep:
        return replace(state, contradiction=True)
    return replace(state, hypotheses=tuple(keep))


@dataclass(frozen=True)
class AttackReport:
    attack: str
    succeeded: bool = False
    detected_at: int | None = None
    inferred: tuple = ()
    resolved: bool = False
    contradiction: bool = False
    leak: float = 0.0
    key_rank: int | None = None

    def __post_init__(self):
        if self.succeeded and self.detected_at is not None:
            raise ValueError("a detected attack cannot have succeeded")

    def to_dict(self) -> dict:
        return {
            "attack": self.attack,
            "succeeded": self.succeeded,
            "detected_at": self.detected_at,
            "inferred": list(self.inferred),
            "resolved": self.resolved,
            "contradiction": self.contradiction,
            "leak": self.leak,
            "key_rank": self.key_rank,
        }


def build_report(name: str, session, state: AttackState | None, key_rank=None) -> AttackReport:
    """Score Eve's inferred symbols against Alice's schedule after the run."""
    rounds = session.config.rounds
    detected_at = session.scratch.get("detected_at")
    schedule = session.scratch["schedule"]
    if state is None:
        return AttackReport(name, False, detected_at, (None,) * rounds)
    inferred = tuple(state.inferred(n) for n in range(1, rounds + 1))
    message = [n for n in range(1, rounds + 1) if n not in schedule.checks]
    hits = [inferred[n - 1] == schedule.symbols[n - 1] for n in message]
    leak = sum(hits) / len(message) if message else 0.0
    succeeded = detected_at is None and not state.contradiction and all(hits)
    return AttackReport(name, succeeded, detected_at, inferred, state.resolved,
                        state.contradiction, leak, key_rank)


class PassiveInterceptor(Interceptor):
    name = "passive"

    def finish(self, session):
        return build_report(self.name, session, None)


def passive_interceptor() -> PassiveInterceptor:
    return PassiveInterceptor()
