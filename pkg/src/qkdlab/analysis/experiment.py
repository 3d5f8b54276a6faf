"""Monte Carlo harness: many independent protocol runs against one attack, aggregated."""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

import numpy as np

from ..adversaries import ATTACKS, PlanError, make_interceptor
from ..protocols import ProtocolConfig, run_protocol
from .efficiency import EfficiencyInput, efficiency, practical_efficiency, tau_grid
from .stats import CI_METHODS, DEFAULT_SIGMA, binomial_interval

SCHEMA_VERSION = 1
DEFAULT_SEED = 1729
SEED_ENV = "QKDLAB_SEED"


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw == "":
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise PlanError(f"{SEED_ENV} must be an integer; got {raw!r}") from None


@dataclass(frozen=True)
class ExperimentPlan:
    config: ProtocolConfig
    attack: str = "passive"
    trials: int = 100
    check_fraction: float = 0.0
    check_rounds: tuple[int, ...] = ()
    seed: int = DEFAULT_SEED
    ci_method: str = "normal"
    sigma: float = DEFAULT_SIGMA
    trips_exponent: int = 3

    def __post_init__(self):
        if self.attack not in ATTACKS:
            raise PlanError(f"unknown attack {self.attack!r}; expected one of {', '.join(ATTACKS)}")
        if not isinstance(self.trials, int) or self.trials < 1:
            raise PlanError(f"trials must be a positive integer; got {self.trials!r}")
        if not 0.0 <= self.check_fraction <= 1.0:
            raise PlanError(f"check fraction must lie in [0, 1]; got {self.check_fraction}")
        if self.ci_method not in CI_METHODS:
            raise PlanError(f"ci method must be one of {CI_METHODS}; got {self.ci_method!r}")
        object.__setattr__(self, "check_rounds", tuple(sorted({int(r) for r in self.check_rounds})))
        bad = [r for r in self.check_rounds if not 1 <= r <= self.config.rounds]
        if bad:
            raise PlanError(f"check rounds {bad} fall outside 1..{self.config.rounds}")
        make_interceptor(self.attack, self.config)  # rejects bad family/attack pairs up front

    def to_dict(self) -> dict:
        d = asdict(self)
        d["config"] = self.config.to_dict()
        d["check_rounds"] = list(self.check_rounds)
        return d


def trial_streams(seed: int, trial: int):
    """Alice's choice stream and the measurement stream for one trial.

    The trial index is mixed into the master seed through the seed sequence's
    spawn key, so any single trial can be replayed on its own.
    """
    ss = np.random.SeedSequence(seed, spawn_key=(trial,))
    choices, measure = ss.spawn(2)
    return np.random.default_rng(choices), np.random.default_rng(measure)


@dataclass(frozen=True)
class TrialResult:
    trial: int
    errors: tuple[bool, ...]
    checks: tuple[int, ...]
    detected_at: int | None
    succeeded: bool
    leak: float
    key_rank: int | None
    contradiction: bool
    notices: int
    transcript: str | None = None


def run_trial(plan: ExperimentPlan, trial: int, keep_transcript: bool = False) -> TrialResult:
    choice_rng, measure_rng = trial_streams(plan.seed, trial)
    interceptor = make_interceptor(plan.attack, plan.config)
    run = run_protocol(plan.config, choice_rng, measure_rng, interceptor,
                       plan.check_fraction, plan.check_rounds)
    rep = run.attack
    notices = sum(1 for a in run.board if a.payload.get("kind") == "operation")
    return TrialResult(
        trial=trial,
        errors=tuple(not o.correct for o in run.outcomes),
        checks=tuple(sorted(run.schedule.checks)),
        detected_at=run.detected_at,
        succeeded=rep.succeeded,
        leak=rep.leak,
        key_rank=rep.key_rank,
        contradiction=rep.contradiction,
        notices=notices,
        transcript=run.transcript.to_jsonl() if keep_transcript else None,
    )


def _run_chunk(args):
    plan, indices, keep = args
    return [run_trial(plan, i, keep) for i in indices]


def run_trials(plan: ExperimentPlan, jobs: int = 1, keep_transcripts: bool = False) -> list[TrialResult]:
    """All trials in index order, serially or across ``jobs`` worker processes."""
    if jobs <= 1:
        return [run_trial(plan, i, keep_transcripts) for i in range(plan.trials)]
    size = max(1, math.ceil(plan.trials / (jobs * 4)))
    chunks = [(plan, range(s, min(s + size, plan.trials)), keep_transcripts)
              for s in range(0, plan.trials, size)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return [r for part in pool.map(_run_chunk, chunks) for r in part]


@dataclass
class ExperimentReport:
    plan: dict
    trials: int
    rounds: int
    attack_success: dict
    detection: dict
    qber: dict
    qber_per_round: list
    leak_fraction: float
    mean_rounds_to_detection: float | None
    key_rank: dict | None
    contradictions: int
    efficiency: dict
    schema_version: int = SCHEMA_VERSION
    transcripts: list | None = field(default=None, repr=False)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("transcripts")
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2) + "\n"


def efficiency_block(plan: ExperimentPlan, results: list[TrialResult]) -> dict:
    """Observed efficiency of the run: secret symbols against channel use, per round."""
    cfg = plan.config
    total = len(results) * cfg.rounds
    checks = sum(len(r.checks) for r in results)
    notices = sum(r.notices for r in results)
    bits = math.log2(cfg.symbol_dim)
    b_s = (total - checks) / total * bits
    q_t = cfg.carriers_per_round * math.log2(cfg.carrier_dim)
    # each check discloses one symbol, each operation notice one bit
    b_t = (checks * bits + notices) / total
    inp = EfficiencyInput(b_s, q_t, b_t, trips_exponent=plan.trips_exponent)
    return {
        "b_s": b_s,
        "q_t": q_t,
        "b_t": b_t,
        "epsilon": efficiency(inp),
        "trips_exponent": plan.trips_exponent,
        "practical": [{"tau": t, "epsilon_prime": practical_efficiency(inp.at(t))} for t in tau_grid()],
    }


def aggregate(plan: ExperimentPlan, results: list[TrialResult]) -> ExperimentReport:
    n = len(results)
    rounds = plan.config.rounds
    ci = lambda k, m: binomial_interval(k, m, plan.ci_method, plan.sigma).to_dict()
    successes = sum(r.succeeded for r in results)
    detected = [r.detected_at for r in results if r.detected_at is not None]
    errors = np.array([r.errors for r in results], dtype=bool)
    ranks = [r.key_rank for r in results if r.key_rank is not None]
    return ExperimentReport(
        plan=plan.to_dict(),
        trials=n,
        rounds=rounds,
        attack_success=ci(successes, n),
        detection=ci(len(detected), n),
        qber=ci(int(errors.sum()), errors.size),
        qber_per_round=[float(x) for x in errors.mean(axis=0)],
        leak_fraction=float(np.mean([r.leak for r in results])),
        mean_rounds_to_detection=float(np.mean(detected)) if detected else None,
        key_rank={"min": min(ranks), "max": max(ranks)} if ranks else None,
        contradictions=sum(r.contradiction for r in results),
        efficiency=efficiency_block(plan, results),
    )


def run_experiment(plan: ExperimentPlan, jobs: int = 1, keep_transcripts: bool = False) -> ExperimentReport:
    results = run_trials(plan, jobs, keep_transcripts)
    report = aggregate(plan, results)
    if keep_transcripts:
        report.transcripts = [r.transcript for r in results]
    return report


def detection_curve(plan: ExperimentPlan, check_counts, jobs: int = 1) -> list[tuple[int, float]]:
    """Detection probability when rounds 2..n+1 are checked, for each n in ``check_counts``.

    No random checks are added, and the run is lengthened when needed to fit
    the checked rounds.
    """
    curve = []
    for count in check_counts:
        rounds = max(plan.config.rounds, count + 1)
        sub = replace(plan, config=replace(plan.config, rounds=rounds), check_fraction=0.0,
                      check_rounds=tuple(range(2, count + 2)))
        results = run_trials(sub, jobs)
        curve.append((int(count), sum(r.detected_at is not None for r in results) / len(results)))
    return curve
