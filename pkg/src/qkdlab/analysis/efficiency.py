"""Protocol efficiency: secret bits per transmitted unit, and its transmittance-weighted form."""

from __future__ import annotations

import math
from dataclasses import dataclass, replace


class NoCrossingError(ValueError):
    """Two practical-efficiency curves do not cross at a unique point in (0, 1]."""


@dataclass(frozen=True)
class EfficiencyInput:
    b_s: float  # expected secret bits per round
    q_t: float  # qubits sent over the quantum channel
    b_t: float  # bits sent over the classical channel
    tau: float = 1.0
    trips_exponent: int = 3
    name: str = ""

    def __post_init__(self):
        if self.b_s < 0 or self.q_t < 0 or self.b_t < 0:
            raise ValueError("b_s, q_t and b_t must be non-negative")
        if self.q_t + self.b_t <= 0:
            raise ValueError("q_t + b_t must be positive")
        if not 0 < self.tau <= 1:
            raise ValueError(f"tau must lie in (0, 1]; got {self.tau}")
        if self.trips_exponent < 0:
            raise ValueError("trips_exponent must be non-negative")

    def at(self, tau: float) -> "EfficiencyInput":
        return replace(self, tau=tau)


def efficiency(inp: EfficiencyInput) -> float:
    return inp.b_s / (inp.q_t + inp.b_t)


def practical_efficiency(inp: EfficiencyInput) -> float:
    return efficiency(inp) * inp.tau ** inp.trips_exponent


def crossover_tau(a: EfficiencyInput, b: EfficiencyInput) -> float:
    """Transmittance where the two practical-efficiency curves meet.

    Each curve is a monomial e * tau^n, so the crossing solves
    tau^(n_a - n_b) = e_b / e_a.
    """
    ea, eb = efficiency(a), efficiency(b)
    da = a.trips_exponent - b.trips_exponent
    if da == 0 or ea <= 0 or eb <= 0:
        raise NoCrossingError("curves are proportional or vanish; no unique crossing")
    tau = (eb / ea) ** (1.0 / da)
    if not 0 < tau <= 1 or not math.isfinite(tau):
        raise NoCrossingError(f"curves cross at tau = {tau:.6g}, outside (0, 1]")
    return tau


# the reusable-key scheme needs no classical bits for message rounds
THIS_SCHEME = EfficiencyInput(1.0, 1.0, 0.0, trips_exponent=3, name="reusable-key")
BB84 = EfficiencyInput(0.5, 1.0, 2.0, trips_exponent=1, name="BB84")
# one-way deterministic scheme with half efficiency and a single trip
LUCAMARINI_MANCINI = EfficiencyInput(1.0, 1.0, 1.0, trips_exponent=1, name="Lucamarini-Mancini")

REFERENCE_SCHEMES = (THIS_SCHEME, BB84, LUCAMARINI_MANCINI)


def tau_grid(step: float = 0.1) -> list[float]:
    n = round(1 / step)
    return [round((i + 1) * step, 10) for i in range(n)]


def efficiency_table(schemes=REFERENCE_SCHEMES, taus=None) -> list[dict]:
    """One row per tau with each scheme's practical efficiency."""
    taus = tau_grid() if taus is None else taus
    rows = []
    for t in taus:
        row = {"tau": t}
        for s in schemes:
            row[s.name] = practical_efficiency(s.at(t))
        rows.append(row)
    return rows
