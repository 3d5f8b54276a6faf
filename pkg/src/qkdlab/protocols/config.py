from __future__ import annotations

import math
from dataclasses import asdict, dataclass, fields

FAMILIES = (
    "zlg",
    "zlg-nonorth",
    "zlg-check-a",
    "zlg-check-b",
    "zlg-hd",
    "kbb",
    "kbb-hd",
    "bk",
    "bk-hd",
)
ZLG_FAMILIES = ("zlg", "zlg-nonorth", "zlg-check-a", "zlg-check-b")
QUBIT_KEY_FAMILIES = ZLG_FAMILIES + ("bk",)


class ConfigError(ValueError):
    """Invalid configuration; names the field and the constraint it breaks."""

    def __init__(self, field: str, constraint: str):
        self.field = field
        self.constraint = constraint
        super().__init__(f"{field}: {constraint}")


@dataclass(frozen=True)
class ProtocolConfig:
    family: str = "zlg"
    theta: float = math.pi / 4
    key_dim: int | None = None
    carrier_dim: int | None = None
    alpha: float = 0.6
    beta: float = 0.8
    rounds: int = 20
    exact_modes: bool = False

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError("family", f"must be one of {', '.join(FAMILIES)}; got {self.family!r}")
        if not isinstance(self.rounds, int) or self.rounds < 1:
            raise ConfigError("rounds", f"must be a positive integer; got {self.rounds!r}")
        if not math.isfinite(self.theta):
            raise ConfigError("theta", "must be finite")
        key, carrier = self.key_dim, self.carrier_dim
        f = self.family
        if f in QUBIT_KEY_FAMILIES:
            key = 2 if key is None else key
            carrier = 2 if carrier is None else carrier
            if key != 2:
                raise ConfigError("key_dim", f"{f} uses a qubit key (key_dim = 2); got {key}")
            if carrier != 2:
                raise ConfigError("carrier_dim", f"{f} uses qubit carriers (carrier_dim = 2); got {carrier}")
        elif f in ("zlg-hd", "bk-hd"):
            key = 4 if key is None else key
            carrier = 2 if carrier is None else carrier
            if key < 2 or key % 2:
                raise ConfigError("key_dim", f"{f} needs an even key dimension D = 2d >= 2; got {key}")
            if carrier != 2:
                raise ConfigError("carrier_dim", f"{f} uses qubit carriers (carrier_dim = 2); got {carrier}")
        elif f == "kbb":
            key = 3 if key is None else key
            carrier = key if carrier is None else carrier
            if key < 2:
                raise ConfigError("key_dim", f"kbb needs d >= 2; got {key}")
            if carrier != key:
                raise ConfigError("carrier_dim", f"kbb carriers have the key dimension {key}; got {carrier}")
        elif f == "kbb-hd":
            key = 4 if key is None else key
            carrier = 2 if carrier is None else carrier
            if carrier < 2:
                raise ConfigError("carrier_dim", f"kbb-hd needs k >= 2; got {carrier}")
            if key % carrier or key // carrier < 2:
                raise ConfigError(
                    "key_dim", f"kbb-hd needs key_dim = k*d with d >= 2 (k = {carrier}); got {key}"
                )
        if f == "zlg-nonorth":
            a, b = self.alpha, self.beta
            if abs(a * a + b * b - 1) > 1e-9:
                raise ConfigError("alpha/beta", f"need alpha^2 + beta^2 = 1; got {a}^2 + {b}^2")
            if abs(a) < 1e-12 or abs(b) < 1e-12:
                raise ConfigError("alpha/beta", "alpha and beta must both be nonzero")
            if abs(a - b) < 1e-12:
                raise ConfigError("alpha/beta", "alpha must differ from beta")
        if self.exact_modes and f in ("zlg-check-a", "zlg-check-b") and self.rounds % 3:
            raise ConfigError("rounds", "exact mode scheduling needs rounds divisible by 3")
        object.__setattr__(self, "key_dim", int(key))
        object.__setattr__(self, "carrier_dim", int(carrier))

    @property
    def parties(self) -> int:
        return 3 if self.family in ("bk", "bk-hd") else 2

    @property
    def carriers_per_round(self) -> int:
        return 2 if self.parties == 3 else 1

    @property
    def symbol_dim(self) -> int:
        """Alphabet size of one transmitted symbol."""
        if self.family == "kbb":
            return self.key_dim
        if self.family == "kbb-hd":
            return self.carrier_dim
        return 2

    @property
    def has_check_modes(self) -> bool:
        return self.family in ("zlg-check-a", "zlg-check-b")

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolConfig":
        known = {f.name for f in fields(cls)}
        for key in data:
            if key not in known:
                raise ConfigError(key, f"unknown protocol field; expected one of {sorted(known)}")
        return cls(**data)
