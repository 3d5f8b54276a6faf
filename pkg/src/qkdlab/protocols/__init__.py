"""Protocol families: round functions and the run driver."""

from .base import KEY_LABELS, RoundOutcome, apply_key_ops, carrier_label, key_ops
from .bk import BkEvenCodeword, bk_hd_round, bk_round_even, bk_round_odd
from .config import FAMILIES, ConfigError, ProtocolConfig
from .driver import (
    ProtocolRun,
    Schedule,
    initial_key,
    make_schedule,
    new_session,
    play_round,
    run_protocol,
)
from .kbb import kbb_hd_round, kbb_round
from .zlg import (
    carrier_basis,
    zlg_check_a_round,
    zlg_check_b_round,
    zlg_hd_round,
    zlg_nonorth_round,
    zlg_round,
)

__all__ = [
    "FAMILIES",
    "KEY_LABELS",
    "BkEvenCodeword",
    "ConfigError",
    "ProtocolConfig",
    "ProtocolRun",
    "RoundOutcome",
    "Schedule",
    "apply_key_ops",
    "bk_hd_round",
    "bk_round_even",
    "bk_round_odd",
    "carrier_basis",
    "carrier_label",
    "initial_key",
    "kbb_hd_round",
    "kbb_round",
    "key_ops",
    "make_schedule",
    "new_session",
    "play_round",
    "run_protocol",
    "zlg_check_a_round",
    "zlg_check_b_round",
    "zlg_hd_round",
    "zlg_nonorth_round",
    "zlg_round",
]
