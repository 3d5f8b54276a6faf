"""Exact state checks: closed forms against brute-force matrices and the library kernels.

Every check builds the same state three ways:

* from its closed-form amplitudes,
* by multiplying full Kronecker-product operators into a full vector,
* with the library (StateVector plus the gate kernels).

The library and brute-force vectors must agree amplitude by amplitude. Both
must agree with the closed form up to a global phase, checked through
fidelity.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import reduce

import numpy as np

from ..qcore import (
    CNOT,
    RIGHT_SHIFT,
    StateVector,
    SubsystemLayout,
    apply_controlled,
    apply_single,
    bell_state,
    extend,
    ghz_state,
    hadamard_gate,
    measure_z,
    pauli_x,
    power_of,
    rotation_gate,
    shift_gate,
)

TOL = 1e-10


@dataclass
class CheckResult:
    name: str
    description: str
    deviation: float
    passed: bool
    notes: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {"name": self.name, "description": self.description, "deviation": self.deviation,
                "passed": self.passed, "notes": list(self.notes)}


@dataclass(frozen=True)
class VerifyParams:
    alpha: float = 0.6
    beta: float = 0.8
    theta: float = math.pi / 4
    qudit_dim: int = 3
    hd_dim: int = 4
    sections: int = 2


# brute-force helpers working on plain vectors


def ket(dims, indices) -> np.ndarray:
    return reduce(np.kron, [np.eye(d)[i] for d, i in zip(dims, indices)]).astype(np.complex128)


def embed(dims, pos, mat) -> np.ndarray:
    ops = [np.eye(d) for d in dims]
    ops[pos] = mat
    return reduce(np.kron, ops)


def embed_controlled(dims, control, target, mats) -> np.ndarray:
    total = np.zeros((int(np.prod(dims)),) * 2, dtype=np.complex128)
    for i in range(dims[control]):
        ops = [np.eye(d) for d in dims]
        proj = np.zeros((dims[control],) * 2)
        proj[i, i] = 1
        ops[control] = proj
        ops[target] = mats[i]
        total += reduce(np.kron, ops)
    return total


def normalized(v) -> np.ndarray:
    v = np.asarray(v, dtype=np.complex128)
    return v / np.linalg.norm(v)


def overlap_fidelity(a, b) -> float:
    return float(abs(np.vdot(normalized(a), normalized(b))) ** 2)


def _compare(name, description, closed, brute, lib: StateVector, notes=()) -> CheckResult:
    dev = max(
        float(np.max(np.abs(lib.amps - brute))),
        1 - overlap_fidelity(closed, brute),
        1 - overlap_fidelity(closed, lib.amps),
        abs(np.linalg.norm(closed) - 1),
    )
    dev = max(float(dev), 0.0)
    return CheckResult(name, description, dev, bool(dev <= TOL), list(notes))


def _sv(dims, labels, amps) -> StateVector:
    return StateVector(SubsystemLayout(tuple(dims), tuple(labels)), np.asarray(amps, dtype=np.complex128))


def _diag(d, parties) -> np.ndarray:
    return sum(ket((d,) * parties, (j,) * parties) for j in range(d)) / math.sqrt(d)


# individual checks


def check_bell_key(p: VerifyParams):
    closed = (ket((2, 2), (0, 0)) + ket((2, 2), (1, 1))) / math.sqrt(2)
    h = hadamard_gate(2).matrix
    brute = embed_controlled((2, 2), 0, 1, CNOT.matrices(2, 2)) @ embed((2, 2), 0, h) @ ket((2, 2), (0, 0))
    return _compare("bell-key", "two-qubit Bell key (|00>+|11>)/sqrt2", closed, brute, bell_state(2))


def _zlg_encode(q, theta):
    dims = (2, 2, 2)
    r = rotation_gate(theta)
    key = bell_state(2)
    lib = apply_single(apply_single(key, r, "A"), r, "B")
    lib = apply_controlled(extend(lib, "g", 2, q), CNOT, "A", "g")
    start = np.kron(_diag(2, 2), np.eye(2)[q])
    brute = embed_controlled(dims, 0, 2, CNOT.matrices(2, 2)) @ embed(dims, 1, r.matrix) @ embed(dims, 0, r.matrix) @ start
    return lib, brute


def check_zlg_encode(q):
    def check(p: VerifyParams):
        lib, brute = _zlg_encode(q, p.theta)
        closed = (ket((2, 2, 2), (0, 0, q)) + ket((2, 2, 2), (1, 1, 1 - q))) / math.sqrt(2)
        return _compare(f"zlg-encode-{q}", f"rotated Bell key, carrier |{q}>, CNOT from A: GHZ-type state",
                        closed, brute, lib)
    return check


def check_zlg_decode(p: VerifyParams):
    dims = (2, 2, 2)
    worst = None
    for q in (0, 1):
        lib, brute = _zlg_encode(q, p.theta)
        lib = apply_controlled(lib, CNOT, "B", "g")
        brute = embed_controlled(dims, 1, 2, CNOT.matrices(2, 2)) @ brute
        closed = np.kron(_diag(2, 2), np.eye(2)[q])
        res = _compare("zlg-decode", "CNOT from B restores Bell key x |q>", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_nonorth_encode(p: VerifyParams):
    a, b = p.alpha, p.beta
    psi0 = np.array([a, b], dtype=np.complex128)
    psi1 = np.array([b, -a], dtype=np.complex128)
    dims = (2, 2, 2)
    closed = (np.kron(ket((2, 2), (0, 0)), psi0)
              + np.kron(ket((2, 2), (1, 1)), 2 * a * b * psi0 + (b * b - a * a) * psi1)) / math.sqrt(2)
    brute = embed_controlled(dims, 0, 2, CNOT.matrices(2, 2)) @ np.kron(_diag(2, 2), psi0)
    lib = apply_controlled(extend(bell_state(2), "g", 2, psi0), CNOT, "A", "g")
    notes = []
    if abs(a * a + b * b - 1) > 1e-12:
        notes.append("alpha^2 + beta^2 != 1")
    return _compare("nonorth-encode", f"carrier a|0>+b|1> (a={a}, b={b}) after CNOT from A",
                    closed, brute, lib, notes)


def check_qudit_bell(p: VerifyParams):
    d = p.qudit_dim
    closed = sum(ket((d, d), (j, j)) for j in range(d)) / math.sqrt(d)
    h = hadamard_gate(d).matrix
    brute = embed_controlled((d, d), 0, 1, RIGHT_SHIFT.matrices(d, d)) @ embed((d, d), 0, h) @ ket((d, d), (0, 0))
    return _compare("qudit-bell-key", f"generalized Bell key, d={d}", closed, brute, bell_state(d))


def check_kbb_encode(p: VerifyParams):
    d = p.qudit_dim
    q = 1 % d
    dims = (d, d, d)
    closed = sum(ket(dims, (j, j, (q + j) % d)) for j in range(d)) / math.sqrt(d)
    brute = embed_controlled(dims, 0, 2, RIGHT_SHIFT.matrices(d, d)) @ np.kron(_diag(d, 2), np.eye(d)[q])
    lib = apply_controlled(extend(bell_state(d), "k", d, q), RIGHT_SHIFT, "A", "k")
    return _compare("kbb-encode", f"controlled right shift of |{q}> by the d={d} key", closed, brute, lib)


def check_hadamard_invariance(p: VerifyParams):
    worst = None
    for d in range(2, 9):
        h, hs = hadamard_gate(d), hadamard_gate(d, True)
        closed = _diag(d, 2)
        brute = np.kron(h.matrix, hs.matrix) @ closed
        lib = apply_single(apply_single(bell_state(d), h, "A"), hs, "B")
        res = _compare("hadamard-invariance", "H x H* leaves the d-level Bell key unchanged, d=2..8",
                       closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_hd_key(p: VerifyParams):
    D = p.hd_dim
    closed = sum(ket((D, D), (j, j)) for j in range(D)) / math.sqrt(D)
    h = hadamard_gate(D).matrix
    brute = embed_controlled((D, D), 0, 1, RIGHT_SHIFT.matrices(D, D)) @ embed((D, D), 0, h) @ ket((D, D), (0, 0))
    return _compare("hd-key", f"D={D} Bell key", closed, brute, bell_state(D))


PARITY_FLIP = power_of(pauli_x())


def _hd_encode(D, q):
    dims = (D, D, 2)
    lib = apply_controlled(extend(bell_state(D), "g", 2, q), PARITY_FLIP, "A", "g")
    brute = embed_controlled(dims, 0, 2, PARITY_FLIP.matrices(D, 2)) @ np.kron(_diag(D, 2), np.eye(2)[q])
    return lib, brute


def check_hd_encode(p: VerifyParams):
    D = p.hd_dim
    worst = None
    for q in (0, 1):
        lib, brute = _hd_encode(D, q)
        closed = sum(ket((D, D, 2), (j, j, (q + j) % 2)) for j in range(D)) / math.sqrt(D)
        res = _compare("hd-encode", f"parity-controlled flip of |q> by the D={D} key", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_hd_decode(p: VerifyParams):
    D = p.hd_dim
    worst = None
    for q in (0, 1):
        lib, brute = _hd_encode(D, q)
        lib = apply_controlled(lib, PARITY_FLIP, "B", "g")
        brute = embed_controlled((D, D, 2), 1, 2, PARITY_FLIP.matrices(D, 2)) @ brute
        closed = np.kron(_diag(D, 2), np.eye(2)[q])
        res = _compare("hd-decode", "second parity flip from B restores key x |q>", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def _section_key(D, k, i):
    """Normalized sum of |j, j> over j = i mod k."""
    return normalized(sum(ket((D, D), (j, j)) for j in range(i, D, k)))


def _collapsed_hadamard(D, k, i, name, description):
    d = D // k
    start = _section_key(D, k, i)
    h, hs = hadamard_gate(D), hadamard_gate(D, True)
    brute = np.kron(h.matrix, hs.matrix) @ start
    lib = apply_single(apply_single(_sv((D, D), ("A", "B"), start), h, "A"), hs, "B")
    closed = np.zeros(D * D, dtype=np.complex128)
    for l in range(D):
        for t in range(k):
            closed += np.exp(-2j * np.pi * i * t / k) * ket((D, D), (l, (l + t * d) % D))
    closed /= math.sqrt(k * D)
    weighted = np.zeros(D * D, dtype=np.complex128)
    for l in range(D):
        weighted += ket((D, D), (l, l))
        for t in range(1, k):
            weighted += 2 * ket((D, D), (l, (l + t * d) % D))
    f = overlap_fidelity(weighted, closed)
    notes = [
        f"exact state has equal weight 1/sqrt({k * D}) on |l, l + t*{d}>, t=0..{k - 1}, with phases exp(-2 pi i {i} t/{k})",
        f"informational: the unequal-weight variant sum_l |l>(|l> + 2 sum_t |l + t*{d}>) has fidelity {f:.4f} with it",
    ]
    return _compare(name, description, closed, brute, lib, notes)


def check_hd_collapsed_hadamard(p: VerifyParams):
    D = p.hd_dim
    return _collapsed_hadamard(D, 2, 0, "hd-collapsed-hadamard",
                               f"H x H* on the even half of the D={D} key left by a carrier measurement")


def check_kbb_hd_encode(p: VerifyParams):
    D, k = p.hd_dim, p.sections
    r = 1 % k
    dims = (D, D, k)
    spec = power_of(shift_gate(k, 1))
    closed = sum(ket(dims, (j, j, (r + j) % k)) for j in range(D)) / math.sqrt(D)
    brute = embed_controlled(dims, 0, 2, spec.matrices(D, k)) @ np.kron(_diag(D, 2), np.eye(k)[r])
    lib = apply_controlled(extend(bell_state(D), "k", k, r), spec, "A", "k")
    return _compare("kbb-hd-encode", f"residue-class shift of |{r}> (mod {k}) by the D={D} key",
                    closed, brute, lib)


def check_kbb_hd_collapsed_hadamard(p: VerifyParams):
    D, k = p.hd_dim, p.sections
    worst = None
    for i in range(k):
        res = _collapsed_hadamard(D, k, i, "kbb-hd-collapsed-hadamard",
                                  f"H x H* on each residue section of the D={D} key, k={k}")
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_ghz_key(p: VerifyParams):
    closed = (ket((2,) * 3, (0, 0, 0)) + ket((2,) * 3, (1, 1, 1))) / math.sqrt(2)
    dims = (2, 2, 2)
    brute = (embed_controlled(dims, 0, 2, CNOT.matrices(2, 2)) @ embed_controlled(dims, 0, 1, CNOT.matrices(2, 2))
             @ embed(dims, 0, hadamard_gate(2).matrix) @ ket(dims, (0, 0, 0)))
    return _compare("ghz-key", "three-qubit GHZ key", closed, brute, ghz_state(2))


def _bk_odd(D, q):
    dims = (D, D, D, 2, 2)
    spec = power_of(pauli_x())
    lib = extend(extend(ghz_state(D), "1", 2, q), "2", 2, q)
    lib = apply_controlled(apply_controlled(lib, spec, "A", "1"), spec, "A", "2")
    start = np.kron(np.kron(_diag(D, 3), np.eye(2)[q]), np.eye(2)[q])
    brute = (embed_controlled(dims, 0, 4, spec.matrices(D, 2)) @ embed_controlled(dims, 0, 3, spec.matrices(D, 2))
             @ start)
    closed = sum(ket(dims, (j, j, j, (q + j) % 2, (q + j) % 2)) for j in range(D)) / math.sqrt(D)
    return lib, brute, closed


def check_bk_odd_encode(p: VerifyParams):
    worst = None
    for q in (0, 1):
        lib, brute, closed = _bk_odd(2, q)
        res = _compare("bk-odd-encode", "GHZ key, |qq> carriers, CNOT from a onto both", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def _collapse_check(D, name, description):
    worst = None
    for q in (0, 1):
        lib, brute, _ = _bk_odd(D, q)
        dims = (D, D, D, 2, 2)
        for outcome in (0, 1):
            _, lib_c = measure_z(lib, "1", None, outcome=outcome)
            proj = np.zeros((2, 2))
            proj[outcome, outcome] = 1
            b = embed(dims, 3, proj) @ brute
            b = b / np.linalg.norm(b)
            js = [j for j in range(D) if (q + j) % 2 == outcome]
            closed = sum(ket(dims, (j, j, j, outcome, outcome)) for j in js) / math.sqrt(len(js))
            res = _compare(name, description, closed, b, lib_c)
            worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_bk_odd_collapse(p: VerifyParams):
    return _collapse_check(2, "bk-odd-collapse", "z measurement of one carrier collapses the GHZ key to |000> or |111>")


def check_qudit_ghz(p: VerifyParams):
    D = p.hd_dim
    dims = (D, D, D)
    closed = sum(ket(dims, (j, j, j)) for j in range(D)) / math.sqrt(D)
    sh = RIGHT_SHIFT.matrices(D, D)
    brute = (embed_controlled(dims, 0, 2, sh) @ embed_controlled(dims, 0, 1, sh)
             @ embed(dims, 0, hadamard_gate(D).matrix) @ ket(dims, (0, 0, 0)))
    return _compare("qudit-ghz-key", f"D={D} GHZ key", closed, brute, ghz_state(D))


def check_bk_hd_odd_encode(p: VerifyParams):
    worst = None
    for q in (0, 1):
        lib, brute, closed = _bk_odd(p.hd_dim, q)
        res = _compare("bk-hd-odd-encode", "D-level GHZ key, parity flips onto both carriers", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def _codeword(q) -> np.ndarray:
    return (ket((2, 2), (0, q)) + ket((2, 2), (1, 1 - q))) / math.sqrt(2)


def _even_encode(D, q, key_vec):
    """Hadamard on every key share, then one parity flip of carrier 1 from a."""
    dims = (D, D, D, 2, 2)
    spec = power_of(pauli_x())
    h = hadamard_gate(D)
    key = _sv((D, D, D), ("A", "B", "C"), key_vec)
    lib = key
    for lab in ("A", "B", "C"):
        lib = apply_single(lib, h, lab)
    amps = np.kron(lib.amps, _codeword(q))
    lib = _sv(dims, ("A", "B", "C", "1", "2"), amps)
    lib = apply_controlled(lib, spec, "A", "1")
    brute = np.kron(np.kron(np.kron(h.matrix, h.matrix), h.matrix) @ key_vec, _codeword(q))
    brute = embed_controlled(dims, 0, 3, spec.matrices(D, 2)) @ brute
    return lib, brute


def check_bk_even_encode(p: VerifyParams):
    """Even round after the key has collapsed to |000>: a Hadamard-rotated product key."""
    worst = None
    plus = normalized([1, 1])
    for q in (0, 1):
        lib, brute = _even_encode(2, q, ket((2, 2, 2), (0, 0, 0)))
        a0 = np.kron(np.kron(np.kron(np.eye(2)[0], plus), plus), _codeword(q))
        a1 = np.kron(np.kron(np.kron(np.eye(2)[1], plus), plus), _codeword(1 - q))
        closed = (a0 + a1) / math.sqrt(2)
        res = _compare("bk-even-encode", "collapsed key |000>, Hadamards, codeword |q-bar>, one CNOT from a",
                       closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_bk_hd_even_encode(p: VerifyParams):
    D = p.hd_dim
    dims = (D, D, D, 2, 2)
    worst = None
    for q in (0, 1):
        lib, brute = _even_encode(D, q, _diag(D, 3))
        closed = np.zeros(int(np.prod(dims)), dtype=np.complex128)
        for l1 in range(D):
            for l2 in range(D):
                for l3 in range(D):
                    s = l1 + l2 + l3
                    if s in (0, D, 2 * D):
                        word = _codeword((q + l1) % 2)
                        closed += np.kron(ket((D, D, D), (l1, l2, l3)), word) / D
        res = _compare("bk-hd-even-encode",
                       f"H on every share of the D={D} GHZ key (support: sum of indices = 0, D or 2D), "
                       "then one parity flip of the codeword", closed, brute, lib)
        worst = res if worst is None or res.deviation > worst.deviation else worst
    return worst


def check_bk_hd_collapse(p: VerifyParams):
    return _collapse_check(p.hd_dim, "bk-hd-collapse",
                           "z measurement of one carrier leaves the D-level GHZ key on one parity class")


def check_bk_hd_collapsed_hadamard(p: VerifyParams):
    D = p.hd_dim
    d = D // 2
    dims = (D, D, D)
    start = normalized(sum(ket(dims, (j, j, j)) for j in range(0, D, 2)))
    hs = hadamard_gate(D, True)
    lib = _sv(dims, ("A", "B", "C"), start)
    for lab in ("A", "B", "C"):
        lib = apply_single(lib, hs, lab)
    brute = np.kron(np.kron(hs.matrix, hs.matrix), hs.matrix) @ start
    closed = np.zeros(D**3, dtype=np.complex128)
    for h1 in range(D):
        for h2 in range(D):
            for h3 in range(D):
                if (h1 + h2 + h3) % d == 0:
                    closed += ket(dims, (h1, h2, h3))
    closed = normalized(closed)
    notes = [f"support is sum of indices = m*{d}, m = 0..5, with equal weights"]
    return _compare("bk-hd-collapsed-hadamard", f"H* on every share of the even-class D={D} GHZ key",
                    closed, brute, lib, notes)


CHECKS = {
    "bell-key": check_bell_key,
    "zlg-encode-0": check_zlg_encode(0),
    "zlg-encode-1": check_zlg_encode(1),
    "zlg-decode": check_zlg_decode,
    "nonorth-encode": check_nonorth_encode,
    "qudit-bell-key": check_qudit_bell,
    "kbb-encode": check_kbb_encode,
    "hadamard-invariance": check_hadamard_invariance,
    "hd-key": check_hd_key,
    "hd-encode": check_hd_encode,
    "hd-decode": check_hd_decode,
    "hd-collapsed-hadamard": check_hd_collapsed_hadamard,
    "kbb-hd-encode": check_kbb_hd_encode,
    "kbb-hd-collapsed-hadamard": check_kbb_hd_collapsed_hadamard,
    "ghz-key": check_ghz_key,
    "bk-odd-encode": check_bk_odd_encode,
    "bk-odd-collapse": check_bk_odd_collapse,
    "bk-even-encode": check_bk_even_encode,
    "qudit-ghz-key": check_qudit_ghz,
    "bk-hd-odd-encode": check_bk_hd_odd_encode,
    "bk-hd-even-encode": check_bk_hd_even_encode,
    "bk-hd-collapse": check_bk_hd_collapse,
    "bk-hd-collapsed-hadamard": check_bk_hd_collapsed_hadamard,
}


def run_checks(only=None, params: VerifyParams | None = None) -> list[CheckResult]:
    params = params or VerifyParams()
    names = list(CHECKS) if not only else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise KeyError(f"unknown checks {unknown}; available: {', '.join(CHECKS)}")
    return [CHECKS[n](params) for n in names]
