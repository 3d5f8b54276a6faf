"""Compare the compiled and numpy kernel backends.

Times each kernel on the register shapes the protocols actually use, then a
whole F-attack trial end to end.

    python3 benchmarks/bench_kernels.py [--repeat 2000] [--trials 200]
"""

import argparse
import timeit

import numpy as np

from qkdlab.adversaries import make_interceptor
from qkdlab.analysis import trial_streams
from qkdlab.protocols import ProtocolConfig, run_protocol
from qkdlab.qcore import CNOT, hadamard_gate, kernels

SHAPES = {
    "zlg relay (2,2,2,2,2)": (2, 2, 2, 2, 2),
    "kbb d=5 (5,5,5,5,5)": (5, 5, 5, 5, 5),
    "bk-hd D=4 (4,4,4,2,2)": (4, 4, 4, 2, 2),
    "large (8,8,8,8)": (8, 8, 8, 8),
}


def random_state(dims, rng):
    v = rng.normal(size=int(np.prod(dims))) + 1j * rng.normal(size=int(np.prod(dims)))
    return v / np.linalg.norm(v)


def bench_kernels(repeat):
    rng = np.random.default_rng(0)
    rows = []
    for name, dims in SHAPES.items():
        amps = random_state(dims, rng)
        d0 = dims[0]
        mat = np.ascontiguousarray(hadamard_gate(d0).matrix)
        mats = CNOT.matrices(dims[0], dims[1]) if dims[0] == dims[1] else None
        calls = {
            "apply_matrix": lambda: kernels.apply_matrix(amps, dims, 0, mat),
            "apply_controlled": lambda: kernels.apply_controlled(amps, dims, 0, 1, mats),
            "marginal_probs": lambda: kernels.marginal_probs(amps, dims, 2),
            "collapse": lambda: kernels.collapse(amps, dims, 2, 0, 1.0),
        }
        for kernel, fn in calls.items():
            times = {}
            for backend in kernels.available_backends():
                kernels.set_backend(backend)
                times[backend] = min(timeit.repeat(fn, number=repeat, repeat=3)) / repeat * 1e6
            rows.append((name, kernel, times))
    return rows


def bench_trials(trials):
    cfg = ProtocolConfig("kbb", key_dim=3, rounds=20)
    out = {}
    for backend in kernels.available_backends():
        kernels.set_backend(backend)

        def run():
            for i in range(trials):
                c, m = trial_streams(1, i)
                run_protocol(cfg, c, m, make_interceptor("f-attack", cfg), 0.25, (2,))

        run()  # warm the offset-table cache
        out[backend] = min(timeit.repeat(run, number=1, repeat=3)) / trials * 1e3
    return out


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=2000)
    ap.add_argument("--trials", type=int, default=200)
    args = ap.parse_args()
    backends = kernels.available_backends()
    print(f"{'register':24s} {'kernel':18s} " + " ".join(f"{b + ' us':>12s}" for b in backends) + "   speedup")
    for name, kernel, t in bench_kernels(args.repeat):
        speed = t["python"] / t["cython"] if "cython" in t else float("nan")
        print(f"{name:24s} {kernel:18s} " + " ".join(f"{t[b]:12.2f}" for b in backends) + f"   {speed:6.1f}x")
    trial = bench_trials(args.trials)
    print()
    print("kbb d=3 f-attack trial, 20 rounds: " + ", ".join(f"{b} {ms:.2f} ms" for b, ms in trial.items()))
    if "cython" in trial:
        print(f"end-to-end speedup {trial['python'] / trial['cython']:.2f}x")


if __name__ == "__main__":
    main()
