import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qkdlab.qcore import _kernels_py, kernels

from conftest import random_state, random_unitary

HAVE_CYTHON = "cython" in kernels.available_backends()
needs_cython = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled kernels not built")

layouts = st.lists(st.integers(2, 5), min_size=1, max_size=4).filter(lambda d: np.prod(d) <= 400)


def brute_single(amps, dims, pos, mat):
    ops = [np.eye(d) for d in dims]
    ops[pos] = mat
    full = ops[0]
    for op in ops[1:]:
        full = np.kron(full, op)
    return full @ amps


class TestBackendSelection:
    def test_python_always_available(self):
        assert "python" in kernels.available_backends()

    def test_set_backend_returns_previous(self):
        before = kernels.BACKEND
        prev = kernels.set_backend("python")
        assert prev == before
        assert kernels.set_backend(before) == "python"

    def test_unknown_backend(self):
        with pytest.raises(ValueError):
            kernels.set_backend("fortran")


class TestReferenceKernels:
    """The numpy kernels against explicit Kronecker products."""

    @settings(max_examples=60, deadline=None)
    @given(layouts, st.data())
    def test_apply_matrix_matches_kron(self, dims, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        pos = data.draw(st.integers(0, len(dims) - 1))
        amps = random_state(rng, dims)
        mat = random_unitary(rng, dims[pos])
        got = _kernels_py.apply_matrix(amps, tuple(dims), pos, mat)
        assert np.allclose(got, brute_single(amps, dims, pos, mat), atol=1e-12)

    def test_marginals_sum_to_one(self, rng):
        amps = random_state(rng, (3, 4, 2))
        for pos in range(3):
            assert _kernels_py.marginal_probs(amps, (3, 4, 2), pos).sum() == pytest.approx(1.0)

    def test_collapse_zeroes_other_outcomes(self, rng):
        amps = random_state(rng, (2, 3))
        out = _kernels_py.collapse(amps, (2, 3), 1, 2, 1.0).reshape(2, 3)
        assert np.all(out[:, :2] == 0)
        assert np.allclose(out[:, 2], amps.reshape(2, 3)[:, 2])

    def test_inputs_not_modified(self, rng):
        amps = random_state(rng, (2, 2))
        keep = amps.copy()
        _kernels_py.apply_matrix(amps, (2, 2), 0, random_unitary(rng, 2))
        _kernels_py.collapse(amps, (2, 2), 0, 1, 2.0)
        assert np.array_equal(amps, keep)


@needs_cython
class TestCompiledAgreement:
    """Compiled and numpy kernels agree on random registers."""

    @pytest.fixture(autouse=True)
    def _load(self):
        from qkdlab.qcore import _ckernels
        self.c = _ckernels

    @settings(max_examples=80, deadline=None)
    @given(layouts, st.data())
    def test_apply_matrix(self, dims, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        dims = tuple(dims)
        pos = data.draw(st.integers(0, len(dims) - 1))
        amps = random_state(rng, dims)
        mat = random_unitary(rng, dims[pos])
        assert np.allclose(self.c.apply_matrix(amps, dims, pos, mat),
                           _kernels_py.apply_matrix(amps, dims, pos, mat), atol=1e-12)

    @settings(max_examples=80, deadline=None)
    @given(st.lists(st.integers(2, 4), min_size=2, max_size=4), st.data())
    def test_apply_controlled(self, dims, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        dims = tuple(dims)
        control, target = data.draw(st.permutations(range(len(dims))))[:2]
        amps = random_state(rng, dims)
        mats = np.stack([random_unitary(rng, dims[target]) for _ in range(dims[control])])
        assert np.allclose(self.c.apply_controlled(amps, dims, control, target, mats),
                           _kernels_py.apply_controlled(amps, dims, control, target, mats), atol=1e-12)

    @settings(max_examples=50, deadline=None)
    @given(layouts, st.data())
    def test_marginals_and_collapse(self, dims, data):
        rng = np.random.default_rng(data.draw(st.integers(0, 2**32 - 1)))
        dims = tuple(dims)
        pos = data.draw(st.integers(0, len(dims) - 1))
        k = data.draw(st.integers(0, dims[pos] - 1))
        amps = random_state(rng, dims)
        assert np.allclose(self.c.marginal_probs(amps, dims, pos),
                           _kernels_py.marginal_probs(amps, dims, pos), atol=1e-14)
        assert np.allclose(self.c.collapse(amps, dims, pos, k, 1.7),
                           _kernels_py.collapse(amps, dims, pos, k, 1.7), atol=1e-14)


class TestEndToEndBackends:
    def test_protocol_transcripts_identical(self, backend):
        """A full attacked run is bit-identical whichever backend is active."""
        from qkdlab.analysis import ExperimentPlan, run_trial
        from qkdlab.protocols import ProtocolConfig

        plan = ExperimentPlan(ProtocolConfig("kbb", key_dim=3, rounds=8), "f-attack", trials=1,
                              check_rounds=(2, 3, 4))
        got = run_trial(plan, 0, keep_transcript=True)
        kernels.set_backend("python")
        ref = run_trial(plan, 0, keep_transcript=True)
        kernels.set_backend(backend)
        assert got.errors == ref.errors and got.succeeded == ref.succeeded
        strip = lambda text: [{k: v for k, v in json.loads(line).items() if k != "key_fidelity"}
                              for line in text.splitlines()]
        assert strip(got.transcript) == strip(ref.transcript)
