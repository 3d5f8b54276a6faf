import math

import numpy as np
import pytest
from scipy import stats

from qkdlab.qcore import (
    CNOT,
    LEFT_SHIFT,
    RIGHT_SHIFT,
    DimensionError,
    Gate,
    LayoutError,
    NumericalError,
    StateVector,
    SubsystemLayout,
    apply_controlled,
    apply_single,
    basis_state,
    bell_state,
    discard,
    extend,
    fidelity,
    ghz_state,
    hadamard_gate,
    identity_gate,
    measure_z,
    partial_trace_rank,
    pauli_x,
    power_of,
    product,
    reduced_density_matrix,
    reorder,
    rotation_gate,
    shift_gate,
)

from conftest import random_state

S = 1 / math.sqrt(2)


def state_of(dims, amps, labels=None):
    labels = labels or tuple(f"s{i}" for i in range(len(dims)))
    return StateVector(SubsystemLayout(tuple(dims), labels), np.asarray(amps, dtype=complex))


def brute_reduced(psi, dims, keep):
    """Partial trace by explicit index sums, independent of the library."""
    t = np.asarray(psi).reshape(dims)
    rest = [i for i in range(len(dims)) if i not in keep]
    t = np.transpose(t, list(keep) + rest)
    dk = int(np.prod([dims[i] for i in keep]))
    m = t.reshape(dk, -1)
    rho = np.zeros((dk, dk), dtype=complex)
    for col in range(m.shape[1]):
        rho += np.outer(m[:, col], m[:, col].conj())
    return rho


class TestLayout:
    def test_dimension_one_forbidden(self):
        with pytest.raises(DimensionError):
            SubsystemLayout((2, 1), ("A", "B"))

    def test_duplicate_labels(self):
        with pytest.raises(LayoutError):
            SubsystemLayout((2, 2), ("A", "A"))

    def test_amplitude_ceiling(self):
        with pytest.raises(DimensionError):
            SubsystemLayout((2,) * 5, tuple("abcde"), max_amplitudes=16)

    def test_unknown_label(self):
        with pytest.raises(LayoutError):
            bell_state(2).layout.position("Z")


class TestConstructors:
    def test_basis_two_qubits(self):
        s = basis_state(SubsystemLayout((2, 2), ("A", "B")), [0, 0])
        assert np.array_equal(s.amps, [1, 0, 0, 0])

    def test_basis_three_qubits(self):
        s = basis_state(SubsystemLayout((2, 2, 2), ("A", "B", "g")), [1, 1, 0])
        assert s.amps[0b110] == 1 and s.norm() == 1

    def test_basis_out_of_range(self):
        with pytest.raises(DimensionError):
            basis_state(SubsystemLayout((3,), ("q",)), [3])

    def test_bell_qubits(self):
        assert np.allclose(bell_state(2).amps, [S, 0, 0, S])

    def test_bell_qutrits(self):
        amps = np.zeros(9)
        amps[[0, 4, 8]] = 1 / math.sqrt(3)
        assert np.allclose(bell_state(3).amps, amps)

    @pytest.mark.parametrize("d", [2, 3, 5, 8])
    def test_bell_normalized(self, d):
        assert bell_state(d).norm() == pytest.approx(1.0, abs=1e-12)

    def test_ghz_qubits(self):
        amps = np.zeros(8)
        amps[[0, 7]] = S
        assert np.allclose(ghz_state(2).amps, amps)

    def test_ghz_four_levels(self):
        amps = np.zeros(64)
        amps[[0, 21, 42, 63]] = 0.5
        assert np.allclose(ghz_state(4).amps, amps)

    @pytest.mark.parametrize("d", [2, 3, 4])
    @pytest.mark.parametrize("keep", [0, 1, 2])
    def test_ghz_single_share_maximally_mixed(self, d, keep):
        g = ghz_state(d)
        rho = brute_reduced(g.amps, g.dims, [keep])
        assert np.allclose(rho, np.eye(d) / d, atol=1e-12)
        assert np.allclose(reduced_density_matrix(g, ["ABC"[keep]]), rho, atol=1e-12)

    def test_extend_and_discard_round_trip(self):
        s = extend(bell_state(2), "g", 2, 1)
        assert s.labels == ("A", "B", "g")
        assert fidelity(discard(s, "g"), bell_state(2)) == pytest.approx(1.0)

    def test_discard_entangled_refused(self):
        with pytest.raises(NumericalError):
            discard(bell_state(2), "B")

    def test_reorder(self, rng):
        s = state_of((2, 3), random_state(rng, (2, 3)), ("a", "b"))
        r = reorder(s, ("b", "a"))
        assert np.allclose(r.tensor(), s.tensor().T)

    def test_product(self):
        p = product(bell_state(2), basis_state(SubsystemLayout((3,), ("x",)), [2]))
        assert p.dims == (2, 2, 3) and p.norm() == pytest.approx(1.0)


class TestGates:
    def test_rotation_zero_is_identity(self):
        assert np.allclose(rotation_gate(0).matrix, np.eye(2))

    def test_rotation_quarter_turn(self):
        assert np.allclose(rotation_gate(math.pi / 4).matrix, [[S, S], [-S, S]])

    def test_rotation_inverse(self, rng):
        for theta in rng.uniform(-np.pi, np.pi, 20):
            prod_ = rotation_gate(theta).matrix @ rotation_gate(-theta).matrix
            assert np.allclose(prod_, np.eye(2), atol=1e-12)

    def test_hadamard_qubit(self):
        assert np.allclose(hadamard_gate(2).matrix, np.array([[1, 1], [1, -1]]) * S)

    def test_hadamard_qutrit(self):
        w = np.exp(2j * np.pi / 3)
        h = hadamard_gate(3).matrix
        for k in range(3):
            for m in range(3):
                assert h[k, m] == pytest.approx(w ** (k * m) / math.sqrt(3))

    @pytest.mark.parametrize("gate", [
        rotation_gate(0.3), hadamard_gate(5), hadamard_gate(6, True), shift_gate(7, 3), pauli_x(),
    ])
    def test_unitary(self, gate):
        m = gate.matrix
        assert np.max(np.abs(m.conj().T @ m - np.eye(gate.dim))) < 1e-10

    def test_non_unitary_rejected(self):
        with pytest.raises(ValueError):
            Gate(2, np.array([[1, 1], [0, 1]]))

    def test_matrices_read_only(self):
        with pytest.raises(ValueError):
            RIGHT_SHIFT.matrices(3, 3)[0, 0, 0] = 2


class TestApply:
    def test_bilateral_quarter_turn_fixes_bell(self, backend):
        r = rotation_gate(math.pi / 4)
        s = apply_single(apply_single(bell_state(2), r, "A"), r, "B")
        assert fidelity(s, bell_state(2)) == pytest.approx(1.0, abs=1e-12)

    def test_identity(self, rng):
        s = state_of((2, 3), random_state(rng, (2, 3)))
        assert np.allclose(apply_single(s, identity_gate(3), "s1").amps, s.amps)

    def test_hadamard_then_dagger(self, rng, backend):
        s = state_of((4, 2), random_state(rng, (4, 2)))
        h = hadamard_gate(4)
        back = apply_single(apply_single(s, h, "s0"), h.dagger, "s0")
        assert np.max(np.abs(back.amps - s.amps)) < 1e-10

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            apply_single(bell_state(2), hadamard_gate(3), "A")

    def test_right_shift_qutrit(self, backend):
        lay = SubsystemLayout((3, 3), ("c", "t"))
        out = apply_controlled(basis_state(lay, [2, 1]), RIGHT_SHIFT, "c", "t")
        assert fidelity(out, basis_state(lay, [2, 0])) == pytest.approx(1.0)

    def test_left_undoes_right(self, rng, backend):
        s = state_of((5, 5), random_state(rng, (5, 5)), ("c", "t"))
        back = apply_controlled(apply_controlled(s, RIGHT_SHIFT, "c", "t"), LEFT_SHIFT, "c", "t")
        assert np.allclose(back.amps, s.amps, atol=1e-12)

    def test_power_of_x_by_control_parity(self, backend):
        lay = SubsystemLayout((4, 2), ("c", "t"))
        flip = power_of(pauli_x())
        assert fidelity(apply_controlled(basis_state(lay, [3, 0]), flip, "c", "t"),
                        basis_state(lay, [3, 1])) == pytest.approx(1.0)
        assert fidelity(apply_controlled(basis_state(lay, [2, 0]), flip, "c", "t"),
                        basis_state(lay, [2, 0])) == pytest.approx(1.0)

    def test_shift_needs_equal_dims(self):
        s = extend(bell_state(2), "t", 3)
        with pytest.raises(DimensionError):
            apply_controlled(s, RIGHT_SHIFT, "A", "t")

    def test_same_control_and_target(self):
        with pytest.raises(LayoutError):
            apply_controlled(bell_state(2), CNOT, "A", "A")

    @pytest.mark.parametrize("d", [2, 3, 5])
    def test_shift_group_law(self, d):
        """k applications of the controlled shift move the target by k*i mod d."""
        lay = SubsystemLayout((d, d), ("c", "t"))
        for i in range(d):
            for k in range(1, 2 * d):
                s = basis_state(lay, [i, 0])
                for _ in range(k):
                    s = apply_controlled(s, RIGHT_SHIFT, "c", "t")
                assert fidelity(s, basis_state(lay, [i, (k * i) % d])) == pytest.approx(1.0)

    def test_norm_preserved_over_random_sequence(self, rng, backend):
        dims = (3, 3, 2, 4)
        s = state_of(dims, random_state(rng, dims), ("a", "b", "c", "e"))
        gates = {"a": hadamard_gate(3), "b": hadamard_gate(3, True), "c": rotation_gate(0.7),
                 "e": shift_gate(4, 1)}
        for step in range(200):
            label = "abce"[step % 4]
            s = apply_single(s, gates[label], label)
            s = apply_controlled(s, RIGHT_SHIFT, "a", "b")
            s = apply_controlled(s, power_of(pauli_x()), "e", "c")
        assert abs(s.norm() - 1) < 1e-10


class TestMeasure:
    def test_bell_collapse(self, rng):
        seen = set()
        for _ in range(40):
            rec, post = measure_z(bell_state(2), "A", rng)
            assert rec.probability == pytest.approx(0.5)
            k = rec.outcome
            seen.add(k)
            lay = bell_state(2).layout
            assert fidelity(post, basis_state(lay, [k, k])) == pytest.approx(1.0)
        assert seen == {0, 1}

    def test_basis_state_certain(self, rng):
        lay = SubsystemLayout((3, 2), ("x", "y"))
        s = basis_state(lay, [2, 1])
        rec, post = measure_z(s, "x", rng)
        assert (rec.outcome, rec.probability) == (2, 1.0)
        assert np.array_equal(post.amps, s.amps)

    def test_forced_zero_probability(self, rng):
        with pytest.raises(NumericalError):
            measure_z(basis_state(SubsystemLayout((2,), ("x",)), [0]), "x", rng, outcome=1)

    def test_bell5_frequencies(self):
        """10^5 draws: chi-square against the Born weights, and every cell within 3 sigma."""
        rng = np.random.default_rng(5)
        s = bell_state(5)
        n = 100_000
        counts = np.bincount([measure_z(s, "A", rng)[0].outcome for _ in range(n)], minlength=5)
        assert stats.chisquare(counts, np.full(5, n / 5)).pvalue > 1e-3
        sigma = math.sqrt(n * 0.2 * 0.8)
        assert np.all(np.abs(counts - n / 5) < 3 * sigma)

    def test_seeded_reproducible(self):
        a = [measure_z(bell_state(3), "B", np.random.default_rng(9))[0].outcome for _ in range(5)]
        b = [measure_z(bell_state(3), "B", np.random.default_rng(9))[0].outcome for _ in range(5)]
        assert a == b


class TestFidelityAndRank:
    def test_self(self, rng):
        s = state_of((2, 3), random_state(rng, (2, 3)))
        assert fidelity(s, s) == pytest.approx(1.0)

    def test_orthogonal(self):
        lay = SubsystemLayout((2, 2), ("A", "B"))
        assert fidelity(basis_state(lay, [0, 0]), basis_state(lay, [1, 1])) == 0.0

    def test_layout_mismatch(self):
        with pytest.raises(LayoutError):
            fidelity(bell_state(2), bell_state(2, ("A", "C")))

    def test_bilateral_rotation_invariance(self, rng):
        for theta in rng.uniform(0, 2 * np.pi, 100):
            r = rotation_gate(theta)
            s = apply_single(apply_single(bell_state(2), r, "A"), r, "B")
            assert fidelity(bell_state(2), s) == pytest.approx(1.0, abs=1e-10)

    @pytest.mark.parametrize("d", range(2, 9))
    def test_hadamard_pair_invariance(self, d):
        s = apply_single(bell_state(d), hadamard_gate(d), "A")
        s = apply_single(s, hadamard_gate(d, True), "B")
        assert fidelity(bell_state(d), s) == pytest.approx(1.0, abs=1e-10)

    def test_singlet_fixed_and_triplets_swapped(self):
        r = rotation_gate(math.pi / 4)
        both = lambda amps: apply_single(apply_single(state_of((2, 2), amps, ("A", "B")), r, "A"), r, "B")
        singlet = [0, S, -S, 0]
        phi_minus = [S, 0, 0, -S]
        psi_plus = [0, S, S, 0]
        assert fidelity(both(singlet), state_of((2, 2), singlet, ("A", "B"))) == pytest.approx(1.0)
        assert fidelity(both(phi_minus), state_of((2, 2), psi_plus, ("A", "B"))) == pytest.approx(1.0)
        assert fidelity(both(psi_plus), state_of((2, 2), phi_minus, ("A", "B"))) == pytest.approx(1.0)

    def test_nonorthogonal_carrier_identity(self, rng):
        """CNOT from A on Bell x psi0 gives |00>psi0 + |11>(2ab psi0 + (b^2 - a^2) psi1), over sqrt 2."""
        for phi in rng.uniform(0.05, np.pi / 2 - 0.05, 10):
            a, b = math.cos(phi), math.sin(phi)
            psi0, psi1 = np.array([a, b]), np.array([b, -a])
            s = extend(bell_state(2), "g", 2, psi0)
            got = apply_controlled(s, CNOT, "A", "g")
            expect = np.zeros((2, 2, 2), dtype=complex)
            expect[0, 0] = psi0 * S
            expect[1, 1] = (2 * a * b * psi0 + (b * b - a * a) * psi1) * S
            assert np.max(np.abs(got.tensor() - expect)) < 1e-10

    def test_rank_product(self):
        lay = SubsystemLayout((2, 3), ("A", "B"))
        assert partial_trace_rank(basis_state(lay, [1, 2]), ["A"]) == 1

    def test_rank_bell(self):
        assert partial_trace_rank(bell_state(2), ["A"]) == 2

    def test_rank_after_carrier_measurement(self):
        """Four-level key with a parity-flipped carrier, carrier read as 0: Alice's side keeps rank 2."""
        amps = np.zeros((4, 4, 2))
        for j in range(4):
            amps[j, j, j % 2] = 0.5
        s = state_of((4, 4, 2), amps.reshape(-1), ("A", "B", "g"))
        _, post = measure_z(s, "g", np.random.default_rng(0), outcome=0)
        rho = brute_reduced(post.amps, post.dims, [0])
        oracle = int(np.sum(np.linalg.eigvalsh(rho) > 1e-9))
        assert oracle == 2
        assert partial_trace_rank(post, ["A"]) == oracle

    def test_rank_needs_proper_subset(self):
        with pytest.raises(LayoutError):
            partial_trace_rank(bell_state(2), ["A", "B"])
