import json
import math

import numpy as np
import pytest
from scipy.stats import binomtest, norm

from qkdlab.adversaries import PlanError
from qkdlab.analysis import (
    DEFAULT_SEED,
    SEED_ENV,
    ExperimentPlan,
    binomial_interval,
    clopper_pearson,
    default_seed,
    detection_curve,
    normal_interval,
    run_experiment,
    run_trial,
    run_trials,
    trial_streams,
)
from qkdlab.protocols import ProtocolConfig


class TestIntervals:
    def test_normal_width(self):
        est = normal_interval(50, 100, sigma=3)
        assert est.rate == 0.5
        assert est.half_width == pytest.approx(3 * 0.05)

    def test_normal_clipped(self):
        est = normal_interval(0, 20)
        assert (est.low, est.high) == (0.0, 0.0)

    def test_clopper_pearson_zero_successes(self):
        sigma = norm.isf(0.025)
        assert clopper_pearson(0, 10, sigma).high == pytest.approx(1 - 0.025 ** (1 / 10))

    def test_clopper_pearson_all_successes(self):
        sigma = norm.isf(0.025)
        assert clopper_pearson(10, 10, sigma).low == pytest.approx(0.025 ** (1 / 10))

    @pytest.mark.parametrize("k,n", [(3, 17), (40, 100), (999, 1000)])
    def test_clopper_pearson_matches_exact_test(self, k, n):
        sigma = norm.isf(0.005)
        ci = binomtest(k, n).proportion_ci(confidence_level=0.99, method="exact")
        est = clopper_pearson(k, n, sigma)
        assert est.low == pytest.approx(ci.low) and est.high == pytest.approx(ci.high)

    def test_unknown_method(self):
        with pytest.raises(ValueError):
            binomial_interval(1, 2, "wilson")

    @pytest.mark.parametrize("method", ["normal", "clopper-pearson"])
    @pytest.mark.parametrize("p", [0.5, 1 / 3, 0.2])
    def test_coverage(self, method, p):
        """A Bernoulli attack with known p lands inside its 3 sigma interval in at least 99% of meta-trials."""
        rng = np.random.default_rng(11)
        counts = rng.binomial(400, p, size=2000)
        inside = sum(binomial_interval(int(k), 400, method).contains(p) for k in counts)
        assert inside / 2000 >= 0.99


class TestSeeds:
    def test_env_override(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "42")
        assert default_seed() == 42
        monkeypatch.delenv(SEED_ENV)
        assert default_seed() == DEFAULT_SEED

    def test_env_garbage(self, monkeypatch):
        monkeypatch.setenv(SEED_ENV, "abc")
        with pytest.raises(PlanError):
            default_seed()

    def test_trial_streams_independent_of_order(self):
        a = trial_streams(5, 3)[0].integers(1 << 30, size=4)
        trial_streams(5, 0)
        b = trial_streams(5, 3)[0].integers(1 << 30, size=4)
        c = trial_streams(5, 4)[0].integers(1 << 30, size=4)
        assert np.array_equal(a, b) and not np.array_equal(a, c)


class TestPlan:
    def test_bad_trials(self):
        with pytest.raises(PlanError) as err:
            ExperimentPlan(ProtocolConfig(), trials=0)
        assert "trials" in str(err.value)

    def test_check_rounds_in_range(self):
        with pytest.raises(PlanError):
            ExperimentPlan(ProtocolConfig(rounds=5), check_rounds=(6,))

    def test_bad_pairing(self):
        with pytest.raises(PlanError):
            ExperimentPlan(ProtocolConfig("kbb"), attack="cnot-ancilla")

    def test_ci_method(self):
        with pytest.raises(PlanError):
            ExperimentPlan(ProtocolConfig(), ci_method="bayes")


class TestExperiment:
    def test_passive_clean(self):
        rep = run_experiment(ExperimentPlan(ProtocolConfig("zlg", rounds=100), trials=100))
        assert rep.qber["count"] == 0 and rep.detection["count"] == 0
        assert rep.efficiency["epsilon"] == 1.0
        assert rep.schema_version == 1

    def test_bk_passive(self):
        rep = run_experiment(ExperimentPlan(ProtocolConfig("bk", rounds=100), trials=10))
        assert rep.qber["rate"] == 0.0

    def test_report_byte_identical(self):
        plan = ExperimentPlan(ProtocolConfig("kbb", key_dim=3, rounds=10), "f-attack", trials=30,
                              check_fraction=0.2, check_rounds=(2, 3, 4), seed=9)
        assert run_experiment(plan).to_json() == run_experiment(plan).to_json()

    def test_parallel_matches_serial(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=10), "f-attack", trials=24,
                              check_rounds=(2, 3, 4), seed=3)
        assert run_experiment(plan, jobs=2).to_json() == run_experiment(plan).to_json()

    def test_single_trial_replays(self):
        plan = ExperimentPlan(ProtocolConfig("bk", rounds=8), "f-attack", trials=10, seed=4)
        assert run_trials(plan)[7] == run_trial(plan, 7)

    def test_transcripts_kept(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=4), trials=3)
        rep = run_experiment(plan, keep_transcripts=True)
        assert len(rep.transcripts) == 3
        assert json.loads(rep.transcripts[0].splitlines()[0])["round"] == 1
        assert "transcripts" not in json.loads(rep.to_json())

    def test_efficiency_counts_checks(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=10), trials=5, check_rounds=(1, 2))
        eff = run_experiment(plan).efficiency
        assert eff["b_s"] == pytest.approx(0.8)
        assert eff["b_t"] == pytest.approx(0.2)
        assert eff["epsilon"] == pytest.approx(0.8 / 1.2)

    def test_f_attack_rate(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=12), "f-attack", trials=300,
                              check_rounds=(2, 3, 4, 5, 6), seed=21)
        rep = run_experiment(plan)
        assert abs(rep.attack_success["rate"] - 0.5) <= 3 * math.sqrt(0.25 / 300)
        assert rep.attack_success["count"] + rep.detection["count"] == 300


class TestDetectionCurve:
    def test_passive_zero(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=6), trials=20)
        assert [p for _, p in detection_curve(plan, [1, 2, 4])] == [0.0, 0.0, 0.0]

    def test_cnot_geometric(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=4), "cnot-ancilla", trials=600, seed=2)
        for n, p in detection_curve(plan, [1, 2, 3, 6]):
            expect = 1 - 0.5 ** n
            assert abs(p - expect) <= 3 * math.sqrt(expect * (1 - expect) / 600) + 1e-12

    def test_f_attack_round_two(self):
        plan = ExperimentPlan(ProtocolConfig("zlg", rounds=6), "f-attack", trials=400, seed=5)
        [(count, p)] = detection_curve(plan, [1])
        assert count == 1 and abs(p - 0.5) <= 3 * math.sqrt(0.25 / 400)
