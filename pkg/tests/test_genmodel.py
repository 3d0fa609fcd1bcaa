import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ORACLE, random_model
from knowgen.environment import GenerativeProcess
from knowgen.genmodel import (
    DirichletCounts,
    GenerativeModel,
    LearningTrace,
    StepRecord,
    enumerate_policies,
    expected_model,
    joint_probability,
    update_dirichlet,
)
from knowgen.probmath import DomainError, sample_categorical

A_EX = [[0.9, 0.2], [0.1, 0.8]]


def two_step_model():
    return GenerativeModel(A_EX, [np.eye(2)], [0.5, 0.5], [0.5, 0.5], horizon=2, policies=[(0,)])


class TestGenerativeModel:
    def test_valid(self):
        gm = two_step_model()
        assert (gm.n_stimuli, gm.n_concepts, gm.n_actions) == (2, 2, 1)
        assert gm.C.shape == (2, 2)

    def test_rejects_bad_column(self):
        with pytest.raises(DomainError, match="A column 1"):
            GenerativeModel([[0.9, 0.5], [0.1, 0.4]], [np.eye(2)], [0.5, 0.5], [0.5, 0.5], horizon=2, policies=[(0,)])

    def test_rejects_policy_length(self):
        with pytest.raises(DomainError, match="length"):
            GenerativeModel(A_EX, [np.eye(2)], [0.5, 0.5], [0.5, 0.5], horizon=3, policies=[(0,)])

    def test_rejects_policy_action(self):
        with pytest.raises(DomainError):
            GenerativeModel(A_EX, [np.eye(2)], [0.5, 0.5], [0.5, 0.5], horizon=2, policies=[(1,)])

    def test_rejects_bad_C(self):
        with pytest.raises(DomainError):
            GenerativeModel(A_EX, [np.eye(2)], [0.6, 0.5], [0.5, 0.5], horizon=2, policies=[(0,)])

    def test_horizon_one_without_transitions(self):
        gm = GenerativeModel(A_EX, [], [0.5, 0.5], [0.5, 0.5], horizon=1)
        assert gm.B.shape == (0, 2, 2)

    def test_read_only(self):
        gm = two_step_model()
        with pytest.raises(ValueError):
            gm.A[0, 0] = 1.0


class TestCounts:
    def test_must_be_positive(self):
        with pytest.raises(DomainError):
            DirichletCounts([[1, 0], [1, 1]], [np.ones((2, 2))], [1, 1])

    def test_shapes(self):
        with pytest.raises(DomainError):
            DirichletCounts(np.ones((2, 2)), [np.ones((3, 3))], [1, 1])

    def test_uniform_means(self):
        gm = expected_model(DirichletCounts.uniform(3, 2, 2), 1.0, 2, np.full(3, 1 / 3), [(0,), (1,)])
        np.testing.assert_allclose(gm.A, np.full((3, 2), 1 / 3))
        np.testing.assert_allclose(gm.B, np.full((2, 2, 2), 0.5))
        np.testing.assert_allclose(gm.D, [0.5, 0.5])

    def test_column_mean(self):
        c = DirichletCounts([[1.0], [3.0]], np.ones((1, 1, 1)), [1.0])
        gm = expected_model(c, 1.0, 1, [0.5, 0.5], [()])
        np.testing.assert_allclose(gm.A[:, 0], [0.25, 0.75])

    def test_idempotent(self):
        c = DirichletCounts([[2.0, 1.0], [1.0, 5.0]], [[[3, 1], [1, 3]]], [1, 2])
        a = expected_model(c, 1.0, 2, [0.5, 0.5], [(0,)])
        b = expected_model(c.copy(), 1.0, 2, [0.5, 0.5], [(0,)])
        np.testing.assert_array_equal(a.A, b.A)
        np.testing.assert_array_equal(a.B, b.B)


class TestPolicies:
    def test_two_actions_depth_one(self):
        assert enumerate_policies(2, 1) == [(0,), (1,)]

    def test_one_action(self):
        assert enumerate_policies(1, 3) == [(0, 0, 0)]

    def test_lexicographic(self):
        assert enumerate_policies(2, 2) == [(0, 0), (0, 1), (1, 0), (1, 1)]

    def test_depth_zero(self):
        assert enumerate_policies(3, 0) == [()]

    def test_cap(self):
        with pytest.raises(DomainError, match="policies"):
            enumerate_policies(4, 7, cap=4096)


class TestJointProbability:
    def test_deterministic(self):
        gm = GenerativeModel(np.eye(2), [[[0, 1], [1, 0]]], [0.5, 0.5], [1.0, 0.0], horizon=3, policies=[(0, 0)])
        assert joint_probability(gm, [0, 1, 0], [0, 1, 0], 0, [1.0]) == 1.0
        assert joint_probability(gm, [0, 1, 1], [0, 1, 1], 0, [1.0]) == 0.0

    def test_example(self):
        p = joint_probability(two_step_model(), [1, 1], [1, 1], 0, [1.0])
        assert p == pytest.approx(ORACLE["joint_states11_obs11"], abs=1e-12)

    def test_example_evidence(self):
        gm = two_step_model()
        ev = sum(joint_probability(gm, s, [1, 1], 0, [1.0]) for s in itertools.product(range(2), repeat=2))
        assert ev == pytest.approx(ORACLE["evidence_obs11"], abs=1e-12)

    @settings(max_examples=25, deadline=None)
    @given(st.integers(1, 3), st.integers(1, 3), st.integers(1, 3), st.integers(1, 2), st.integers(0, 2**31 - 1))
    def test_normalization(self, n, m, T, k, seed):
        rng = np.random.default_rng(seed)
        gm = random_model(rng, n, m, T, k)
        q_pi = rng.dirichlet(np.ones(len(gm.policies)))
        total = 0.0
        for pi in range(len(gm.policies)):
            for s in itertools.product(range(n), repeat=T):
                for o in itertools.product(range(m), repeat=T):
                    total += joint_probability(gm, s, o, pi, q_pi)
        assert total == pytest.approx(1.0, abs=1e-9)


def _counts():
    return DirichletCounts(np.ones((2, 3)), np.ones((1, 3, 3)), np.ones(3))


class TestUpdateDirichlet:
    def test_empty_trace(self):
        c = _counts()
        assert update_dirichlet(c, LearningTrace()).equals(c)

    def test_single_step(self):
        out = update_dirichlet(_counts(), LearningTrace([StepRecord(0, np.array([0.0, 0.0, 1.0]))]))
        expected = np.ones((2, 3))
        expected[0, 2] = 2.0
        np.testing.assert_array_equal(out.a, expected)
        np.testing.assert_array_equal(out.d, [1, 1, 2])
        np.testing.assert_array_equal(out.b, np.ones((1, 3, 3)))

    def test_transition(self):
        q0, q1 = np.array([1.0, 0, 0]), np.array([0, 0.5, 0.5])
        out = update_dirichlet(_counts(), LearningTrace([StepRecord(0, q0, 0), StepRecord(1, q1)]), lr=2.0)
        np.testing.assert_allclose(out.b[0] - 1.0, 2.0 * np.outer(q1, q0))
        np.testing.assert_allclose(out.d - 1.0, 2.0 * q0)

    def test_input_unchanged(self):
        c = _counts()
        update_dirichlet(c, LearningTrace([StepRecord(1, np.ones(3) / 3)]))
        np.testing.assert_array_equal(c.a, np.ones((2, 3)))

    def test_bad_posterior(self):
        with pytest.raises(DomainError):
            update_dirichlet(_counts(), LearningTrace([StepRecord(0, np.ones(2) / 2)]))

    @settings(max_examples=30)
    @given(st.integers(0, 2**31 - 1))
    def test_additive(self, seed):
        rng = np.random.default_rng(seed)

        def episode(length):
            steps = [StepRecord(int(rng.integers(2)), rng.dirichlet(np.ones(3)), 0) for _ in range(length - 1)]
            steps.append(StepRecord(int(rng.integers(2)), rng.dirichlet(np.ones(3)), None))
            return LearningTrace(steps)

        t1, t2 = episode(3), episode(2)
        c = _counts()
        seq = update_dirichlet(update_dirichlet(c, t1), t2)
        cat = update_dirichlet(c, t1 + t2)
        np.testing.assert_array_equal(seq.a, cat.a)
        np.testing.assert_array_equal(seq.b, cat.b)
        np.testing.assert_array_equal(seq.d, cat.d)


def _static_learning(seed, episodes=500):
    """Episodes of 4 emissions from a single hidden state, learned with q = delta."""
    gp = GenerativeProcess([[0.7], [0.2], [0.1]], initial_state=0)
    rng = np.random.default_rng(seed)
    counts = DirichletCounts(np.ones((3, 1)), np.ones((1, 1, 1)), np.ones(1))
    seen = np.zeros(3)
    errors = []
    for ep in range(episodes):
        obs = [gp.reset(rng)] + [gp.step(None, rng) for _ in range(3)]
        steps = [StepRecord(o, np.ones(1), 0 if t < 3 else None) for t, o in enumerate(obs)]
        counts = update_dirichlet(counts, LearningTrace(steps))
        seen += np.bincount(obs, minlength=3)
        mean = counts.a[:, 0] / counts.a[:, 0].sum()
        errors.append(np.abs(mean - seen / seen.sum()).max())
    return counts, gp, errors


class TestConvergence:
    def test_static_state(self):
        counts, gp, _ = _static_learning(0)
        mean = counts.a[:, 0] / counts.a[:, 0].sum()
        assert np.abs(mean - gp.A_star[:, 0]).max() < 0.05

    def test_distance_to_frequencies_shrinks(self):
        violations = 0
        for seed in range(3):
            _, _, errors = _static_learning(seed, episodes=200)
            epochs = [max(errors[i : i + 50]) for i in range(0, 200, 50)]
            violations += sum(b > a for a, b in zip(epochs, epochs[1:]))
        assert violations <= 1

    def test_agrees_with_frequency_oracle(self):
        counts, gp, _ = _static_learning(4, episodes=100)
        rng = np.random.default_rng(4)
        seen = np.zeros(3)
        for _ in range(100):
            seen[sample_categorical(gp.initial, rng)] += 0  # reset draws the state
            seen[sample_categorical(gp.A_star[:, 0], rng)] += 1
            for _ in range(3):
                sample_categorical(gp.autonomous[:, 0], rng)
                seen[sample_categorical(gp.A_star[:, 0], rng)] += 1
        np.testing.assert_array_equal(counts.a[:, 0], 1.0 + seen)
