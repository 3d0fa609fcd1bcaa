import json
from pathlib import Path

import numpy as np
import pytest

from conftest import ORACLE
from knowgen.environment import GenerativeProcess, env_step
from knowgen.fixtures import FIXTURES, fixture
from knowgen.genmodel import GenerativeModel
from knowgen.inference import exact_posterior, expected_free_energy, infer_states
from knowgen.knowledge import CONDITIONAL, DECLARATIVE, PROCEDURAL, classify_regime
from knowgen.probmath import DomainError
from knowgen.scenario_io import scenario_to_obj

FIXTURE_DIR = Path(__file__).resolve().parents[1] / "fixtures"


def flip_process():
    flip = np.array([[0.0, 1.0], [1.0, 0.0]])
    return GenerativeProcess(np.eye(2), [flip, np.eye(2)], initial_state=0)


class TestGenerativeProcess:
    def test_deterministic_sequence(self):
        gp = flip_process()
        rng = np.random.default_rng(0)
        seq = [gp.reset(rng)] + [env_step(gp, 0, rng) for _ in range(4)]
        assert seq == [0, 1, 0, 1, 0]

    def test_autonomous_is_identity_by_default(self):
        gp = flip_process()
        rng = np.random.default_rng(0)
        gp.reset(rng)
        assert [env_step(gp, None, rng) for _ in range(3)] == [0, 0, 0]

    def test_custom_autonomous(self):
        flip = np.array([[0.0, 1.0], [1.0, 0.0]])
        gp = GenerativeProcess(np.eye(2), initial_state=0, autonomous=flip)
        rng = np.random.default_rng(0)
        gp.reset(rng)
        assert [gp.step(None, rng) for _ in range(3)] == [1, 0, 1]

    def test_seeded(self):
        gp = GenerativeProcess([[0.5, 0.2], [0.5, 0.8]], [[[0.5, 0.5], [0.5, 0.5]]], initial_state=[0.5, 0.5])

        def run(seed):
            rng = np.random.default_rng(seed)
            g = gp.copy()
            return [g.reset(rng)] + [g.step(0, rng) for _ in range(50)]

        assert run(3) == run(3)

    def test_invalid_action(self):
        gp = flip_process()
        with pytest.raises(DomainError):
            gp.step(2, np.random.default_rng(0))

    def test_invalid_construction(self):
        with pytest.raises(DomainError):
            GenerativeProcess([[0.5], [0.6]])
        with pytest.raises(DomainError):
            GenerativeProcess(np.eye(2), initial_state=2)

    def test_static_frequencies(self):
        column = np.array([0.6, 0.3, 0.1])
        gp = GenerativeProcess(column[:, None], initial_state=0)
        rng = np.random.default_rng(99)
        draws = [gp.reset(rng)] + [gp.step(None, rng) for _ in range(100_000 - 1)]
        freq = np.bincount(draws, minlength=3) / len(draws)
        assert np.abs(freq - column).max() < 0.01

    def test_alphabet(self):
        gp = GenerativeProcess(np.full((3, 2), 1 / 3), [np.full((2, 2), 0.5)], initial_state=[0.5, 0.5])
        rng = np.random.default_rng(5)
        draws = [gp.reset(rng)] + [gp.step(0, rng) for _ in range(500)]
        assert set(draws) <= {0, 1, 2}

    def test_state_is_hidden(self):
        gp = flip_process()
        public = {name for name in dir(gp) if not name.startswith("_")}
        assert public.isdisjoint({"state", "current_state", "theta", "true_state"})
        gp.reset(np.random.default_rng(0))
        # nothing public changes when the hidden state moves
        before = {k: v for k, v in vars(gp).items() if not k.startswith("_")}
        gp.step(0, np.random.default_rng(1))
        after = {k: v for k, v in vars(gp).items() if not k.startswith("_")}
        assert before.keys() == after.keys()
        assert all(np.array_equal(before[k], after[k]) for k in before)

    def test_copy_is_independent(self):
        gp = flip_process()
        rng = np.random.default_rng(0)
        gp.reset(rng)
        clone = gp.copy()
        gp.step(0, rng)
        assert clone.step(1, rng) == 0


class TestFixtures:
    def test_unknown_lists_available(self):
        with pytest.raises(DomainError) as exc:
            fixture("bike")
        for name in FIXTURES:
            assert name in str(exc.value)

    def test_discrimination(self):
        sc = fixture("discrimination-2x2")
        assert sc.process.n_actions == 0
        assert sc.agent.model.n_concepts == 2 and sc.agent.model.n_stimuli == 2
        assert classify_regime(sc.regime) == DECLARATIVE

    def test_tmaze(self):
        sc = fixture("tmaze")
        gm = sc.agent.model
        assert sc.process.n_states == 4 and gm.n_actions == 2
        assert not np.allclose(gm.C, gm.C[0, 0])
        assert classify_regime(sc.regime) == PROCEDURAL

    def test_cue_conditional_regime(self):
        assert classify_regime(fixture("cue-conditional").regime) == CONDITIONAL

    def test_cue_conditional_best_action_depends_on_cue(self):
        sc = fixture("cue-conditional")
        p, agent = sc.process, sc.agent.model
        world = GenerativeModel(p.A_star, p.B_star, agent.C, p.initial, agent.gamma, agent.horizon, agent.policies)
        best, planned = {}, {}
        for cue in (0, 1):
            exact = np.stack([exact_posterior(world, pol, [cue]).marginals for pol in world.policies])
            G = expected_free_energy(world, exact, start=1).totals
            assert G.min() == pytest.approx(ORACLE["cue_G_best"], abs=1e-9)
            assert G.max() == pytest.approx(ORACLE["cue_G_worst"], abs=1e-9)
            best[cue] = {world.policies[k][0] for k in np.flatnonzero(np.isclose(G, G.min()))}
            # the variational planner reaches the same choice
            approx = expected_free_energy(world, infer_states(world, [cue]).per_policy_posteriors, start=1)
            planned[cue] = world.policies[int(np.argmin(approx.totals))][0]
        assert best == {0: {0}, 1: {1}}
        assert planned == {0: 0, 1: 1}

    def test_novel_stimulus_has_unmodelled_state(self):
        sc = fixture("novel-stimulus")
        assert sc.process.n_states == 3 and sc.agent.model.n_concepts == 2
        assert sc.process.n_stimuli == sc.agent.model.n_stimuli

    @pytest.mark.parametrize("name", FIXTURES)
    def test_files_match_builders(self, name):
        on_disk = json.loads((FIXTURE_DIR / f"{name}.json").read_text())
        assert on_disk == json.loads(json.dumps(scenario_to_obj(fixture(name))))
