import pytest

import plurality_sim as ps


def test_distribution_and_config():
    assert ps.make_distribution("uniform", 100, 3) == [34, 33, 33]
    cfg = ps.make_config(ps.Variant.ORDERED, 1000, 4)
    assert cfg.n == 1000
    assert sum(cfg.x) == 1000
    assert cfg.plurality_opinion() == 1
    assert len(ps.config_fingerprint(cfg)) == 16


def test_invalid_config_raises():
    with pytest.raises(ps.ConfigError):
        ps.make_config(ps.Variant.ORDERED, 100, 3, "uniform")
    with pytest.raises(ValueError):
        ps.make_distribution("triangular", 100, 2)


@pytest.mark.parametrize("variant", [ps.Variant.ORDERED, ps.Variant.UNORDERED, ps.Variant.IMPROVED])
def test_trial_reaches_plurality(variant):
    cfg = ps.make_config(variant, 1000, 4, "explicit", [400, 300, 200, 100])
    r = ps.run_trial(cfg, 7)
    assert r["correct"] and r["winner"] == 1
    assert not r["violations"]
    assert "all-agents-converged" in r["milestones"]
    assert r == ps.run_trial(cfg, 7)


def test_simulation_stepping_matches_run_trial():
    cfg = ps.make_config(ps.Variant.ORDERED, 500, 2, "explicit", [300, 200])
    sim = ps.Simulation(cfg, 3)
    while not sim.finished:
        sim.run_until(sim.interactions + 10_000)
    assert sim.result() == ps.run_trial(cfg, 3)


def test_experiment_rows():
    rows = ps.run_experiment("variant = ordered\nn = 400\nk = 2\ndist = one-dominant\nalpha = 0.6\ntrials = 3\n", 1)
    assert [r["seed"] for r in rows] == ["1", "2", "3"]
    assert all(r["correct"] == "true" for r in rows)


def test_subprotocol_helpers():
    assert sorted(ps.load_balance_step(3, -2)) == [0, 1]
    assert ps.run_majority(3, 2, 100, 1)[0] == "A"
    assert 1 <= ps.run_junta(1000, 1, 200_000, 1) <= 1000
