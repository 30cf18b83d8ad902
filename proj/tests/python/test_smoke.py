import json

import pytest

import btattack


def two_to_one():
    return btattack.Dataset(["a", "b"], 3, [(0, 0, 1), (1, 0, 1), (2, 1, 0)])


def test_fit_three_to_one():
    d = btattack.Dataset(["a", "b"], 4, [(0, 0, 1), (1, 0, 1), (2, 0, 1), (3, 1, 0)])
    r = btattack.fit(d)
    assert r.converged
    assert r.strengths == pytest.approx([0.75, 0.25], abs=1e-6)
    assert r.ranking == [0, 1]


def test_non_identifiable_raises():
    d = btattack.Dataset(["a", "b"], 1, [(0, 0, 1)])
    with pytest.raises(btattack.NonIdentifiableError):
        btattack.fit(d)


def test_invalid_dataset_raises():
    with pytest.raises(btattack.DomainError):
        btattack.Dataset(["a", "b"], 1, [(0, 1, 1)])
    with pytest.raises(ValueError):
        btattack.Dataset(["a"], 0)


def test_kendall_tau():
    assert btattack.kendall_tau([0, 1, 2, 3], [3, 2, 1, 0]) == 6
    assert btattack.kendall_tau([0, 1, 2], [0, 1, 2]) == 0


def test_greedy_reverses_close_race():
    r = btattack.attack(two_to_one(), "GF", [1, 0], budget=1)
    assert len(r.flips) == 1
    assert r.initial_distance == 1
    assert r.final_distance == 0
    assert r.manipulated.counts() == [[0, 1], [2, 0]]


def test_attack_is_deterministic():
    d, _ = btattack.generate(m=4, voters=10, per_voter=4, law="geometric", rho=0.8, seed=3)
    a = btattack.attack(d, "ASSA", [3, 2, 1, 0], budget=8, seed=5, subsets=3, iterations=4)
    b = btattack.attack(d, "ASSA", [3, 2, 1, 0], budget=8, seed=5, subsets=3, iterations=4)
    assert a.flips == b.flips
    assert len(a.flips) <= 8
    assert a.final_distance <= a.initial_distance


def test_text_round_trip():
    d, truth = btattack.generate(m=3, voters=5, per_voter=2, seed=1)
    assert len(truth) == 3
    assert btattack.Dataset.from_text(d.to_text()) == d


def test_ballots():
    d = btattack.ballots_to_dataset("candidates: x,y,z\n2: y,x\n")
    assert d.comparisons == [(0, 1, 0), (0, 1, 0)]
    d = btattack.ballots_to_dataset("candidates: x,y,z\ny\n", policy="ranked-over-unranked")
    assert len(d) == 2
    with pytest.raises(btattack.ParseError):
        btattack.ballots_to_dataset("candidates: x,y\nq\n")


def test_influence_two_candidates():
    delta, ranking = btattack.influence(two_to_one(), [(0, 1)])
    assert delta[1] > 0 > delta[0]
    assert sum(delta) == pytest.approx(0.0, abs=1e-12)
    assert len(ranking) == 2


def test_budget_sweep_table():
    d, _ = btattack.generate(m=4, voters=10, per_voter=4, law="geometric", rho=0.8, seed=2)
    table = btattack.budget_sweep(d, ["RF", "ASSA"], [0.2], trials=2, subsets=2, iterations=2)
    assert len(table["cells"]) == 2
    for cell in table["cells"]:
        assert 0.0 <= cell["success_rate"] <= 1.0
    json.dumps(table)
