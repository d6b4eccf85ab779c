"""Alice policies: legality, determinism, and exact-score minimization."""
import random

import pytest
from scipy.stats import chisquare

from pedigree.cycles import Pedigree, PedigreeError, sample_uniform
from pedigree.demo import DEMO_A
from pedigree.game import GameSim, apply_round, initial_state, run_game
from pedigree.harness import derive_rngs
from pedigree.strategies import (
    GreedyCommonAlice,
    IsolationistAlice,
    ScriptedAlice,
    UniformRandomAlice,
    make_strategy,
    strategy_names,
)


ALL_SPECS = ("random", "greedy-common", "isolationist", "isolationist:prefer-c",
             f"scripted:{sample_uniform(80, random.Random(1)).to_text()}")


def test_registry_and_parser():
    assert set(strategy_names()) == {"scripted", "random", "greedy-common", "isolationist"}
    assert make_strategy("random").name == "random"
    s = make_strategy("scripted:n:10;idx:1,2,4,2,6,8,8")
    assert isinstance(s, ScriptedAlice)
    assert make_strategy("isolationist:prefer-c").prefer_c
    with pytest.raises(PedigreeError):
        make_strategy("nope")
    with pytest.raises(PedigreeError):
        make_strategy("isolationist:bogus")


def test_scripted_reproduces_fixed_cycle():
    strat = ScriptedAlice(DEMO_A)
    for bob_seed in (1, 2, 3):
        traj = run_game(strat, 10, seed=bob_seed, keep_graph=True)
        # Alice's cycle is the scripted one regardless of Bob
        sim = GameSim(10, log_a_edges=False)
        strat2 = ScriptedAlice(DEMO_A)
        arng, brng = derive_rngs(bob_seed, 0)
        strat2.reset(sim)
        while sim.n < 10:
            sim.step(strat2.choose(sim, arng), sim.random_edge_b(brng))
        assert sim.order_a() == (1, 4, 7, 5, 2, 6, 8, 3, 10, 9)


def test_scripted_exhaustion():
    strat = ScriptedAlice(Pedigree(5, (1, 2)))
    with pytest.raises(PedigreeError):
        run_game(strat, 8, seed=0)


def test_every_strategy_plays_legal_moves():
    # step() rejects non-edges, so a full game is a per-round legality check
    for spec in ALL_SPECS:
        strat = make_strategy(spec)
        traj = run_game(strat, 60, seed=11)
        assert traj.n_max == 60
        again = run_game(make_strategy(spec), 60, seed=11)
        assert traj == again


def test_uniform_random_first_move_uniform():
    counts = {(1, 2): 0, (2, 3): 0, (1, 3): 0}
    strat = UniformRandomAlice()
    sim = GameSim(4)
    for seed in range(6000):
        arng, _ = derive_rngs(9, seed)
        sim.reset()
        counts[strat.choose(sim, arng)] += 1
    assert chisquare(list(counts.values())).pvalue > 1e-3


def test_greedy_initial_and_invariants():
    strat = GreedyCommonAlice()
    sim = GameSim(200, log_a_edges=True)
    strat.reset(sim)
    arng, brng = derive_rngs(3, 0)
    assert strat.choose(sim, arng) == (1, 2)
    forced_d = 0
    while sim.n < 200:
        move = strat.choose(sim, arng)
        common_now = sorted(e for e in sim.edges_a() if sim.edge_in_b(*e))
        if sim.s > 0:
            assert move == common_now[0]
        else:
            assert not common_now
            assert move == min(sim.edges_a())
            forced_d += 1
        sim.step(move, sim.random_edge_b(brng))
    assert forced_d > 0  # greedy play burns the common edges down


def test_isolationist_post_round4_canonical():
    st = apply_round(initial_state(), (1, 2), (1, 3))
    strat = IsolationistAlice()
    move = strat.next_move(st, random.Random(0))
    assert move == (1, 3)  # every edge scores zero; canonical first wins


def test_isolationist_minimizes_exact_drop_probability():
    # dual route: the chosen edge must minimize P(dT = -1) computed by the
    # exact Bob-enumeration table, with canonical tie-break
    rng = random.Random(42)
    checked = 0
    sim = GameSim(40, log_a_edges=True)
    strat = IsolationistAlice()
    for attempt in range(4000):
        if checked >= 25:
            break
        sim.reset()
        strat.reset(sim)
        arng, brng = derive_rngs(1000 + attempt, 0)
        stop = rng.randint(10, 40)
        while sim.n < stop:
            sim.step(sim.random_edge_a(arng), sim.random_edge_b(brng))
        if sim.t < 2:
            continue
        checked += 1
        move = strat.choose(sim, arng)
        n = sim.n
        scores = {}
        for e in sorted(sim.edges_a()):
            table = sim.transition_table(e)
            scores[e] = table.prob(0, -1) + table.prob(1, -1)
        best = min(scores.values())
        assert scores[move] == best
        assert move == min(e for e, s in scores.items() if s == best)
    assert checked >= 10  # enough two-component states were reachable


def test_isolationist_prefer_c_variant():
    rng = random.Random(7)
    sim = GameSim(30, log_a_edges=True)
    strat = IsolationistAlice("prefer-c")
    found = 0
    for attempt in range(2000):
        if found >= 10:
            break
        sim.reset()
        strat.reset(sim)
        arng, brng = derive_rngs(500 + attempt, 1)
        stop = rng.randint(8, 30)
        while sim.n < stop:
            sim.step(sim.random_edge_a(arng), sim.random_edge_b(brng))
        if sim.s == 0:
            continue
        found += 1
        move = strat.choose(sim, arng)
        scores = {}
        for e in sorted(sim.edges_a()):
            t = sim.transition_table(e)
            scores[e] = t.prob(0, -1) + t.prob(1, -1)
        best = min(scores.values())
        assert scores[move] == best
        common_best = [e for e, s in scores.items() if s == best and sim.edge_in_b(*e)]
        if common_best:
            assert move == min(common_best)


def test_next_move_adapter_legal():
    st = apply_round(initial_state(), (1, 2), (2, 3))
    for spec in ("random", "greedy-common", "isolationist"):
        move = make_strategy(spec).next_move(st, random.Random(5))
        assert move in st.a.edge_set()


def test_greedy_on_restored_state_sees_all_commons():
    # common edges born after the triangle must be visible after a
    # snapshot restore; here common = {(2,3), (1,4)} and (1,4) is minimal
    st = apply_round(initial_state(), (1, 2), (1, 3))
    assert st.common == {(2, 3), (1, 4)}
    move = GreedyCommonAlice().next_move(st, random.Random(0))
    assert move == (1, 4)
