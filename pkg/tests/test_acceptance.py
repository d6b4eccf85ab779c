"""Acceptance suite: one test per criterion, one printed verdict line each.

Heavy Monte Carlo campaigns are shared through module fixtures.  Two
checks are known-red and intentionally left failing rather than loosened:
the n=100 connectivity band and the mean-isolation band for the two
adaptive policies.  Both encode external reference values that this
implementation, cross-validated exhaustively against the exact geometric
oracle at small n, measures differently; the test docstrings carry the
analysis.
"""
import random
import time

import pytest

from pedigree.cycles import (
    cycle_from_pedigree,
    enumerate_pedigrees,
    pedigree_count,
    sample_uniform,
)
from pedigree.demo import DEMO_A, DEMO_B, demo_edges, narrate
from pedigree.game import apply_round, check_lemma4, initial_state, run_game
from pedigree.graph import T1_AB, T1_BA, T2_AB, T2_BA, TypedEdge, build
from pedigree.harness import (
    ExperimentConfig,
    dmove_experiment,
    lemma3_campaign,
    lemma4_campaign,
    monte_carlo,
    stats_csv_rows,
    trend_is_monotone,
)
from pedigree.polytope import verify_theorem2
from pedigree.strategies import ScriptedAlice

REPORT: list[str] = []


def verdict(num: int, ok: bool, detail: str) -> None:
    line = f"CRITERION {num:2d}: {'PASS' if ok else 'FAIL'} - {detail}"
    REPORT.append(line)
    print("\n" + line)


@pytest.fixture(scope="module", autouse=True)
def write_report():
    yield
    with open("acceptance_report.txt", "w") as fh:
        fh.write("\n".join(REPORT) + "\n")


# the fixed reference cycle used wherever a scripted Alice is required
REFERENCE_SCRIPT = sample_uniform(2001, random.Random(20260808))

STRATEGIES = {
    "scripted": f"scripted:{REFERENCE_SCRIPT.to_text()}",
    "random": "random",
    "greedy-common": "greedy-common",
    "isolationist": "isolationist",
}


@pytest.fixture(scope="module")
def lemma1_stats():
    out = {}
    for name, spec in STRATEGIES.items():
        cfg = ExperimentConfig(
            strategy=spec, n_targets=(1000,), samples=100_000, master_seed=101,
        )
        out[name] = monte_carlo(cfg)
    return out


@pytest.fixture(scope="module")
def sec3_stats():
    cfg = ExperimentConfig(
        strategy="random", n_targets=(100,), samples=100_000, master_seed=7,
        checkpoints=(100,), workers=1,
    )
    return monte_carlo(cfg)


@pytest.fixture(scope="module")
def trend_stats():
    grid = (25, 50, 100, 200, 400)
    out = {}
    for name, spec in STRATEGIES.items():
        cfg = ExperimentConfig(
            strategy=spec, n_targets=grid, samples=10_000, master_seed=55,
            checkpoints=grid,
        )
        out[name] = monte_carlo(cfg)
    return out


@pytest.fixture(scope="module")
def lemma4_report():
    return lemma4_campaign(games=250, n_max=50, master_seed=13)


@pytest.fixture(scope="module")
def lemma3_report():
    return lemma3_campaign(states=1000, n_cap=40, master_seed=29)


@pytest.fixture(scope="module")
def lemma5_reports():
    return {
        name: dmove_experiment(STRATEGIES[name], 900, samples=10_000, master_seed=71)
        for name in ("greedy-common", "random")
    }


def test_criterion_1_worked_example_regression():
    t0 = time.perf_counter()
    g = build(DEMO_A, DEMO_B)
    ok = g.vertices == {4, 5, 7, 8, 9, 10}
    expected = {
        TypedEdge(4, 5, T1_BA), TypedEdge(4, 5, T2_AB),
        TypedEdge(5, 7, T2_AB), TypedEdge(4, 7, T2_BA),
        TypedEdge(4, 9, T1_AB), TypedEdge(8, 9, T2_BA),
        TypedEdge(9, 10, T2_AB),
    }
    ok &= g.typed_edges == expected == demo_edges()
    reports, final = narrate()
    by_m = {r.m: r for r in reports}
    ok &= not by_m[6].vertex_added
    ok &= by_m[8].vertex_added and by_m[8].isolated
    ok &= all(r.target is None for r in by_m[8].rules)  # all four rules fail
    ten = {r.tag: r.target for r in by_m[10].rules}
    ok &= ten[T2_AB] == 9 and ten[T1_BA] is None and ten[T2_BA] is None
    ok &= g.is_connected and final.is_connected
    # the engine replay agrees with the static builder
    traj = run_game(ScriptedAlice(DEMO_A), 10, seed=0, bob_script=DEMO_B, keep_graph=True)
    ok &= traj.final_graph.typed_edges == expected and traj.t_series[-1] == 1
    dt = time.perf_counter() - t0
    ok &= dt < 1.0
    verdict(1, ok, f"worked-example facts reproduced, runtime {dt:.3f}s < 1s")
    assert ok


def test_criterion_2_bijection_counting():
    t0 = time.perf_counter()
    ok = True
    counts = {4: 3, 5: 12, 6: 60, 7: 360, 8: 2520}
    for n, expected in counts.items():
        orders = set()
        k = 0
        for p in enumerate_pedigrees(n):
            c = cycle_from_pedigree(p)
            orders.add(c.order)
            from pedigree.cycles import pedigree_from_cycle

            ok &= pedigree_from_cycle(c) == p
            k += 1
        ok &= k == expected == pedigree_count(n) and len(orders) == expected
    dt = time.perf_counter() - t0
    ok &= dt < 10.0
    verdict(2, ok, f"(n-1)!/2 counts and round-trip identity for n=4..8, {dt:.1f}s < 10s")
    assert ok


def test_criterion_3_theorem2_cross_validation():
    t0 = time.perf_counter()
    r6 = verify_theorem2(6)
    dt6 = time.perf_counter() - t0
    ok = r6.pairs_checked == 1770 and not r6.disagreements and dt6 < 300
    t1 = time.perf_counter()
    r7 = verify_theorem2(7, sample=10_000, seed=20260808)
    dt7 = time.perf_counter() - t1
    ok &= r7.sampled and r7.pairs_checked == 10_000 and not r7.disagreements
    verdict(
        3, ok,
        f"n=6 all 1770 pairs agree ({dt6:.0f}s < 300s); "
        f"n=7 seeded 10^4-pair sample agrees ({dt7:.0f}s)",
    )
    assert ok


def test_criterion_4_lemma4_conformance(lemma4_report):
    t0 = time.perf_counter()
    rep = lemma4_report
    ok = rep.instances >= 10_000
    ok &= rep.strict_failures == 0
    # the documented 4-node counterexample must appear in the report
    st = apply_round(initial_state(), (1, 2), (1, 3))
    ce = check_lemma4(st, (2, 4))
    printed = [c for c in ce.checks if "printed" in c.name][0]
    ok &= ce.strict_ok and not printed.ok
    ok &= rep.printed_bound_exceedances > 0
    dt = time.perf_counter() - t0
    verdict(
        4, ok,
        f"{rep.instances} instances, 0 strict violations, printed d-move bound "
        f"exceeded {rep.printed_bound_exceedances} times incl. the documented "
        f"4-node counterexample (P(0,0)=1/2 vs 0)",
    )
    assert ok


def test_criterion_5_mean_isolation_count(lemma1_stats):
    """Known-red for the adaptive policies.

    The mean number of isolated-vertex creations is 2 for a fixed cycle
    played against a uniformly random opponent, and the fixed and
    uniformly-random policies measure inside [1.95, 2.05] as required.
    The greedy-common and isolationist policies react to the opponent's
    cycle, which provably changes the creation process (they avoid or
    seek moves on shared edges); exact enumeration over all opponent
    choice trees confirms the gap, and long-horizon runs to n=16000 show
    no compensating tail.  Their means sit near 1.84 and 1.94, so the
    uniform band below fails for them; the engine itself is corroborated
    by the exact geometric cross-validation and the fixed-cycle law.
    """
    details = []
    ok = True
    for name, stats in lemma1_stats.items():
        mean_y = stats.mean_y()
        late_frac = stats.late_isolated_games / stats.games
        in_band = 1.95 <= mean_y <= 2.05
        late_ok = late_frac <= 0.005
        ok &= in_band and late_ok
        details.append(f"{name}: meanY={mean_y:.4f}{'' if in_band else ' OUT-OF-BAND'}"
                       f" late={late_frac:.5f}")
    verdict(5, ok, "; ".join(details))
    assert ok


def test_criterion_6_degree_bounds(lemma1_stats, sec3_stats, trend_stats, lemma5_reports):
    max_deg = max(
        [s.max_simple_degree for s in lemma1_stats.values()]
        + [sec3_stats.max_simple_degree]
        + [s.max_simple_degree for s in trend_stats.values()]
    )
    max_typed = max(
        [s.max_typed_past for s in lemma1_stats.values()]
        + [sec3_stats.max_typed_past]
        + [s.max_typed_past for s in trend_stats.values()]
    )
    ok = max_deg <= 6 and max_typed <= 2
    verdict(
        6, ok,
        f"max simple degree seen {max_deg} <= 6, max typed past-degree {max_typed} <= 2 "
        "(hard in-engine assertion active in every game)",
    )
    assert ok


def test_criterion_7_connectivity_frequency(sec3_stats):
    """Known-red on the frequency band.

    The acceptance band [0.82, 0.86] matches what exhaustive enumeration
    gives near n=12, but at n=100 the measured connectivity frequency is
    about 0.992.  The implementation is validated independently: the
    connectivity criterion agrees with the exact rational-arithmetic hull
    oracle on every pair at n<=6 and on 10^4 sampled pairs at n=7, a
    literal transcription of the construction rules agrees with the
    engine on random pairs, and Monte Carlo frequencies match exhaustive
    census fractions at n=7.  The two-component structure claim is
    confirmed (and reported) below.
    """
    freq = sec3_stats.connected_freq(100)
    band_ok = 0.82 <= freq <= 0.86
    p2 = sec3_stats.p2_components(100)
    p2_ok = p2 >= 0.90
    small_mean = (
        sec3_stats.small_comp_sum.get(100, 0) / max(sec3_stats.two_comp.get(100, 1), 1)
    )
    ok = band_ok and p2_ok
    verdict(
        7, ok,
        f"connected@100 = {freq:.4f} (band [0.82,0.86]{'' if band_ok else ' NOT MET'}); "
        f"two-component share of disconnections = {p2:.3f} >= 0.90; "
        f"mean small-component size {small_mean:.2f} (giant-plus-tiny pattern)",
    )
    assert ok


def test_criterion_8_component_attachability(lemma3_report):
    rep = lemma3_report
    ok = rep.states == 1000 and rep.failures == 0
    verdict(8, ok, f"{rep.states} random reachable states at n<=40, {rep.failures} failures")
    assert ok


def test_criterion_9_connectivity_trend(trend_stats):
    grid = (25, 50, 100, 200, 400)
    ok = True
    details = []
    for name, stats in trend_stats.items():
        points = [(cp, stats.connected.get(cp, 0), stats.games) for cp in grid]
        mono = trend_is_monotone(points)
        ends = stats.connected_freq(400) > stats.connected_freq(25)
        ok &= mono and ends
        details.append(
            f"{name}: " + "->".join(f"{stats.connected_freq(cp):.3f}" for cp in grid)
        )
    # sanity direction (report only): the adversarial scorer does no better
    # than uniform play at n=100
    adv = trend_stats["isolationist"].connected_freq(100)
    uni = trend_stats["random"].connected_freq(100)
    details.append(f"isolationist@100 {adv:.3f} <= random@100 {uni:.3f}: {adv <= uni}")
    verdict(9, ok, "monotone within tolerance and f(400) > f(25) for all: " + "; ".join(details))
    assert ok


def test_criterion_10_dmove_window(lemma5_reports):
    ok = True
    details = []
    for name, rep in lemma5_reports.items():
        ok &= rep.games == 10_000 and rep.failures == 0 and rep.qualifying > 0
        details.append(
            f"{name}: {rep.qualifying} qualifying, 0 with < 300 window d-moves "
            f"(min seen {rep.min_window_dmoves})"
        )
    verdict(10, ok, "; ".join(details))
    assert ok


def test_criterion_11_worker_determinism(sec3_stats):
    cfg8 = ExperimentConfig(
        strategy="random", n_targets=(100,), samples=100_000, master_seed=7,
        checkpoints=(100,), workers=8,
    )
    stats8 = monte_carlo(cfg8)
    json1, json8 = sec3_stats.to_json(), stats8.to_json()
    csv1, csv8 = stats_csv_rows(sec3_stats), stats_csv_rows(stats8)
    ok = json1 == json8 and csv1 == csv8
    verdict(11, ok, "1-worker and 8-worker aggregates byte-identical (JSON and CSV)")
    assert ok
