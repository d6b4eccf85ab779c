"""Batch experiment runner with deterministic seeding and aggregation.

Per-game randomness is derived as sha256("ped:<master>:<index>:<role>")
truncated to 64 bits, one stream per player, so results are a pure
function of the master seed and the game index no matter how games are
chunked across workers.  Aggregates hold integer counters only; derived
frequencies are computed at serialization time, which keeps merged output
byte-identical for any worker count.
"""
from __future__ import annotations

import hashlib
import json
import math
import random
from dataclasses import dataclass, field, fields
from multiprocessing import get_context
from typing import Sequence

from .cycles import Pair, PedigreeError, cycle_from_pedigree, enumerate_pedigrees
from .game import GameSim, conformance_from_sim, lemma3_check_sim
from .graph import CycleIndex, InvariantViolation, adjacent_from_indexes
from .strategies import Strategy, make_strategy

# named constants used by the statistical experiments
LEMMA5_N0_MIN = 900          # smallest window start the d-move bound covers
LEMMA6_DELTA = 1.0 / 42.0    # fixed slack constant of the T-decrease bound
LEMMA6_MIN_PROB = 1.0 / 7.0  # guaranteed T-decrease probability per window
Z_999 = 3.090232306167813    # one-sided normal quantile at significance 1e-3


def lemma1_tail_bound(n0: int) -> float:
    """Probability bound for any isolated-vertex event at time >= n0."""
    if n0 <= 2:
        return 1.0
    return 4.0 / (n0 - 2)


def boost_rounds(eps: float) -> float:
    """Window-stretch factor used when iterating the T-decrease argument."""
    return 10.0 * math.log(2.0 / eps)


def derive_seed(master_seed: int, game_index: int, role: str) -> int:
    digest = hashlib.sha256(f"ped:{master_seed}:{game_index}:{role}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def derive_rngs(master_seed: int, game_index: int) -> tuple[random.Random, random.Random]:
    return (
        random.Random(derive_seed(master_seed, game_index, "alice")),
        random.Random(derive_seed(master_seed, game_index, "bob")),
    )


@dataclass(frozen=True)
class ExperimentConfig:
    """Flat, file-serializable description of one Monte Carlo campaign."""

    strategy: str = "random"
    n_targets: tuple[int, ...] = (100,)
    samples: int = 1000
    master_seed: int = 0
    checkpoints: tuple[int, ...] = ()
    y_cut: int = 0  # 0 means: truncate Y at the largest n target
    lemma2_assert: bool = True
    lemma3_rate: int = 0  # check every k-th round when > 0
    lemma4_rate: int = 0
    workers: int = 1
    out_csv: str = ""
    out_json: str = ""

    def __post_init__(self):
        if self.samples < 1:
            raise PedigreeError("samples must be >= 1")
        if not self.n_targets or min(self.n_targets) < 4:
            raise PedigreeError("n_targets must all be >= 4")
        bad = set(self.checkpoints) - set(self.n_targets)
        if bad:
            raise PedigreeError(f"checkpoints {sorted(bad)} are not n targets")

    @property
    def n_max(self) -> int:
        return max(self.n_targets)

    @property
    def effective_checkpoints(self) -> tuple[int, ...]:
        return tuple(sorted(self.checkpoints or self.n_targets))

    def to_text(self) -> str:
        lines = []
        for f in fields(self):
            v = getattr(self, f.name)
            if isinstance(v, tuple):
                v = ",".join(str(x) for x in v)
            lines.append(f"{f.name} = {v}")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "ExperimentConfig":
        kwargs = {}
        types = {f.name: f.type for f in fields(cls)}
        for raw in text.splitlines():
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key not in types:
                raise PedigreeError(f"unknown config key {key!r}")
            t = types[key]
            if t.startswith("tuple"):
                kwargs[key] = tuple(int(x) for x in value.split(",")) if value else ()
            elif t == "int":
                kwargs[key] = int(value)
            elif t == "bool":
                kwargs[key] = value.lower() in ("1", "true", "yes")
            else:
                kwargs[key] = value
        return cls(**kwargs)


@dataclass
class AggregateStats:
    """Mergeable integer counters for one (strategy, n-targets) campaign."""

    strategy: str = ""
    n_max: int = 0
    y_cut: int = 0
    games: int = 0
    rounds: int = 0
    y_sum: int = 0
    y_max: int = 0
    late_isolated_games: int = 0
    dmoves_sum: int = 0
    max_simple_degree: int = 0
    max_typed_past: int = 0
    connected: dict[int, int] = field(default_factory=dict)
    t_sum: dict[int, int] = field(default_factory=dict)
    t_hist: dict[int, dict[int, int]] = field(default_factory=dict)
    two_comp: dict[int, int] = field(default_factory=dict)
    small_comp_sum: dict[int, int] = field(default_factory=dict)
    lemma3_checks: int = 0
    lemma3_failures: int = 0
    lemma4_checks: int = 0
    lemma4_strict_failures: int = 0
    lemma4_printed_exceedances: int = 0

    def merge(self, other: "AggregateStats") -> "AggregateStats":
        if (self.strategy, self.n_max, self.y_cut) != (other.strategy, other.n_max, other.y_cut):
            raise PedigreeError("cannot merge stats from different campaigns")
        out = AggregateStats(self.strategy, self.n_max, self.y_cut)
        for name in ("games", "rounds", "y_sum", "late_isolated_games", "dmoves_sum",
                     "lemma3_checks", "lemma3_failures", "lemma4_checks",
                     "lemma4_strict_failures", "lemma4_printed_exceedances"):
            setattr(out, name, getattr(self, name) + getattr(other, name))
        for name in ("y_max", "max_simple_degree", "max_typed_past"):
            setattr(out, name, max(getattr(self, name), getattr(other, name)))
        for name in ("connected", "t_sum", "two_comp", "small_comp_sum"):
            merged = dict(getattr(self, name))
            for k, v in getattr(other, name).items():
                merged[k] = merged.get(k, 0) + v
            setattr(out, name, merged)
        hist = {cp: dict(rows) for cp, rows in self.t_hist.items()}
        for cp, rows in other.t_hist.items():
            tgt = hist.setdefault(cp, {})
            for t, v in rows.items():
                tgt[t] = tgt.get(t, 0) + v
        out.t_hist = hist
        return out

    # -- derived quantities (computed from counters only) ------------------

    def connected_freq(self, cp: int) -> float:
        return self.connected.get(cp, 0) / self.games

    def confidence_interval(self, cp: int, z: float = 1.96) -> tuple[float, float]:
        p = self.connected_freq(cp)
        half = z * math.sqrt(max(p * (1 - p), 1e-12) / self.games)
        return (max(0.0, p - half), min(1.0, p + half))

    def mean_y(self) -> float:
        return self.y_sum / self.games

    def mean_t(self, cp: int) -> float:
        return self.t_sum.get(cp, 0) / self.games

    def p2_components(self, cp: int) -> float:
        disconnected = self.games - self.connected.get(cp, 0)
        if disconnected == 0:
            return 1.0
        return self.two_comp.get(cp, 0) / disconnected

    def to_json_dict(self) -> dict:
        cps = sorted(self.connected)
        return {
            "strategy": self.strategy,
            "n_max": self.n_max,
            "y_cut": self.y_cut,
            "games": self.games,
            "rounds": self.rounds,
            "y_sum": self.y_sum,
            "y_max": self.y_max,
            "mean_y": round(self.mean_y(), 9),
            "late_isolated_games": self.late_isolated_games,
            "dmoves_sum": self.dmoves_sum,
            "max_simple_degree": self.max_simple_degree,
            "max_typed_past": self.max_typed_past,
            "checkpoints": {
                str(cp): {
                    "connected": self.connected[cp],
                    "connected_freq": round(self.connected_freq(cp), 9),
                    "ci95": [round(x, 9) for x in self.confidence_interval(cp)],
                    "mean_T": round(self.mean_t(cp), 9),
                    "T_hist": {str(t): c for t, c in sorted(self.t_hist.get(cp, {}).items())},
                    "two_components": self.two_comp.get(cp, 0),
                    "small_comp_sum": self.small_comp_sum.get(cp, 0),
                }
                for cp in cps
            },
            "lemma3": {"checks": self.lemma3_checks, "failures": self.lemma3_failures},
            "lemma4": {
                "checks": self.lemma4_checks,
                "strict_failures": self.lemma4_strict_failures,
                "printed_bound_exceedances": self.lemma4_printed_exceedances,
            },
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


CSV_HEADER = "strategy,n,samples,connected_freq,mean_Y,max_degree_seen,mean_T,p2_components"


def stats_csv_rows(stats: AggregateStats) -> list[str]:
    rows = []
    for cp in sorted(stats.connected):
        rows.append(
            f"{stats.strategy},{cp},{stats.games},{stats.connected_freq(cp):.6f},"
            f"{stats.mean_y():.6f},{stats.max_simple_degree},"
            f"{stats.mean_t(cp):.6f},{stats.p2_components(cp):.6f}"
        )
    return rows


def _record_checkpoint(agg: AggregateStats, sim: GameSim, cp: int) -> None:
    t = sim.t
    agg.t_sum[cp] = agg.t_sum.get(cp, 0) + t
    hist = agg.t_hist.setdefault(cp, {})
    hist[t] = hist.get(t, 0) + 1
    if t == 1:
        agg.connected[cp] = agg.connected.get(cp, 0) + 1
    else:
        agg.connected.setdefault(cp, 0)
        if t == 2:
            agg.two_comp[cp] = agg.two_comp.get(cp, 0) + 1
            agg.small_comp_sum[cp] = (
                agg.small_comp_sum.get(cp, 0) + sim.component_sizes()[-1]
            )


def _run_chunk(cfg: ExperimentConfig, start: int, stop: int) -> AggregateStats:
    n_max = cfg.n_max
    y_cut = cfg.y_cut or n_max
    strategy = make_strategy(cfg.strategy)
    sim = GameSim(n_max, record_edges=False, record_series=False,
                  log_a_edges=strategy.needs_edge_log,
                  assert_degrees=cfg.lemma2_assert)
    cps = cfg.effective_checkpoints
    agg = AggregateStats(cfg.strategy, n_max, y_cut)
    l3r, l4r = cfg.lemma3_rate, cfg.lemma4_rate
    lemma_hooks = bool(l3r or l4r)
    for idx in range(start, stop):
        alice_rng, bob_rng = derive_rngs(cfg.master_seed, idx)
        sim.reset()
        strategy.reset(sim)
        cp_iter = 0
        next_cp = cps[0]
        choose = strategy.choose
        step = sim.step
        random_edge_b = sim.random_edge_b
        try:
            if lemma_hooks:
                while sim.n < n_max:
                    a_pair = choose(sim, alice_rng)
                    if l4r and sim.n % l4r == 0:
                        rep = conformance_from_sim(sim, a_pair)
                        agg.lemma4_checks += 1
                        if not rep.strict_ok:
                            agg.lemma4_strict_failures += 1
                        if any(not c.ok for c in rep.checks
                               if not c.strict and "printed" in c.name):
                            agg.lemma4_printed_exceedances += 1
                    if l3r and sim.n % l3r == 0:
                        agg.lemma3_checks += 1
                        if not lemma3_check_sim(sim):
                            agg.lemma3_failures += 1
                    step(a_pair, random_edge_b(bob_rng))
                    if sim.n == next_cp:
                        _record_checkpoint(agg, sim, next_cp)
                        cp_iter += 1
                        next_cp = cps[cp_iter] if cp_iter < len(cps) else 0
            else:
                while sim.n < n_max:
                    step(choose(sim, alice_rng), random_edge_b(bob_rng))
                    if sim.n == next_cp:
                        _record_checkpoint(agg, sim, next_cp)
                        cp_iter += 1
                        next_cp = cps[cp_iter] if cp_iter < len(cps) else 0
        except InvariantViolation as exc:
            raise InvariantViolation(
                f"game invariant failed (master_seed={cfg.master_seed}, "
                f"game={idx}, round={sim.n + 1}): {exc}",
                exc.dump,
            ) from exc
        agg.games += 1
        agg.rounds += n_max - 3
        y_trunc = 0
        late = False
        for tme in sim.isolated:
            if tme <= y_cut:
                y_trunc += 1
            if tme >= y_cut:
                late = True
        agg.y_sum += y_trunc
        agg.y_max = max(agg.y_max, y_trunc)
        agg.late_isolated_games += late
        agg.dmoves_sum += sim.dmoves
        agg.max_simple_degree = max(agg.max_simple_degree, sim.max_deg)
        agg.max_typed_past = max(agg.max_typed_past, sim.max_typed_past)
    return agg


def monte_carlo(cfg: ExperimentConfig) -> AggregateStats:
    """Run the configured campaign; identical output for any worker count."""
    chunk = 1024
    spans = [(i, min(i + chunk, cfg.samples)) for i in range(0, cfg.samples, chunk)]
    if cfg.workers <= 1 or len(spans) == 1:
        parts = [_run_chunk(cfg, a, b) for a, b in spans]
    else:
        ctx = get_context("fork")
        with ctx.Pool(cfg.workers) as pool:
            parts = pool.starmap(_run_chunk, [(cfg, a, b) for a, b in spans])
    out = parts[0]
    for p in parts[1:]:
        out = out.merge(p)
    if cfg.out_json:
        with open(cfg.out_json, "w") as fh:
            fh.write(out.to_json() + "\n")
    if cfg.out_csv:
        with open(cfg.out_csv, "w") as fh:
            fh.write(CSV_HEADER + "\n")
            for row in stats_csv_rows(out):
                fh.write(row + "\n")
    return out


# -- exhaustive small-n census -------------------------------------------------


@dataclass(frozen=True)
class SkeletonReport:
    n: int
    vertices: int
    pairs: int
    edges: int
    min_degree: int
    max_degree: int
    degree_hist: dict[int, int]
    complete: bool

    @property
    def min_degree_fraction(self) -> float:
        return self.min_degree / (self.vertices - 1)

    def degrees_sorted(self) -> tuple[int, ...]:
        out = []
        for d, c in sorted(self.degree_hist.items()):
            out.extend([d] * c)
        return tuple(out)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": self.vertices,
            "pairs": self.pairs,
            "edges": self.edges,
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
            "min_degree_fraction": round(self.min_degree_fraction, 9),
            "complete": self.complete,
            "degree_hist": {str(k): v for k, v in sorted(self.degree_hist.items())},
        }


def census(n: int) -> SkeletonReport:
    """Full pedigree-graph adjacency over all cycle pairs on [n]."""
    if not 4 <= n <= 8:
        raise PedigreeError(f"census supports 4 <= n <= 8, got {n}")
    indexes = [CycleIndex(cycle_from_pedigree(p)) for p in enumerate_pedigrees(n)]
    v = len(indexes)
    degrees = [0] * v
    edges = 0
    for i in range(v):
        ii = indexes[i]
        for j in range(i + 1, v):
            if adjacent_from_indexes(ii, indexes[j]):
                degrees[i] += 1
                degrees[j] += 1
                edges += 1
    hist: dict[int, int] = {}
    for d in degrees:
        hist[d] = hist.get(d, 0) + 1
    return SkeletonReport(
        n=n,
        vertices=v,
        pairs=v * (v - 1) // 2,
        edges=edges,
        min_degree=min(degrees),
        max_degree=max(degrees),
        degree_hist=hist,
        complete=edges == v * (v - 1) // 2,
    )


# -- lemma campaigns -----------------------------------------------------------


@dataclass(frozen=True)
class Lemma4CampaignReport:
    instances: int
    c_moves: int
    d_moves: int
    strict_failures: int
    printed_bound_exceedances: int
    failure_examples: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "instances": self.instances,
            "c_moves": self.c_moves,
            "d_moves": self.d_moves,
            "strict_failures": self.strict_failures,
            "printed_bound_exceedances": self.printed_bound_exceedances,
            "failure_examples": list(self.failure_examples),
        }


def lemma4_campaign(games: int, n_max: int, master_seed: int) -> Lemma4CampaignReport:
    """Conformance-check every (state, move) instance of random play."""
    sim = GameSim(n_max, record_edges=False)
    instances = c_moves = d_moves = strict_failures = printed = 0
    examples: list[str] = []
    for idx in range(games):
        alice_rng, bob_rng = derive_rngs(master_seed, idx)
        sim.reset()
        while sim.n < n_max:
            a_pair = sim.random_edge_a(alice_rng)
            rep = conformance_from_sim(sim, a_pair)
            instances += 1
            if rep.kind == "c":
                c_moves += 1
            else:
                d_moves += 1
            if not rep.strict_ok:
                strict_failures += 1
                if len(examples) < 5:
                    examples.append(json.dumps(rep.to_json_dict()))
            if any(not c.ok for c in rep.checks if not c.strict and "printed" in c.name):
                printed += 1
            sim.step(a_pair, sim.random_edge_b(bob_rng))
    return Lemma4CampaignReport(
        instances, c_moves, d_moves, strict_failures, printed, tuple(examples)
    )


@dataclass(frozen=True)
class Lemma3CampaignReport:
    states: int
    failures: int

    def to_json_dict(self) -> dict:
        return {"states": self.states, "failures": self.failures}


def lemma3_campaign(states: int, n_cap: int, master_seed: int) -> Lemma3CampaignReport:
    """Attachability check on random reachable states with n <= n_cap."""
    rng = random.Random(derive_seed(master_seed, 0, "lemma3-plan"))
    sim = GameSim(n_cap, record_edges=False)
    checked = failures = 0
    idx = 0
    while checked < states:
        alice_rng, bob_rng = derive_rngs(master_seed, idx)
        idx += 1
        stop_n = rng.randint(5, n_cap)
        sim.reset()
        while sim.n < stop_n:
            sim.step(sim.random_edge_a(alice_rng), sim.random_edge_b(bob_rng))
        checked += 1
        if not lemma3_check_sim(sim):
            failures += 1
    return Lemma3CampaignReport(checked, failures)


# -- d-move and T-decrease experiments ------------------------------------------


@dataclass(frozen=True)
class DmoveReport:
    strategy: str
    n0: int
    games: int
    qualifying: int
    failures: int  # qualifying games with fewer than n0/3 d-moves in the window
    min_window_dmoves: int

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n0": self.n0,
            "games": self.games,
            "qualifying": self.qualifying,
            "failures": self.failures,
            "min_window_dmoves": self.min_window_dmoves,
        }


def dmove_experiment(strategy_spec: str, n0: int, samples: int, master_seed: int) -> DmoveReport:
    """Count d-moves in (n0, 2*n0] among games with few common edges at n0."""
    if n0 < LEMMA5_N0_MIN:
        raise PedigreeError(f"window start must be >= {LEMMA5_N0_MIN}, got {n0}")
    n_max = 2 * n0
    threshold = math.log(n0) ** 2
    strategy = make_strategy(strategy_spec)
    sim = GameSim(n_max, record_edges=False, log_a_edges=strategy.needs_edge_log)
    qualifying = failures = 0
    min_window = n_max
    for idx in range(samples):
        alice_rng, bob_rng = derive_rngs(master_seed, idx)
        sim.reset()
        strategy.reset(sim)
        s_at_n0 = dm_at_n0 = -1
        while sim.n < n_max:
            sim.step(strategy.choose(sim, alice_rng), sim.random_edge_b(bob_rng))
            if sim.n == n0:
                s_at_n0 = sim.s
                dm_at_n0 = sim.dmoves
        if s_at_n0 <= threshold:
            qualifying += 1
            window = sim.dmoves - dm_at_n0
            min_window = min(min_window, window)
            if window < n0 / 3:
                failures += 1
    return DmoveReport(strategy_spec, n0, samples, qualifying, failures,
                       min_window if qualifying else 0)


@dataclass(frozen=True)
class TDecreaseReport:
    strategy: str
    n0: int
    games: int
    qualifying: int
    decreased: int
    enriched: bool
    passed: bool  # observed frequency >= 1/7 within 3 sigma, or too few games

    def to_json_dict(self) -> dict:
        return {
            "strategy": self.strategy,
            "n0": self.n0,
            "games": self.games,
            "qualifying": self.qualifying,
            "decreased": self.decreased,
            "enriched": self.enriched,
            "frequency": round(self.decreased / self.qualifying, 9) if self.qualifying else None,
            "passed": self.passed,
        }


class _PrefixedStrategy(Strategy):
    """Greedy-common opening to enrich early isolated events, then the target."""

    needs_edge_log = True

    def __init__(self, inner: Strategy, switch_n: int):
        from .strategies import GreedyCommonAlice

        self.inner = inner
        self.opening = GreedyCommonAlice()
        self.switch_n = switch_n
        self.name = f"enriched+{inner.name}"

    def reset(self, sim: GameSim) -> None:
        self.opening.reset(sim)
        self.inner.reset(sim)

    def choose(self, sim: GameSim, rng) -> Pair:
        if sim.n < self.switch_n:
            return self.opening.choose(sim, rng)
        return self.inner.choose(sim, rng)


def t_decrease_experiment(
    strategy_spec: str, n0: int, samples: int, master_seed: int, enrich: bool = False
) -> TDecreaseReport:
    """Frequency of a component-count drop in the doubling window after n0,
    conditioned on at least two components and few common edges at n0."""
    if n0 < LEMMA5_N0_MIN:
        raise PedigreeError(f"window start must be >= {LEMMA5_N0_MIN}, got {n0}")
    n_max = 2 * n0 + 1
    threshold = math.log(n0) ** 2
    strategy: Strategy = make_strategy(strategy_spec)
    if enrich:
        strategy = _PrefixedStrategy(strategy, max(n0 // 6, 10))
    sim = GameSim(n_max, record_edges=False, log_a_edges=strategy.needs_edge_log)
    qualifying = decreased = 0
    for idx in range(samples):
        alice_rng, bob_rng = derive_rngs(master_seed, idx)
        sim.reset()
        strategy.reset(sim)
        t_n0 = s_n0 = -1
        saw_drop = False
        prev_t = -1
        while sim.n < n_max:
            sim.step(strategy.choose(sim, alice_rng), sim.random_edge_b(bob_rng))
            if sim.n == n0:
                t_n0, s_n0 = sim.t, sim.s
                prev_t = sim.t
            elif sim.n > n0 + 1:
                if sim.t < prev_t:
                    saw_drop = True
                prev_t = sim.t
        if t_n0 >= 2 and s_n0 <= threshold:
            qualifying += 1
            if saw_drop:
                decreased += 1
    if qualifying == 0:
        passed = True  # nothing to judge; reported, not fatal
    else:
        freq = decreased / qualifying
        sigma = math.sqrt(LEMMA6_MIN_PROB * (1 - LEMMA6_MIN_PROB) / qualifying)
        passed = freq >= LEMMA6_MIN_PROB - 3 * sigma
    return TDecreaseReport(strategy_spec, n0, samples, qualifying, decreased, enrich, passed)


# -- statistics helpers ---------------------------------------------------------


def two_proportion_drop_significant(
    c1: int, n1: int, c2: int, n2: int, z: float = Z_999
) -> bool:
    """True when sample 2's rate is significantly below sample 1's."""
    p1, p2 = c1 / n1, c2 / n2
    if p2 >= p1:
        return False
    pooled = (c1 + c2) / (n1 + n2)
    se = math.sqrt(max(pooled * (1 - pooled) * (1 / n1 + 1 / n2), 1e-18))
    return (p1 - p2) / se > z


def trend_is_monotone(points: Sequence[tuple[int, int, int]], z: float = Z_999) -> bool:
    """points: (n, connected_count, games); no significant decrease allowed."""
    ordered = sorted(points)
    for (n_a, c_a, g_a), (n_b, c_b, g_b) in zip(ordered, ordered[1:]):
        if two_proportion_drop_significant(c_a, g_a, c_b, g_b, z):
            return False
    return True
