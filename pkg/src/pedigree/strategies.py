"""Pluggable Alice policies for the connectivity game.

A strategy owns per-game caches only; it is reset at the start of every
game and must return an edge of Alice's current cycle each round,
deterministically given the state and its rng stream.
"""
from __future__ import annotations

import heapq
from typing import Callable, Optional

from .cycles import Pair, Pedigree, PedigreeError, cycle_from_pedigree
from .game import GameSim, GameState


class Strategy:
    """Base: subclasses implement choose(sim, rng) and may keep caches."""

    name = "base"
    needs_edge_log = False

    def reset(self, sim: GameSim) -> None:  # noqa: B027 (default no-op)
        pass

    def choose(self, sim: GameSim, rng) -> Pair:
        raise NotImplementedError

    def next_move(self, state: GameState, rng) -> Pair:
        """Functional adapter over an immutable state snapshot."""
        sim = GameSim.from_state(state)
        sim.log_a_edges = True
        self.reset(sim)
        move = self.choose(sim, rng)
        if not sim.edge_in_a(*move):
            raise PedigreeError(f"strategy {self.name} returned a non-edge {move}")
        return move


_REGISTRY: dict[str, Callable[..., Strategy]] = {}


def register(name: str):
    def deco(factory):
        _REGISTRY[name] = factory
        return factory
    return deco


def strategy_names() -> tuple[str, ...]:
    return tuple(sorted(_REGISTRY))


def make_strategy(spec: str) -> Strategy:
    """Parse a CLI-style selector such as ``random`` or ``scripted:n:5;idx:1,2``."""
    head, _, arg = spec.partition(":")
    if head not in _REGISTRY:
        raise PedigreeError(
            f"unknown strategy {head!r}; known: {', '.join(strategy_names())}"
        )
    return _REGISTRY[head](arg) if arg else _REGISTRY[head]()


@register("scripted")
class ScriptedAlice(Strategy):
    """Alice replays a fixed pedigree, so her cycle ignores Bob entirely."""

    needs_edge_log = False

    def __init__(self, script: Pedigree | str):
        if isinstance(script, str):
            script = Pedigree.from_text(script)
        self.script = script
        self.name = f"scripted:{script.to_text()}"
        cyc = cycle_from_pedigree(script)
        self._pairs = [cyc.nu_pair(m) for m in range(4, script.n + 1)]

    def choose(self, sim: GameSim, rng) -> Pair:
        idx = sim.n - 3  # the move inserts node sim.n + 1
        if idx >= len(self._pairs):
            raise PedigreeError(
                f"script exhausted: covers n <= {self.script.n}, round asks for {sim.n + 1}"
            )
        return self._pairs[idx]


@register("random")
class UniformRandomAlice(Strategy):
    """Uniform over the edges of Alice's current cycle."""

    name = "random"
    needs_edge_log = False

    def choose(self, sim: GameSim, rng) -> Pair:
        return sim.random_edge_a(rng)


class _EdgeTracker:
    """Cheap queries over Alice's live edges.

    The minimum common edge is found by scanning the sim's common-edge
    birth log: every edge that is common now was common the moment it was
    created, and commonness is never regained, so stale entries just fail
    the two adjacency probes and get compacted away.  The minimum edge
    overall comes from a lazily fed heap over the cycle's edge-birth log;
    subdivided edges never return, so stale heap tops can be dropped.
    """

    def __init__(self, sim: GameSim):
        self.sim = sim
        sim.track_commons = True
        self.cursor = len(sim.a_edge_log)
        self.heap: list[Pair] = list(sim.a_edge_log)
        heapq.heapify(self.heap)

    def min_common(self) -> Optional[Pair]:
        sim = self.sim
        succ_a = sim.succ_a
        succ_b = sim.succ_b
        log = sim.common_log
        best = None
        live = 0
        for e in log:
            lo, hi = e
            if (succ_a[lo] == hi or succ_a[hi] == lo) and (
                succ_b[lo] == hi or succ_b[hi] == lo
            ):
                live += 1
                if best is None or e < best:
                    best = e
        if len(log) > 3 * live + 12:
            sim.common_log = [
                e for e in log
                if (succ_a[e[0]] == e[1] or succ_a[e[1]] == e[0])
                and (succ_b[e[0]] == e[1] or succ_b[e[1]] == e[0])
            ]
        return best

    def min_any(self) -> Pair:
        sim = self.sim
        log = sim.a_edge_log
        h = self.heap
        cur = self.cursor
        end = len(log)
        if cur < end:
            push = heapq.heappush
            while cur < end:
                push(h, log[cur])
                cur += 1
            self.cursor = end
        succ_a = sim.succ_a
        while h:
            lo, hi = h[0]
            if succ_a[lo] == hi or succ_a[hi] == lo:
                return h[0]
            heapq.heappop(h)
        raise PedigreeError("edge heap ran dry; was the edge log disabled?")


@register("greedy-common")
class GreedyCommonAlice(Strategy):
    """Plays the lowest common edge whenever one exists, else the lowest
    non-common edge."""

    name = "greedy-common"
    needs_edge_log = True

    def __init__(self):
        self._edges: Optional[_EdgeTracker] = None

    def reset(self, sim: GameSim) -> None:
        self._edges = _EdgeTracker(sim)

    def choose(self, sim: GameSim, rng) -> Pair:
        if sim.s > 0:
            e = self._edges.min_common()
            if e is None:
                raise PedigreeError("S > 0 but no live common edge found")
            return e
        # with no common edges left, every edge is a d-move candidate
        return self._edges.min_any()


@register("isolationist")
class IsolationistAlice(Strategy):
    """Minimizes the exact one-round probability that the component count
    drops, breaking ties canonically (optionally preferring common edges).

    Scores come from the same facts the exact transition table encodes: a
    common candidate can never lower T, and a non-common candidate lowers
    T exactly when Bob hits a non-common edge whose back-link lives in a
    different component than the candidate's own target.  When T <= 1 no
    move can lower T, so the canonical minimum edge is returned outright.
    """

    needs_edge_log = True

    def __init__(self, variant: str = ""):
        if variant not in ("", "prefer-c"):
            raise PedigreeError(f"unknown isolationist variant {variant!r}")
        self.prefer_c = variant == "prefer-c"
        self.name = "isolationist:prefer-c" if self.prefer_c else "isolationist"
        self._edges: Optional[_EdgeTracker] = None

    def reset(self, sim: GameSim) -> None:
        self._edges = _EdgeTracker(sim)

    def choose(self, sim: GameSim, rng) -> Pair:
        if sim.t <= 1:
            # no move can drop the component count: every score is zero
            if self.prefer_c and sim.s > 0:
                e = self._edges.min_common()
                if e is not None:
                    return e
            return self._edges.min_any()
        # bucket the back-link component of every non-common Bob edge once
        find = sim.find
        buckets: dict[int, int] = {}
        noncommon_total = 0
        shift = sim.shift
        destroyed_a = sim.destroyed_a
        succ_a = sim.succ_a
        succ_b = sim.succ_b
        for w in range(1, sim.n + 1):
            v = succ_b[w]
            lo, hi = (w, v) if w < v else (v, w)
            if succ_a[lo] == hi or succ_a[hi] == lo:
                continue
            noncommon_total += 1
            t = destroyed_a.get((lo << shift) | hi, 0) or hi
            r = find(t)
            buckets[r] = buckets.get(r, 0) + 1
        destroyed_b = sim.destroyed_b
        bget = buckets.get
        prefer_c = self.prefer_c
        best = None
        best_edge = None
        for e in sorted(sim.edges_a()):
            lo, hi = e
            if succ_b[lo] == hi or succ_b[hi] == lo:
                key = (0, 0) if prefer_c else 0
            else:
                t = destroyed_b.get((lo << shift) | hi, 0) or hi
                score = noncommon_total - bget(find(t), 0)
                key = (score, 1) if prefer_c else score
            if best is None or key < best:
                best = key
                best_edge = e
                # canonical iteration order: the first zero is the answer
                if key == ((0, 0) if prefer_c else 0):
                    break
        return best_edge


DEFAULT_PORTFOLIO = ("scripted", "random", "greedy-common", "isolationist")
