"""Ground-truth geometric adjacency for small n.

Pedigrees embed as 0/1 stage-indicator vectors (one block per added node,
a single 1 marking the insertion edge).  Two embedded pedigrees are
adjacent vertices of their convex hull iff the midpoint of their segment
cannot be written as a convex combination of the remaining vertices.  The
verdict is always backed by an exactly verified certificate: rational
convex multipliers reproducing the midpoint, or a separating functional
evaluated in exact arithmetic.  Floating point is used only to steer the
search, never to decide.
"""
from __future__ import annotations

import json
import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import linprog

from .cycles import (
    Pedigree,
    PedigreeError,
    cycle_from_pedigree,
    enumerate_pedigrees,
    pedigree_count,
)
from .graph import CycleIndex, adjacent_from_indexes


def stage_width(k: int) -> int:
    return (k - 1) * (k - 2) // 2


def dimension(n: int) -> int:
    """Total number of coordinates for pedigrees on [n]."""
    if n < 4:
        raise PedigreeError(f"embedding needs n >= 4, got {n}")
    return sum(stage_width(k) for k in range(4, n + 1))


def coord_index(n: int, k: int, pair: tuple[int, int]) -> int:
    """Flat index of the (stage k, edge {i,j}) coordinate, 0-based."""
    i, j = pair
    if not (4 <= k <= n and 1 <= i < j <= k - 1):
        raise PedigreeError(f"no coordinate (k={k}, pair={{{i},{j}}}) for n={n}")
    offset = sum(stage_width(t) for t in range(4, k))
    width = k - 1
    rank = (i - 1) * width - i * (i - 1) // 2 + (j - i - 1)
    return offset + rank


@dataclass(frozen=True)
class PedigreeVector:
    """0/1 indicator of a pedigree: exactly one 1 per stage 4..n."""

    n: int
    ones: tuple[int, ...]

    @property
    def dim(self) -> int:
        return dimension(self.n)

    def dense(self) -> tuple[int, ...]:
        out = [0] * self.dim
        for i in self.ones:
            out[i] = 1
        return tuple(out)


def embed(p: Pedigree) -> PedigreeVector:
    if p.n < 4:
        raise PedigreeError(f"embedding needs n >= 4, got {p.n}")
    cyc = cycle_from_pedigree(p)
    ones = tuple(
        coord_index(p.n, k, cyc.nu_pair(k)) for k in range(4, p.n + 1)
    )
    return PedigreeVector(p.n, ones)


@dataclass(frozen=True)
class SeparationCertificate:
    """Functional with f(mid) strictly above f(w) for every other vertex."""

    coeffs: tuple[Fraction, ...]

    def value(self, vec: PedigreeVector) -> Fraction:
        return sum((self.coeffs[i] for i in vec.ones), start=Fraction(0))

    def verify(self, u: PedigreeVector, v: PedigreeVector,
               others: Sequence[PedigreeVector]) -> bool:
        mid2 = self.value(u) + self.value(v)  # 2 * f(mid)
        return all(2 * self.value(w) < mid2 for w in others)


@dataclass(frozen=True)
class CombinationCertificate:
    """Convex multipliers over the other vertices reproducing the midpoint."""

    weights: tuple[tuple[int, Fraction], ...]  # (index into `others`, weight)

    def verify(self, u: PedigreeVector, v: PedigreeVector,
               others: Sequence[PedigreeVector]) -> bool:
        if any(w < 0 for _, w in self.weights):
            return False
        if sum((w for _, w in self.weights), start=Fraction(0)) != 1:
            return False
        acc = [Fraction(0)] * u.dim
        for idx, w in self.weights:
            for i in others[idx].ones:
                acc[i] += w
        mid = [Fraction(0)] * u.dim
        for i in u.ones:
            mid[i] += Fraction(1, 2)
        for i in v.ones:
            mid[i] += Fraction(1, 2)
        return acc == mid


@dataclass(frozen=True)
class HullVerdict:
    adjacent: bool
    method: str
    certificate: SeparationCertificate | CombinationCertificate


class _ExactPhase1:
    """Dense phase-1 simplex over Fractions with Bland's rule.

    Decides feasibility of  A x = b, x >= 0  and leaves behind either a
    basic feasible solution or a Farkas vector y with yA <= 0 < yb.
    """

    def __init__(self, columns: list[list[int]], b: list[Fraction]):
        self.m = len(b)
        self.n_cols = len(columns)
        rows = [
            [Fraction(columns[j][i]) for j in range(self.n_cols)]
            + [Fraction(1) if t == i else Fraction(0) for t in range(self.m)]
            + [b[i]]
            for i in range(self.m)
        ]
        # flip rows so b >= 0 before installing the artificial basis
        for i, row in enumerate(rows):
            if row[-1] < 0:
                rows[i] = [-x for x in row]
                rows[i][self.n_cols + i] = Fraction(1)
        self.rows = rows
        self.basis = [self.n_cols + i for i in range(self.m)]
        self.in_basis = [False] * self.n_cols
        # phase-1 reduced-cost row, maintained through pivots like any row
        total = self.n_cols + self.m + 1
        cost = [Fraction(0)] * total
        for row in rows:
            for j in range(total):
                cost[j] += row[j]
        for i in range(self.m):
            cost[self.n_cols + i] -= 1
        self.cost = cost

    def solve(self) -> bool:
        """True iff feasible; run until the artificial objective is optimal."""
        rows, basis, n_cols, m = self.rows, self.basis, self.n_cols, self.m
        total = n_cols + m
        cost = self.cost
        in_basis = self.in_basis
        zero = Fraction(0)
        while True:
            enter = -1
            for j in range(n_cols):  # Bland: smallest improving index
                if not in_basis[j] and cost[j] > zero:
                    enter = j
                    break
            if enter < 0:
                return cost[total] == zero
            leave = -1
            best: Optional[Fraction] = None
            for i in range(m):
                a = rows[i][enter]
                if a > zero:
                    ratio = rows[i][total] / a
                    if best is None or ratio < best or (
                        ratio == best and basis[i] < basis[leave]
                    ):
                        best = ratio
                        leave = i
            if leave < 0:
                # unbounded cannot happen in phase 1; treat as optimal
                return cost[total] == zero
            self._pivot(leave, enter)

    def _pivot(self, i: int, j: int) -> None:
        rows = self.rows
        piv = rows[i][j]
        if piv != 1:
            rows[i] = [x / piv for x in rows[i]]
        row_i = rows[i]
        for r in range(self.m):
            if r != i and rows[r][j]:
                f = rows[r][j]
                rows[r] = [x - f * y for x, y in zip(rows[r], row_i)]
        if self.cost[j]:
            f = self.cost[j]
            self.cost[:] = [x - f * y for x, y in zip(self.cost, row_i)]
        old = self.basis[i]
        if old < self.n_cols:
            self.in_basis[old] = False
        self.basis[i] = j
        self.in_basis[j] = True

    def solution(self) -> dict[int, Fraction]:
        out = {}
        for i, bj in enumerate(self.basis):
            if bj < self.n_cols and self.rows[i][-1]:
                out[bj] = self.rows[i][-1]
        return out

    def farkas(self, columns: list[list[int]], b: list[Fraction]) -> list[Fraction]:
        """Solve the final basis system exactly for the infeasibility vector."""
        m = self.m
        mat = []
        rhs = []
        for i, bj in enumerate(self.basis):
            if bj < self.n_cols:
                mat.append([Fraction(columns[bj][r]) for r in range(m)])
                rhs.append(Fraction(0))
            else:
                sign = Fraction(1)
                mat.append([sign if r == bj - self.n_cols else Fraction(0) for r in range(m)])
                rhs.append(Fraction(1))
        y = _solve_square(mat, rhs)
        ok = all(
            sum(y[r] * columns[j][r] for r in range(m)) <= 0
            for j in range(self.n_cols)
        ) and sum(y[r] * b[r] for r in range(m)) > 0
        if not ok:
            y = [-v for v in y]
            ok = all(
                sum(y[r] * columns[j][r] for r in range(m)) <= 0
                for j in range(self.n_cols)
            ) and sum(y[r] * b[r] for r in range(m)) > 0
        if not ok:
            raise PedigreeError("failed to extract a Farkas certificate")
        return y


def _solve_square(mat: list[list[Fraction]], rhs: list[Fraction]) -> list[Fraction]:
    """Exact Gaussian elimination; raises on singular systems."""
    m = len(mat)
    a = [row[:] + [rhs[i]] for i, row in enumerate(mat)]
    for col in range(m):
        piv = next((r for r in range(col, m) if a[r][col]), None)
        if piv is None:
            raise PedigreeError("singular basis system")
        a[col], a[piv] = a[piv], a[col]
        inv = a[col][col]
        a[col] = [x / inv for x in a[col]]
        for r in range(m):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return [a[r][m] for r in range(m)]


def _heuristic_functional(
    u: PedigreeVector, v: PedigreeVector, others: Sequence[PedigreeVector]
) -> Optional[SeparationCertificate]:
    """Try f = 1_u + 1_v, exact on integers; often supports the edge."""
    f = [0] * u.dim
    for i in u.ones:
        f[i] += 1
    for i in v.ones:
        f[i] += 1
    mid2 = sum(f[i] for i in u.ones) + sum(f[i] for i in v.ones)
    for w in others:
        if 2 * sum(f[i] for i in w.ones) >= mid2:
            return None
    return SeparationCertificate(tuple(Fraction(x) for x in f))


def _float_guided_functional(
    u: PedigreeVector, v: PedigreeVector, others: Sequence[PedigreeVector]
) -> Optional[SeparationCertificate]:
    """LP in floats for a separating functional, then exact verification."""
    dim = u.dim
    n_others = len(others)
    # variables: f (dim), c; constraints f.w - c <= 0; objective max f.mid - c
    a_ub = np.zeros((n_others, dim + 1))
    for r, w in enumerate(others):
        for i in w.ones:
            a_ub[r, i] = 1.0
        a_ub[r, dim] = -1.0
    obj = np.zeros(dim + 1)
    for i in u.ones:
        obj[i] -= 0.5
    for i in v.ones:
        obj[i] -= 0.5
    obj[dim] = 1.0
    res = linprog(
        obj, A_ub=a_ub, b_ub=np.zeros(n_others),
        bounds=[(-1, 1)] * dim + [(None, None)], method="highs",
    )
    if res.status != 0 or res.x is None:
        return None
    for scale in (1 << 16, 1 << 24, 1 << 32):
        f = [round(x * scale) for x in res.x[:dim]]
        mid2 = sum(f[i] for i in u.ones) + sum(f[i] for i in v.ones)
        if all(2 * sum(f[i] for i in w.ones) < mid2 for w in others):
            return SeparationCertificate(tuple(Fraction(x) for x in f))
    return None


def _float_guided_combination(
    u: PedigreeVector, v: PedigreeVector, others: Sequence[PedigreeVector]
) -> Optional[CombinationCertificate]:
    """LP in floats for convex multipliers, re-solved exactly on the support."""
    dim = u.dim
    n_others = len(others)
    a_eq = np.zeros((dim + 1, n_others))
    for c, w in enumerate(others):
        for i in w.ones:
            a_eq[i, c] = 1.0
        a_eq[dim, c] = 1.0
    b_eq = np.zeros(dim + 1)
    for i in u.ones:
        b_eq[i] += 0.5
    for i in v.ones:
        b_eq[i] += 0.5
    b_eq[dim] = 1.0
    res = linprog(
        np.zeros(n_others), A_eq=a_eq, b_eq=b_eq,
        bounds=[(0, None)] * n_others, method="highs",
    )
    if res.status != 0 or res.x is None:
        return None
    support = [j for j, x in enumerate(res.x) if x > 1e-9]
    if not support:
        return None
    cols = [_column(others[j], dim) for j in support]
    b = _midpoint_rhs(u, v)
    lp = _ExactPhase1(cols, b)
    if not lp.solve():
        return None
    sol = lp.solution()
    weights = tuple((support[j], w) for j, w in sorted(sol.items()))
    return CombinationCertificate(weights)


def _column(w: PedigreeVector, dim: int) -> list[int]:
    col = [0] * (dim + 1)
    for i in w.ones:
        col[i] = 1
    col[dim] = 1
    return col


def _midpoint_rhs(u: PedigreeVector, v: PedigreeVector) -> list[Fraction]:
    b = [Fraction(0)] * (u.dim + 1)
    for i in u.ones:
        b[i] += Fraction(1, 2)
    for i in v.ones:
        b[i] += Fraction(1, 2)
    b[u.dim] = Fraction(1)
    return b


def hull_adjacent(
    u: PedigreeVector, v: PedigreeVector, all_vectors: Sequence[PedigreeVector]
) -> HullVerdict:
    """Exactly certified adjacency of u and v among all embedded pedigrees."""
    if u == v:
        raise PedigreeError("hull adjacency of a vertex with itself is undefined")
    if u.n != v.n:
        raise PedigreeError("vectors live in different embeddings")
    if len(all_vectors) != pedigree_count(u.n) or len(set(all_vectors)) != len(all_vectors):
        raise PedigreeError("need the complete, duplicate-free vertex set")
    if u not in all_vectors or v not in all_vectors:
        raise PedigreeError("u and v must belong to the vertex set")
    others = [w for w in all_vectors if w != u and w != v]

    cert = _heuristic_functional(u, v, others)
    if cert is not None:
        return HullVerdict(True, "sum-functional", cert)

    comb = _float_guided_combination(u, v, others)
    if comb is not None and comb.verify(u, v, others):
        return HullVerdict(False, "float-guided-combination", comb)

    sep = _float_guided_functional(u, v, others)
    if sep is not None and sep.verify(u, v, others):
        return HullVerdict(True, "float-guided-functional", sep)

    # exact fallback decides either way
    dim = u.dim
    cols = [_column(w, dim) for w in others]
    b = _midpoint_rhs(u, v)
    lp = _ExactPhase1(cols, b)
    if lp.solve():
        weights = tuple(sorted(lp.solution().items()))
        cert2 = CombinationCertificate(weights)
        if not cert2.verify(u, v, others):
            raise PedigreeError("exact simplex produced an invalid combination")
        return HullVerdict(False, "exact-simplex", cert2)
    y = lp.farkas(cols, b)
    cert3 = SeparationCertificate(tuple(y[:dim]))
    # ones-row multiplier shifts every value equally; fold it in and verify
    if not cert3.verify(u, v, others):
        raise PedigreeError("exact simplex produced an invalid separation")
    return HullVerdict(True, "exact-simplex", cert3)


@dataclass(frozen=True)
class Theorem2Report:
    n: int
    vertices: int
    pairs_checked: int
    sampled: bool
    disagreements: tuple[tuple[int, int], ...]
    complete: bool
    min_degree: int
    max_degree: int

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "vertices": self.vertices,
            "pairs": self.pairs_checked,
            "sampled": self.sampled,
            "disagreements": len(self.disagreements),
            "disagreement_pairs": [list(p) for p in self.disagreements],
            "complete": self.complete,
            "min_degree": self.min_degree,
            "max_degree": self.max_degree,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True)


def verify_theorem2(n: int, sample: Optional[int] = None, seed: int = 0) -> Theorem2Report:
    """Cross-validate the connectivity criterion against hull adjacency.

    All pairs are compared for n <= 6; for n = 7 a seeded sample keeps the
    geometric side tractable (the combinatorial census is still complete).
    """
    if not 4 <= n <= 7:
        raise PedigreeError(f"geometric verification supports 4 <= n <= 7, got {n}")
    peds = list(enumerate_pedigrees(n))
    vectors = [embed(p) for p in peds]
    indexes = [CycleIndex(cycle_from_pedigree(p)) for p in peds]
    v = len(peds)
    degrees = [0] * v
    comb: dict[tuple[int, int], bool] = {}
    for i in range(v):
        for j in range(i + 1, v):
            adj = adjacent_from_indexes(indexes[i], indexes[j])
            comb[(i, j)] = adj
            if adj:
                degrees[i] += 1
                degrees[j] += 1
    all_pairs = sorted(comb)
    if sample is not None and sample < len(all_pairs):
        rng = random.Random(seed)
        pairs = sorted(rng.sample(all_pairs, sample))
        sampled = True
    else:
        pairs = all_pairs
        sampled = False
    disagreements = []
    for i, j in pairs:
        verdict = hull_adjacent(vectors[i], vectors[j], vectors)
        if verdict.adjacent != comb[(i, j)]:
            disagreements.append((i, j))
    return Theorem2Report(
        n=n,
        vertices=v,
        pairs_checked=len(pairs),
        sampled=sampled,
        disagreements=tuple(disagreements),
        complete=all(comb.values()),
        min_degree=min(degrees),
        max_degree=max(degrees),
    )
