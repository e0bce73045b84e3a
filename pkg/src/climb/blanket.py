"""Directed (causal) Markov blanket discovery.

``find_pc`` recovers the parents-and-children set of a target with a
grow-shrink search plus AND symmetry correction. ``score_partition`` prices a
split of that set into parents and children by total code length, and
``find_best_partition`` minimizes it exhaustively. ``climb`` combines the two
and then walks the children to pick up spouses, yielding the causal blanket.

``pcmb`` is the classical reference blanket algorithm (candidate set with
repeated re-ranking, symmetry filter, spouse search over the whole
parents-and-children set). It returns the same blanket on faithful data but
spends far more independence tests; the benchmark harness compares both.
"""
from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Mapping

from .citests import CiVerdict, IndependenceTest
from .nml import RegretTable, conditional_sc, stochastic_complexity
from .table import CategoricalTable, group_labels

__all__ = [
    "Partition",
    "BlanketResult",
    "PartitionCapError",
    "PcCache",
    "find_pc",
    "score_partition",
    "find_best_partition",
    "climb",
    "pcmb",
]


class PcCache:
    """Memo for parents-and-children searches over one fixed (table, test) pair.

    The searches are deterministic, so a blanket run that revisits a node
    (a child's own neighbourhood, or many targets over the same data) can
    reuse the earlier result instead of re-spending independence tests.
    """

    def __init__(self) -> None:
        self.half: dict[int, tuple[list[int], dict[int, frozenset[int]]]] = {}
        self.full: dict[int, tuple[frozenset[int], dict[int, frozenset[int]]]] = {}


@dataclass(frozen=True)
class Partition:
    """A split of a parents-and-children set into the two roles."""

    parents: frozenset[int]
    children: frozenset[int]


@dataclass(frozen=True)
class BlanketResult:
    parents: frozenset[int]
    children: frozenset[int]
    spouses: frozenset[int]
    tests_performed: int
    sepsets: Mapping[int, frozenset[int]]


class PartitionCapError(RuntimeError):
    """Raised when a node's parents-and-children set exceeds the partition cap."""

    def __init__(self, node: str, degree: int, cap: int) -> None:
        super().__init__(
            f"node {node!r} has {degree} parents/children, above the partition cap {cap}"
        )
        self.node = node
        self.degree = degree
        self.cap = cap


def _half_pc(
    table: CategoricalTable,
    target: int,
    test: IndependenceTest,
    max_cond: int,
    cache: PcCache | None = None,
) -> tuple[list[int], dict[int, frozenset[int]]]:
    """One-sided candidate set: association screen, then subset shrink."""
    if cache is not None and target in cache.half:
        return cache.half[target]
    sepsets: dict[int, frozenset[int]] = {}
    ranked = []
    for v in range(table.m):
        if v == target:
            continue
        verdict = test(target, v, ())
        if verdict.independent:
            sepsets[v] = frozenset()
        else:
            ranked.append((-test.strength(verdict), table.names[v], v))
    ranked.sort()
    cpc = [v for _, _, v in ranked]
    changed = True
    while changed:
        changed = False
        for v in list(cpc):
            others = [u for u in cpc if u != v]
            sep = None
            for size in range(1, min(max_cond, len(others)) + 1):
                for zs in combinations(others, size):
                    if test(target, v, zs).independent:
                        sep = frozenset(zs)
                        break
                if sep is not None:
                    break
            if sep is not None:
                cpc.remove(v)
                sepsets[v] = sep
                changed = True
    if cache is not None:
        cache.half[target] = (cpc, sepsets)
    return cpc, sepsets


def find_pc(
    table: CategoricalTable,
    target: int,
    test: IndependenceTest,
    max_cond: int = 3,
    cache: PcCache | None = None,
) -> tuple[frozenset[int], dict[int, frozenset[int]]]:
    """Parents and children of ``target`` with AND symmetry correction.

    Returns the adjacent variables and, for every screened non-member, a
    conditioning set that separated it from the target.
    """
    if cache is not None and target in cache.full:
        return cache.full[target]
    cand, sepsets = _half_pc(table, target, test, max_cond, cache)
    sepsets = dict(sepsets)
    pc = []
    for v in sorted(cand, key=lambda i: table.names[i]):
        back, back_seps = _half_pc(table, v, test, max_cond, cache)
        if target in back:
            pc.append(v)
        else:
            sepsets[v] = back_seps.get(target, frozenset())
    result = (frozenset(pc), sepsets)
    if cache is not None:
        cache.full[target] = result
    return result


def score_partition(
    table: CategoricalTable,
    target: int,
    partition: Partition,
    regrets: RegretTable | None = None,
) -> float:
    """Total code length of the target's neighbourhood under one role split.

    Cost of the target given its joint parent configuration, plus the
    unconditioned cost of each parent, plus each child given the target.
    Summation order is canonical, so the value is independent of how the
    member sets are listed.
    """
    if partition.parents & partition.children:
        raise ValueError("parents and children overlap")
    pa = sorted(partition.parents)
    ch = sorted(partition.children)
    labels_pa, _ = group_labels(table, pa)
    total = conditional_sc(table.columns[target], table.cards[target], labels_pa, regrets)
    for p in pa:
        total += stochastic_complexity(table.columns[p], table.cards[p], regrets)
    if ch:
        labels_t, _ = group_labels(table, [target])
        for c in ch:
            total += conditional_sc(table.columns[c], table.cards[c], labels_t, regrets)
    return total


def find_best_partition(
    table: CategoricalTable,
    target: int,
    pc_set: frozenset[int] | set[int],
    cap: int = 20,
    regrets: RegretTable | None = None,
) -> Partition:
    """Exhaustive minimum-cost split of ``pc_set`` into parents and children.

    Ties prefer fewer parents, then the lexicographically smallest parent
    name set, so the result does not depend on column order.
    """
    members = sorted(pc_set, key=lambda i: table.names[i])
    if len(members) > cap:
        raise PartitionCapError(table.names[target], len(members), cap)
    if not members:
        return Partition(frozenset(), frozenset())

    # per-member terms are partition-independent; only the target term varies
    solo_cost = {
        v: stochastic_complexity(table.columns[v], table.cards[v], regrets) for v in members
    }
    labels_t, _ = group_labels(table, [target])
    child_cost = {
        v: conditional_sc(table.columns[v], table.cards[v], labels_t, regrets) for v in members
    }
    x_t = table.columns[target]
    k_t = table.cards[target]

    best_key = None
    best: Partition | None = None
    for mask in range(1 << len(members)):
        pa = [v for i, v in enumerate(members) if mask >> i & 1]
        pa_set = set(pa)
        labels_pa, _ = group_labels(table, pa)
        score = conditional_sc(x_t, k_t, labels_pa, regrets)
        for v in members:
            score += solo_cost[v] if v in pa_set else child_cost[v]
        key = (score, len(pa), tuple(table.names[v] for v in pa))
        if best_key is None or key < best_key:
            best_key = key
            best = Partition(frozenset(pa), frozenset(m for m in members if m not in pa))
    assert best is not None
    return best


def climb(
    table: CategoricalTable,
    target: int,
    test: IndependenceTest,
    max_cond: int = 3,
    cap: int = 20,
    regrets: RegretTable | None = None,
    cache: PcCache | None = None,
) -> BlanketResult:
    """Causal Markov blanket of ``target``: parents, children and spouses.

    Finds the parents-and-children set, splits it by minimum code length,
    then searches for spouses only through the children: a child is dropped
    if the target is absent from its own parents-and-children set (fast
    symmetry correction), and a candidate spouse is kept when it stays
    dependent on the target once the shared child joins its separating set.

    Passing a :class:`PcCache` lets runs over many targets of the same data
    reuse neighbourhood searches instead of repeating their tests.
    """
    start = test.count
    pc, sepsets = find_pc(table, target, test, max_cond, cache)
    part = find_best_partition(table, target, pc, cap, regrets)
    pa = set(part.parents)
    ch = set(part.children)
    sp: set[int] = set()
    for c in sorted(part.children, key=lambda i: table.names[i]):
        pc_c, _ = find_pc(table, c, test, max_cond, cache)
        if target not in pc_c:
            ch.discard(c)
            continue
        for y in sorted(pc_c, key=lambda i: table.names[i]):
            if y == target or y in pa or y in ch or y in sp:
                continue
            sep = sepsets.get(y, frozenset())
            if not test(target, y, tuple(sorted(sep | {c}))).independent:
                sp.add(y)
    result = BlanketResult(
        parents=frozenset(pa),
        children=frozenset(ch),
        spouses=frozenset(sp),
        tests_performed=test.count - start,
        sepsets=dict(sepsets),
    )
    _check_blanket(result, target)
    return result


def _check_blanket(result: BlanketResult, target: int) -> None:
    sets = (result.parents, result.children, result.spouses)
    assert not any(target in s for s in sets), "blanket contains the target"
    assert not (result.parents & result.children), "parents and children overlap"
    assert not (result.parents & result.spouses), "parents and spouses overlap"
    assert not (result.children & result.spouses), "children and spouses overlap"


def _get_pcd(
    table: CategoricalTable,
    target: int,
    test: IndependenceTest,
    max_cond: int,
) -> tuple[list[int], dict[int, frozenset[int]]]:
    """Candidate parents/children with per-round re-ranking (reference search)."""
    names = table.names
    pcd: list[int] = []
    can = sorted((v for v in range(table.m) if v != target), key=lambda i: names[i])
    sepsets: dict[int, frozenset[int]] = {}

    def weakest(v: int, pool: list[int]) -> tuple[CiVerdict, frozenset[int]]:
        best_verdict = None
        best_set: frozenset[int] = frozenset()
        best_key = None
        for size in range(0, min(max_cond, len(pool)) + 1):
            for zs in combinations(pool, size):
                verdict = test(target, v, zs)
                key = (test.strength(verdict), [names[i] for i in zs])
                if best_key is None or key < best_key:
                    best_key = key
                    best_verdict = verdict
                    best_set = frozenset(zs)
        return best_verdict, best_set

    while can:
        keep = []
        strengths = {}
        for v in can:
            verdict, sep = weakest(v, pcd)
            if verdict.independent:
                sepsets[v] = sep
            else:
                keep.append(v)
                strengths[v] = test.strength(verdict)
        can = keep
        if not can:
            break
        best = min(can, key=lambda v: (-strengths[v], names[v]))
        can.remove(best)
        pcd.append(best)
        drop = []
        for v in pcd:
            pool = [u for u in pcd if u != v]
            verdict, sep = weakest(v, pool)
            if verdict.independent:
                drop.append(v)
                sepsets[v] = sep
        for v in drop:
            pcd.remove(v)
    return pcd, sepsets


def pcmb(
    table: CategoricalTable,
    target: int,
    test: IndependenceTest,
    max_cond: int = 3,
) -> tuple[frozenset[int], int]:
    """Reference undirected Markov blanket; returns the set and its test count."""
    start = test.count

    def get_pc(t: int) -> tuple[list[int], dict[int, frozenset[int]]]:
        cand, seps = _get_pcd(table, t, test, max_cond)
        out = []
        for v in sorted(cand, key=lambda i: table.names[i]):
            back, _ = _get_pcd(table, v, test, max_cond)
            if t in back:
                out.append(v)
        return out, seps

    pc, sepsets = get_pc(target)
    mb = set(pc)
    for y in list(pc):
        pc_y, _ = get_pc(y)
        for x in pc_y:
            if x == target or x in mb:
                continue
            sep = sepsets.get(x, frozenset())
            if not test(target, x, tuple(sorted(sep | {y}))).independent:
                mb.add(x)
    return frozenset(mb), test.count - start
